"""Exception types shared across the pricing engine."""


class FwdsvError(Exception):
    """Base class for all library errors."""


class ConfigError(FwdsvError):
    """Invalid configuration or parameter set (CLI exit code 2)."""


class NumericalError(FwdsvError):
    """Numerical failure during evaluation (CLI exit code 3)."""


class QuadratureConvergenceError(NumericalError):
    """Half-line quadrature did not meet its tail criterion within the panel budget."""


class FourierDivergenceError(NumericalError):
    """Fourier tail integrand grows instead of decaying; damping is outside the admissible strip."""


class RiccatiBlowUpError(NumericalError):
    """Matrix Riccati iteration left the trust region (entries above the blow-up guard)."""
