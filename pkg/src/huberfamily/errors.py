class InputError(ValueError):
    """Malformed or out-of-domain input."""


class DegenerateDataError(ArithmeticError):
    """Data that leaves a statistic undefined (zero variance, all ties)."""
