"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid argument, scenario definition, or input file."""


class InfeasibleThresholdError(ValueError):
    """Loss threshold too small to admit a usable coverage geometry."""
