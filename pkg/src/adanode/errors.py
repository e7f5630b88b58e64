"""Exception types shared across the package."""


class SingularPivotError(ArithmeticError):
    """A direct solver hit a pivot too small to divide by safely."""


class NonFiniteError(ArithmeticError):
    """A computed quantity contains NaN or Inf (trajectory blow-up, loss overflow)."""


class GridMismatchError(ValueError):
    """Two objects that must live on the same time grid do not."""


class ClassPopulationError(ValueError):
    """A dataset class has fewer grid points than the requested sample size."""
