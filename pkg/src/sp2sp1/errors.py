"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An input violates a documented precondition (non-unit quaternion, non-orthonormal frame...)."""


class StructuralError(ValueError):
    """An input lacks required algebraic structure (not hyperhermitian, not orthogonal...)."""


class UnsupportedDimensionError(ValueError):
    pass


class NumericalDegeneracyError(ArithmeticError):
    pass


class InadmissibleTupleError(ValueError):
    """A lambda tuple does not describe a point of the orbit space."""


class ClassificationError(ArithmeticError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class PoleError(ValueError):
    """A Gamma-function argument sits on (or too close to) a pole."""
