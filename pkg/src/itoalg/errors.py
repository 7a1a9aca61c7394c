"""Exception hierarchy.

``StructuralError`` subclasses signal that an input is not an Ito algebra of
the expected shape (the CLI maps them to exit code 3); ``ShapeError`` is a
malformed input and maps to exit code 1.
"""


class ItoAlgebraError(Exception):
    pass


class ShapeError(ItoAlgebraError, ValueError):
    pass


class SpecMismatch(ItoAlgebraError, ValueError):
    pass


class StructuralError(ItoAlgebraError):
    pass


class NotAnAlgebra(StructuralError):
    pass


class StateNotFaithful(StructuralError):
    pass


class GramNotPSD(StructuralError):
    pass


class GNSInconsistent(StructuralError):
    pass


class RankMismatch(StructuralError):
    pass


class NoUnit(StructuralError):
    pass


class NotIdempotent(StructuralError):
    pass


class NotVacuumBuilder(StructuralError):
    pass


class NotThermalBuilder(StructuralError):
    pass


class NotCommutative(StructuralError):
    pass


class DiagonalizationFailed(StructuralError):
    pass


class MismatchedBundle(StructuralError):
    pass
