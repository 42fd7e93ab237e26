"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front end.
"""


class LeetorError(Exception):
    exit_code = 1


class MalformedPd(LeetorError, ValueError):
    exit_code = 2


class EdgeCountViolation(MalformedPd):
    pass


class InconsistentOrientation(MalformedPd):
    pass


class NonPlanarDiagram(MalformedPd):
    pass


class MultiComponent(LeetorError):
    exit_code = 4


class SizeLimitExceeded(LeetorError):
    exit_code = 3


class VertexMismatch(LeetorError, ValueError):
    pass


class NonMonomialEntry(LeetorError, ArithmeticError):
    pass


class InvariantViolation(LeetorError, AssertionError):
    """A mathematical identity failed; always an implementation bug."""

    exit_code = 5


class NotACycleAfterMultiplication(InvariantViolation):
    pass


class CeilingRelationViolated(InvariantViolation):
    pass


class FreePartMalformed(InvariantViolation):
    pass


class BoundViolation(InvariantViolation):
    pass


class LemmaViolated(InvariantViolation):
    pass


class IdentityFailed(InvariantViolation):
    pass


class WrongCrossingSign(LeetorError, ValueError):
    pass
