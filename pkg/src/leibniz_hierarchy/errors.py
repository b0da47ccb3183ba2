"""Exception hierarchy shared by every module."""


class HierarchyError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(HierarchyError, ValueError):
    """An input value violates a structural invariant."""


class AlgebraError(ValidationError):
    pass


class EmptyUniverse(AlgebraError):
    pass


class BadArity(AlgebraError):
    pass


class BadTableLength(AlgebraError):
    pass


class EntryOutOfRange(AlgebraError):
    pass


class DuplicateOpName(AlgebraError):
    pass


class SignatureMismatch(AlgebraError):
    pass


class TermError(ValidationError):
    pass


class UnboundVariable(TermError):
    pass


class UnknownOperation(TermError):
    pass


class NotACongruence(ValidationError):
    pass


class NotCompatible(ValidationError):
    pass


class CapExceeded(ValidationError):
    pass


class FamilyMismatch(ValidationError):
    pass


class InstanceError(ValidationError):
    pass


class TrivialAlgebra(InstanceError):
    pass


class HasConstants(InstanceError):
    pass


class ArityOutOfRange(InstanceError):
    pass


class IdentityH(InstanceError):
    pass


class BadMap(InstanceError):
    pass


class ParseError(ValidationError):
    pass


class BudgetExceeded(HierarchyError):
    """A configured resource cap was hit; the question is left undecided."""

    def __init__(self, message: str, reached: int | None = None):
        super().__init__(message)
        self.reached = reached


class FreeAlgebraBudgetExceeded(BudgetExceeded):
    pass


class SubuniverseBudgetExceeded(BudgetExceeded):
    pass


class AssignmentBudgetExceeded(BudgetExceeded):
    pass


class FilterBudgetExceeded(BudgetExceeded):
    pass


class WitnessRejected(HierarchyError):
    """A positive verdict failed its independent replay."""

    def __init__(self, check: str, member: int | None = None, detail=None):
        msg = f"witness rejected at {check!r}"
        if member is not None:
            msg += f" (member {member})"
        if detail is not None:
            msg += f": {detail}"
        super().__init__(msg)
        self.check = check
        self.member = member
        self.detail = detail
