# backend/api/errors.py
"""
Error hierarchy for the semicech engines.
Every error is a ValueError so callers that only know about bad input still catch it.
"""

from typing import Any, Dict, Optional


class SemicechError(ValueError):
    """Base class; carries an optional structured detail mapping for reports"""

    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.detail = dict(detail or {})

    def to_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "message": self.message, "detail": self.detail}


class IncompatibleOperandsError(SemicechError):
    """Operands live in different parent structures"""


class AxiomViolationError(SemicechError):
    """A semiring or semimodule table breaks an axiom"""


class NotInvertibleError(SemicechError):
    pass


class NotSemifieldError(SemicechError):
    pass


class GuardExceededError(SemicechError):
    """An exhaustive enumeration would exceed its configured bound"""


class MembershipError(SemicechError):
    """An element is not in the set an operation requires (e.g. not a cocycle)"""


class ChainIdentityError(SemicechError):
    pass


class CongruenceViolationError(SemicechError):
    """A relation expected to be a congruence is not one"""


class MorphismError(SemicechError):
    pass


class RefinementError(SemicechError):
    pass


class SheafGluingError(SemicechError):
    pass


class CocycleError(SemicechError):
    pass


class DecompositionError(SemicechError):
    pass


class PreconditionError(SemicechError):
    pass


class InputError(SemicechError):
    """Malformed input documents"""
