"""Exception hierarchy shared by all fiforge modules."""

from __future__ import annotations


class ForgeError(Exception):
    """Base class for every error raised by fiforge."""


class UsageError(ForgeError, ValueError):
    """Bad arguments: index out of range, malformed input, wrong mode."""


class DegenerateInputError(ForgeError, ValueError):
    """An operation was asked about an empty part or zero-measure set."""


class FeasibilityError(ForgeError):
    """A degree sequence (pair) is not graphic (bigraphic).

    ``condition`` names the violated condition (``"EG1"``, ``"EG2"``,
    ``"GR1"``, ``"GR2"``, ``"range"``) and ``witness`` the offending k.
    """

    def __init__(self, message: str, condition: str, witness: int | None = None):
        super().__init__(message)
        self.condition = condition
        self.witness = witness


class ConcentrationFailure(ForgeError):
    """Rejection sampling ran out of attempts; carries the best report."""

    def __init__(self, message: str, best_report=None, attempts: int = 0):
        super().__init__(message)
        self.best_report = best_report
        self.attempts = attempts


class LayoutError(ForgeError):
    """Buffer sizes came out negative (m, n, beta inconsistent)."""


class BalanceInfeasibleError(ForgeError):
    """A degree-completion step could not be realized.

    ``step`` is one of ``"first"``, ``"second"``, ``"diagonal"``; ``pair`` the
    (i, j) class pair; ``kind`` the sequence family (``"a"``, ``"r"``, ``"c"``);
    ``witness`` the Erdos-Gallai / Gale-Ryser k, if any.
    """

    def __init__(self, message: str, step: str, pair, kind: str, witness=None):
        super().__init__(message)
        self.step = step
        self.pair = pair
        self.kind = kind
        self.witness = witness


class ParityError(BalanceInfeasibleError):
    """Odd degree sum inside a buffer set."""


class SetupInfeasibleError(ForgeError):
    """Strict-mode constants violate the Setup inequalities."""

    def __init__(self, message: str, violations: list[str]):
        super().__init__(message)
        self.violations = violations


class InputNotFIError(ForgeError):
    """A family member is not fractionally isomorphic to the first member."""

    def __init__(self, message: str, member: int):
        super().__init__(message)
        self.member = member


class OracleLimitError(ForgeError):
    """Exact enumeration requested beyond its documented size limit."""
