"""Shared exception types."""


class BudgetExceededError(RuntimeError):
    """An exact computation would exceed its configured size budget."""


class VerificationError(RuntimeError):
    """A certified object failed its own validity check.

    Raised when an internally constructed certificate (matching edge, gcd
    decomposition, round data) does not verify. On well-formed inputs this
    signals an implementation bug; it also fires when a routine that
    requires an identity is fed a circuit that is not one.
    """


class BoundViolationError(RuntimeError):
    """A verified instance violated a proven bound.

    This is the falsification signal: it means a concrete circuit that
    passed all input checks broke an inequality that is supposed to hold
    unconditionally. The CLI maps it to exit code 3.
    """
