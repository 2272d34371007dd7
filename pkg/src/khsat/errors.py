"""Shared exception types."""


class ContractError(ValueError):
    """An argument violates an operation's precondition (e.g. a modality
    appearing where only propositional structure is allowed)."""


class InternalSoundnessError(RuntimeError):
    """A self-check failed: the solver produced an answer its own
    verification layer rejects.  Never swallowed; mapped to exit code 3."""


class BudgetExceededError(ValueError):
    """Requested enumeration bounds exceed the configured search budget."""
