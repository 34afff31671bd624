class ContractViolation(RuntimeError):
    """A caller broke an operation's precondition."""
