"""Exception types shared across the toolkit."""


class DegenerateBasisError(ValueError):
    """Input matrix is rank deficient (or has a nonpositive pivot) where a
    full-column-rank basis is required."""


class BudgetExceededError(RuntimeError):
    """An exact enumeration ran out of its node or dimension budget.

    Distinct from "no solution": enumeration over a full-rank lattice always
    has a solution, only resource exhaustion aborts.
    """


class SolverContractError(RuntimeError):
    """A Hermite-SVP solver returned a vector violating its own norm bound."""


class ConfigError(ValueError):
    """Invalid simulation configuration."""
