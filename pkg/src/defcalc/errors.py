from __future__ import annotations

import os

DEFAULT_BUDGET = 10**7


class DefcalcError(Exception):
    pass


class BudgetExceeded(DefcalcError):
    """An enumeration would visit more objects than the configured cap."""

    def __init__(self, what: str, size: int, budget: int):
        super().__init__(f"{what}: {size} exceeds enumeration budget {budget}")
        self.size = size
        self.budget = budget


class ParentMismatch(DefcalcError, ValueError):
    pass


class PrecisionError(DefcalcError, ValueError):
    pass


class NotAUnit(DefcalcError, ZeroDivisionError):
    pass


class PreconditionError(DefcalcError, ValueError):
    pass


def get_budget(budget: int | None = None) -> int:
    """Resolve an enumeration budget; ``DEFCALC_BUDGET`` overrides the default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("DEFCALC_BUDGET")
    if env:
        return int(env)
    return DEFAULT_BUDGET


def check_budget(what: str, size: int, budget: int | None = None) -> None:
    cap = get_budget(budget)
    if size > cap:
        raise BudgetExceeded(what, size, cap)


class CheckFailure(DefcalcError):
    """A verification found a counterexample; ``witness`` describes it."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
