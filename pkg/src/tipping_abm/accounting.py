"""Money-conservation audit shared by both engines."""

from __future__ import annotations


class EconomyCollapse(Exception):
    """Raised when no firm is left to allocate demand to.

    Runs catch this and terminate with a truncated, well-formed result
    rather than an error.
    """


def audit_money(state) -> float:
    """Total money in the economy; constant along every trajectory.

    Hybrid engine: household savings + sum of firm net deposits.
    Agent-based engine: bank cash + sum of firm liquidity + household savings
    (including the firm owner), which equals "bank position incl. loan assets
    + firm net positions + household savings" since the debt ledgers cancel.
    Floating-point drift only; engines never create or destroy money.
    """
    return state.total_money()
