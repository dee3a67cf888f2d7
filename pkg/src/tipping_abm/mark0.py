"""Hybrid engine: individual adaptive firms, one aggregate household sector.

Firms carry price, wage, production, demand, net deposits and an activity
flag; households are a single savings/budget/income aggregate. Each step
runs, in order: aggregate refresh, firm price/production/wage updates,
demand allocation, accounting with dividends, default resolution
(bailout or bankruptcy), revivals, and debt redistribution. Total money
(savings + net deposits) is conserved to float precision throughout,
including defaults, bailouts and revivals.

Draw order per step (one uniform stream per run):
  1. wage updates: one block of n_firms draws, only when gamma_w > 0;
  2. price updates: one block of n_firms draws;
  3. default resolution, firm-index order: one draw to pick the bailout
     partner plus one coin per over-threshold firm (none when the healthy
     set is empty);
  4. revivals, firm-index order: one coin per inactive firm, plus one
     production draw per revived firm.
Initialization consumes three draws per firm (price, production, deposits),
in firm-index order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .accounting import EconomyCollapse
from .config import SimConfig
from .rng import RngStream


@dataclass
class Mark0Firm:
    """Snapshot of one firm's state (see `Mark0State.firm`)."""

    price: float
    wage: float
    production: float
    demand: float
    deposits: float
    active: bool
    last_profit: float

    @property
    def fragility(self) -> float:
        """Debt-to-payroll ratio; large and positive means close to default."""
        payroll = self.wage * self.production
        if payroll <= 0.0:
            return 0.0 if self.deposits >= 0.0 else math.inf
        return -self.deposits / payroll


@dataclass
class HouseholdAggregate:
    """The household sector as one aggregate: savings, budget, income."""

    savings: float
    budget: float = 0.0
    income: float = 0.0


@dataclass
class Mark0State:
    """Full economy state: firm arrays + household aggregate + clock."""

    price: np.ndarray
    wage: np.ndarray
    production: np.ndarray
    demand: np.ndarray
    deposits: np.ndarray
    active: np.ndarray  # int8; 1 = active
    last_profit: np.ndarray
    household: HouseholdAggregate
    t: int = 0
    p_bar: float = 1.0
    w_bar: float = 1.0
    u: float = 0.5
    last_bankruptcies: int = 0
    leverage_degenerate: bool = field(default=False, repr=False)

    @property
    def n_firms(self) -> int:
        return len(self.price)

    def firm(self, i: int) -> Mark0Firm:
        return Mark0Firm(
            price=float(self.price[i]),
            wage=float(self.wage[i]),
            production=float(self.production[i]),
            demand=float(self.demand[i]),
            deposits=float(self.deposits[i]),
            active=bool(self.active[i]),
            last_profit=float(self.last_profit[i]),
        )

    def total_money(self) -> float:
        return self.household.savings + float(np.sum(self.deposits))


def init_mark0(config: SimConfig, rng: RngStream) -> Mark0State:
    """Initial state: unit wages, prices and production scattered ±10% around
    half employment, deposits up to twice the wage bill, savings chosen so
    total money is exactly n_firms."""
    n = config.n_firms
    draws = rng.random_block(3 * n).reshape(n, 3)
    wage = np.ones(n)
    price = 1.0 + 0.2 * (draws[:, 0] - 0.5)
    production = config.mu * (1.0 + 0.2 * (draws[:, 1] - 0.5)) / 2.0
    deposits = wage * production * 2.0 * draws[:, 2]
    state = Mark0State(
        price=price,
        wage=wage,
        production=production,
        demand=production.copy(),
        deposits=deposits,
        active=np.ones(n, dtype=np.int8),
        last_profit=np.zeros(n),
        household=HouseholdAggregate(savings=float(n - np.sum(deposits))),
    )
    refresh_aggregates(state, config)
    return state


# ---------------------------------------------------------------------------
# Step phases
# ---------------------------------------------------------------------------


def refresh_aggregates(state: Mark0State, config: SimConfig) -> None:
    """Recompute u and the production-weighted p̄, w̄ from the firm arrays.

    With zero total production the weighted means are undefined; the previous
    values are kept (u still updates to 1).
    """
    total_y = float(np.sum(state.production))
    state.u = 1.0 - total_y / (config.mu * config.n_firms)
    if total_y > 0.0:
        state.p_bar = float(np.dot(state.price, state.production)) / total_y
        state.w_bar = float(np.dot(state.wage, state.production)) / total_y


def effective_theta(state: Mark0State, config: SimConfig) -> float:
    """Bankruptcy threshold for this step, accommodation policy applied."""
    if config.policy is not None and state.u > config.policy.u_trigger:
        return config.policy.theta_high
    return config.theta


def allocate_labor(state: Mark0State, config: SimConfig) -> np.ndarray:
    """Workforce available to each firm (μũᵢ): the unemployed, split across
    active firms by an intensity-of-choice rule on offered wages."""
    act = state.active == 1
    out = np.zeros(state.n_firms)
    if not act.any():
        return out
    x = config.beta * state.wage[act] / state.w_bar
    e = np.exp(x - np.max(x))
    share = e / np.sum(e)
    out[act] = share * config.mu * config.n_firms * state.u
    return out


def allocate_demand(state: Mark0State, config: SimConfig) -> np.ndarray:
    """Household demand per firm from the consumption budget.

    Demand is split across active firms by an intensity-of-choice rule on
    relative prices; pricier firms get exponentially less. Inactive firms
    get zero. The allocation exhausts the budget: sum(p·D) = budget.

    Raises EconomyCollapse when no firm is active; sets household.budget.
    """
    act = state.active == 1
    if not act.any():
        raise EconomyCollapse(f"no active firms at t={state.t}")
    budget = config.c * (
        max(state.household.savings, 0.0)
        + float(np.dot(state.wage, state.production))
    )
    state.household.budget = budget
    x = -config.beta * state.price[act] / state.p_bar
    e = np.exp(x - np.max(x))
    z = np.sum(e)
    demand = np.zeros(state.n_firms)
    demand[act] = budget * e / (state.price[act] * z)
    return demand


def update_firms(
    state: Mark0State,
    config: SimConfig,
    rng: RngStream,
    labor_avail: np.ndarray,
) -> None:
    """Adaptive production/price (and optional wage) updates, one pass.

    Excess demand: hire up to the available workforce, and raise the price
    only if below p̄. Excess supply: fire a fraction of the gap, and cut the
    price only if above p̄ (prices never change on ties). Wage updates fire
    only when gamma_w > 0: profitable firms in excess demand raise wages
    (clamped so the raise alone cannot have made last step unprofitable),
    loss-making firms in excess supply cut them.
    """
    act = state.active == 1
    y, d = state.production, state.demand
    excess_demand = act & (y < d)
    excess_supply = act & (y > d)

    if config.gamma_w > 0.0:
        wage_draws = rng.random_block(state.n_firms)
        eps = 1.0 - state.u
        raising = excess_demand & (state.last_profit > 0.0)
        if raising.any():
            state.wage[raising] *= 1.0 + config.gamma_w * eps * wage_draws[raising]
            cap = (
                state.price[raising]
                * np.minimum(d[raising], y[raising])
                / y[raising]
            )
            state.wage[raising] = np.minimum(state.wage[raising], cap)
        lowering = excess_supply & (state.last_profit < 0.0)
        if lowering.any():
            state.wage[lowering] *= (
                1.0 - config.gamma_w * state.u * wage_draws[lowering]
            )

    price_draws = rng.random_block(state.n_firms)
    if excess_demand.any():
        hire = np.minimum(
            config.eta_plus * (d[excess_demand] - y[excess_demand]),
            labor_avail[excess_demand],
        )
        state.production[excess_demand] += hire
        up = excess_demand & (state.price < state.p_bar)
        state.price[up] *= 1.0 + config.gamma_p * price_draws[up]
    if excess_supply.any():
        state.production[excess_supply] = np.maximum(
            y[excess_supply] - config.eta_minus * (y[excess_supply] - d[excess_supply]),
            0.0,
        )
        down = excess_supply & (state.price > state.p_bar)
        state.price[down] *= 1.0 - config.gamma_p * price_draws[down]


def settle_accounts(
    state: Mark0State, config: SimConfig, theta_eff: float | None = None
) -> np.ndarray:
    """Book profits, pay dividends, and collect the healthy set.

    Profit = sales − wage bill; it moves between the firm's deposits and
    household savings so total money is unchanged. Dividends flow only when
    the profit is positive and the post-booking deposits are positive; in
    dividend-plus-reserves mode the payout is delta_plus times the (positive)
    deposits instead of delta times the profit. Returns the indices of
    firms rich enough to buy a defaulted one (deposits > Θ·payroll).
    """
    if theta_eff is None:
        theta_eff = config.theta
    act = state.active == 1
    sold = np.minimum(state.production, state.demand)
    profit = np.where(act, state.price * sold - state.wage * state.production, 0.0)
    state.household.savings -= float(np.sum(profit))
    state.deposits += profit
    state.last_profit = profit

    paying = act & (profit > 0.0) & (state.deposits > 0.0)
    dividends = 0.0
    if paying.any():
        if config.delta_plus is not None:
            payout = config.delta_plus * state.deposits[paying]
        else:
            payout = config.delta * profit[paying]
        state.deposits[paying] -= payout
        dividends = float(np.sum(payout))
        state.household.savings += dividends
    state.household.income = (
        float(np.dot(state.wage, state.production)) + dividends
    )

    if math.isinf(theta_eff):
        return np.empty(0, dtype=np.int64)
    return np.flatnonzero(
        act & (state.deposits > theta_eff * state.wage * state.production)
    )


def resolve_defaults(
    state: Mark0State,
    config: SimConfig,
    rng: RngStream,
    healthy: np.ndarray,
    theta_eff: float | None = None,
) -> tuple[float, int]:
    """Bail out or bankrupt every firm whose debt exceeds Θ times payroll.

    In firm-index order: draw a candidate buyer from the healthy set, then a
    coin; with probability 1-f and a buyer solvent enough to absorb the debt,
    the buyer takes over (deposits merge, price and wage copied, production
    kept). Otherwise the firm goes bankrupt: deactivated, production zeroed,
    and its deficit accumulated for redistribution. No draws are consumed
    when the healthy set is empty. Returns (deficit, bankruptcy count).
    """
    if theta_eff is None:
        theta_eff = config.theta
    if math.isinf(theta_eff):
        return 0.0, 0
    act = state.active == 1
    defaulting = np.flatnonzero(
        act & (state.deposits < -(theta_eff * state.wage * state.production))
    )
    healthy_list = [int(j) for j in healthy]
    deficit = 0.0
    n_bankrupt = 0
    for i in defaulting:
        bailed = False
        if healthy_list:
            j = healthy_list[rng.index(len(healthy_list))]
            coin = rng.random()
            if coin < 1.0 - config.f and state.deposits[j] > -state.deposits[i]:
                state.deposits[j] += state.deposits[i]
                state.deposits[i] = 0.0
                state.price[i] = state.price[j]
                state.wage[i] = state.wage[j]
                bailed = True
        if not bailed:
            deficit -= float(state.deposits[i])
            state.active[i] = 0
            state.production[i] = 0.0
            state.deposits[i] = 0.0
            n_bankrupt += 1
    return deficit, n_bankrupt


def revive_and_redistribute(
    state: Mark0State,
    config: SimConfig,
    rng: RngStream,
    deficit: float,
) -> None:
    """Revive inactive firms with probability phi each, then charge the step's
    deficit (bankruptcy debt + revival liquidity) to household savings.

    A revived firm restarts at the average price with a random slice of the
    unemployed workforce and deposits covering its wage bill (set to the
    production-weighted average wage first when wages are dynamic). If the
    deficit exceeds savings, savings go to zero and the rest is taken from
    positive-deposit firms proportionally to their deposits.
    """
    inactive = np.flatnonzero(state.active == 0)
    if len(inactive) and config.phi > 0.0:
        wage_rev = state.w_bar
        if config.gamma_w > 0.0:
            act = state.active == 1
            total_y = float(np.sum(state.production[act]))
            if total_y > 0.0:
                wage_rev = (
                    float(np.dot(state.wage[act], state.production[act])) / total_y
                )
        for i in inactive:
            if rng.random() < config.phi:
                state.active[i] = 1
                state.price[i] = state.p_bar
                state.production[i] = config.mu * state.u * rng.random()
                if config.gamma_w > 0.0:
                    state.wage[i] = wage_rev
                state.deposits[i] = state.wage[i] * state.production[i]
                deficit += float(state.deposits[i])

    savings = state.household.savings
    if deficit > savings:
        remainder = deficit - savings
        state.household.savings = 0.0
        pos = (state.active == 1) & (state.deposits > 0.0)
        e_plus = float(np.sum(state.deposits[pos]))
        if e_plus > 0.0:
            state.deposits[pos] -= state.deposits[pos] / e_plus * remainder
        else:
            # No positive-deposit firm left; the run is collapsing anyway.
            state.household.savings = -remainder
    else:
        state.household.savings = savings - deficit


def step_mark0(state: Mark0State, config: SimConfig, rng: RngStream) -> Mark0State:
    """Advance one step; phases in pseudo-code order. May raise EconomyCollapse."""
    refresh_aggregates(state, config)
    theta_eff = effective_theta(state, config)
    labor_avail = allocate_labor(state, config)
    update_firms(state, config, rng, labor_avail)
    refresh_aggregates(state, config)
    state.demand = allocate_demand(state, config)
    healthy = settle_accounts(state, config, theta_eff)
    deficit, n_bankrupt = resolve_defaults(state, config, rng, healthy, theta_eff)
    revive_and_redistribute(state, config, rng, deficit)
    state.last_bankruptcies = n_bankrupt
    state.t += 1
    return state


def leverage(state: Mark0State) -> float:
    """Economy-wide debt over total deposits: E⁻ / (S + E⁺), in [0, 1].

    Returns 0 (and flags the state) when the denominator is degenerate.
    """
    e_plus = float(np.sum(np.maximum(state.deposits, 0.0)))
    e_minus = -float(np.sum(np.minimum(state.deposits, 0.0)))
    denom = state.household.savings + e_plus
    if denom <= 0.0:
        state.leverage_degenerate = True
        return 0.0
    return e_minus / denom


def run_mark0_python(
    config: SimConfig, rng: RngStream
) -> tuple[dict[str, np.ndarray], Mark0State, str]:
    """Pure-Python run loop; returns (series columns, final state, termination)."""
    state = init_mark0(config, rng)
    n = config.horizon
    cols = {
        "t": np.arange(n, dtype=np.int64),
        "u": np.empty(n),
        "pbar": np.empty(n),
        "wbar": np.empty(n),
        "S": np.empty(n),
        "k": np.empty(n),
        "bankruptcies": np.zeros(n, dtype=np.int64),
        "active": np.zeros(n, dtype=np.int64),
        "inflation": np.empty(n),
    }
    termination = "completed"
    prev_log_pbar = math.log(state.p_bar)
    steps_done = 0
    for t in range(n):
        try:
            step_mark0(state, config, rng)
        except EconomyCollapse:
            termination = "economy_collapse"
            break
        refresh_aggregates(state, config)
        log_pbar = math.log(state.p_bar)
        cols["u"][t] = state.u
        cols["pbar"][t] = state.p_bar
        cols["wbar"][t] = state.w_bar
        cols["S"][t] = state.household.savings
        cols["k"][t] = leverage(state)
        cols["bankruptcies"][t] = state.last_bankruptcies
        cols["active"][t] = int(np.sum(state.active))
        cols["inflation"][t] = log_pbar - prev_log_pbar
        prev_log_pbar = log_pbar
        steps_done = t + 1
    if steps_done < n:
        cols = {k: v[:steps_done] for k, v in cols.items()}
    return cols, state, termination
