"""Fully agent-based engine: firms, households, one firm owner, one bank.

Wages are constant (W = 1) and productivity is one worker per unit of
output. Firms adapt target production and prices, borrow from the bank at a
leverage-dependent rate rho0 * (1 + ln(1 + leverage)) and take only the
credit-contraction fraction F(rate) of their financial need; the resulting
hiring shortfall is the asymmetry that drives the interest-rate tipping
point. Households earn wages, spend a fraction c of their wealth across
m_goods random shops (cheapest first), and firms with negative liquidity go
bankrupt: their loss is spread over positive-wealth agents and they restart
at healthy-average size with an owner cash injection.

Money audit: bank cash + firm liquidity + household savings + owner savings
(+ any clamp carry-over) is constant to float precision.

Draw order per step (one uniform stream per run):
  1. strategy: one draw per firm, firm-index order (plus one rate-noise draw
     per borrowing firm when rate_noise is on);
  2. firing: firms in index order, one draw per fired worker (picks who);
  3. matching: one draw for the household, one for the firm, per hire, until
     either side is exhausted (swap-with-last removal);
  4. goods market: Fisher-Yates permutation of households (N_H - 1 draws),
     then per household with a positive budget, repeated draws until m_goods
     distinct shops are found.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .accounting import EconomyCollapse
from .config import SimConfig
from .rng import RngStream

WAGE = 1.0  # constant wage for all firms and times
ALPHA = 1.0  # productivity: output per worker
MARKUP = 0.0  # young-firm markup over unit cost
YOUNG_AGE = 100  # steps during which the markup rule applies


def credit_contraction(rate: float) -> float:
    """Fraction of its financial need a firm borrows at the offered rate.

    1 below 5%, 0 above 10%, linear in between.
    """
    return min(1.0, max(0.0, 1.0 - (rate - 0.05) / 0.05))


def rate_multiplier(leverage: float) -> float:
    """G(l) = 1 + ln(1 + l): offered rate grows with firm leverage."""
    return 1.0 + math.log(1.0 + leverage)


@dataclass
class AsymmetryProbe:
    """Accumulates target vs realized hires/fires to measure the asymmetry R.

    Targets are the strategy's job creations/destructions before credit;
    realized counts are taken after the financial constraint, i.e. hires the
    firm can still finance (labor-market scarcity is deliberately not
    counted: it reflects the state of the economy, not the firms' reaction
    asymmetry). Firing needs no financing, so fires toward target always
    fulfil and that ratio is identically 1; credit-forced extra fires count
    on the hire side of the story. Per step both sides are pooled over
    firms (per-firm averaging would be an alternative reading; pooled is
    less noisy for small firms), and R is the time average of the hire
    fulfillment divided by the time average of the fire fulfillment; steps
    with no targets on a side are skipped for that side.
    """

    target_hires: int = 0
    realized_hires: int = 0
    target_fires: int = 0
    realized_fires: int = 0
    hire_ratio_sum: float = 0.0
    hire_steps: int = 0
    fire_ratio_sum: float = 0.0
    fire_steps: int = 0

    def record_step(
        self, target_hires: int, realized_hires: int,
        target_fires: int, realized_fires_capped: int,
    ) -> None:
        self.target_hires += target_hires
        self.realized_hires += realized_hires
        self.target_fires += target_fires
        self.realized_fires += realized_fires_capped
        if target_hires > 0:
            self.hire_ratio_sum += realized_hires / target_hires
            self.hire_steps += 1
        if target_fires > 0:
            self.fire_ratio_sum += realized_fires_capped / target_fires
            self.fire_steps += 1

    def measured(self) -> float:
        """Current R; 1.0 until both sides have data."""
        if self.hire_steps == 0 or self.fire_steps == 0:
            return 1.0
        hire = self.hire_ratio_sum / self.hire_steps
        fire = self.fire_ratio_sum / self.fire_steps
        return hire / fire if fire > 0.0 else math.inf


def measure_asymmetry(probe: AsymmetryProbe) -> float:
    """Time-averaged asymmetry ratio R from an accumulated probe."""
    return probe.measured()


@dataclass
class Mark1State:
    """Firms (arrays + employee lists), households, owner, bank, probe."""

    price: np.ndarray
    production: np.ndarray
    target: np.ndarray
    demand: np.ndarray  # units sold this step
    liquidity: np.ndarray
    debt: np.ndarray
    rate: np.ndarray
    interests: np.ndarray
    labor_demand: np.ndarray  # int64
    vacancies: np.ndarray  # int64
    age: np.ndarray  # int64
    employees: list[list[int]]
    hh_savings: np.ndarray
    hh_wage: np.ndarray
    hh_employer: np.ndarray  # int64, -1 = unemployed
    owner_savings: float = 0.0
    bank_cash: float = 0.0
    p_bar: float = 1.0
    t: int = 0
    pending_debt: float = 0.0  # clamped bad-debt carry (non-positive)
    last_bankruptcies: int = 0
    probe: AsymmetryProbe = field(default_factory=AsymmetryProbe)
    last_hire_ratio: float = 1.0

    @property
    def n_firms(self) -> int:
        return len(self.price)

    @property
    def n_households(self) -> int:
        return len(self.hh_savings)

    def unemployment(self) -> float:
        return float(np.count_nonzero(self.hh_wage == 0.0)) / self.n_households

    def total_money(self) -> float:
        return (
            self.bank_cash
            + float(np.sum(self.liquidity))
            + float(np.sum(self.hh_savings))
            + self.owner_savings
            + self.pending_debt
        )


def init_mark1(config: SimConfig) -> Mark1State:
    """All firms identical (p = Y = Yᵀ = D = 1, liquidity 50), everyone
    unemployed with zero savings. Consumes no draws."""
    n = config.n_firms
    n_h = config.n_households
    return Mark1State(
        price=np.ones(n),
        production=np.ones(n),
        target=np.ones(n),
        demand=np.ones(n),
        liquidity=np.full(n, 50.0),
        debt=np.zeros(n),
        rate=np.zeros(n),
        interests=np.zeros(n),
        labor_demand=np.zeros(n, dtype=np.int64),
        vacancies=np.zeros(n, dtype=np.int64),
        age=np.zeros(n, dtype=np.int64),
        employees=[[] for _ in range(n)],
        hh_savings=np.zeros(n_h),
        hh_wage=np.zeros(n_h),
        hh_employer=np.full(n_h, -1, dtype=np.int64),
    )


def _swap_remove(lst: list[int], idx: int) -> None:
    lst[idx] = lst[-1]
    lst.pop()


def step_mark1(state: Mark1State, config: SimConfig, rng: RngStream) -> Mark1State:
    """Advance one step; phases in pseudo-code order. May raise EconomyCollapse."""
    n = state.n_firms
    p, y, yt = state.price, state.production, state.target
    d, liq, debt = state.demand, state.liquidity, state.debt

    # (a) strategy update, loans, interests, labor demand
    target_hires = 0
    realized_hires = 0
    target_fires = 0
    realized_fires = 0
    for i in range(n):
        draw = rng.random()
        state.age[i] += 1
        if y[i] == d[i]:
            if p[i] >= state.p_bar:
                yt[i] = y[i] * (1.0 + config.gamma_y * draw)
            else:
                p[i] = p[i] * (1.0 + config.gamma_p * draw)
        elif y[i] > d[i]:
            if p[i] >= state.p_bar:
                p[i] = p[i] * (1.0 - config.gamma_p * draw)
            else:
                yt[i] = y[i] * (1.0 - config.gamma_y * draw)
        yt[i] = max(yt[i], ALPHA)
        ld_strategy = math.ceil(yt[i] / ALPHA)
        n_emp = len(state.employees[i])
        # loans
        need = WAGE * ld_strategy - liq[i]
        if need > 0.0:
            lev = (debt[i] + need) / (liq[i] + 0.001)
            offered = config.rho0 * rate_multiplier(lev)
            if config.rate_noise:
                offered *= 1.0 + rng.random()
            credit = need * credit_contraction(offered)
            if credit > 0.0:
                state.rate[i] = offered
                debt[i] += credit
                liq[i] += credit
                state.bank_cash -= credit
        state.interests[i] = state.rate[i] * debt[i]
        ld = max(0, min(ld_strategy, math.floor(liq[i] / WAGE)))
        state.labor_demand[i] = ld
        state.vacancies[i] = ld - n_emp
        if ld_strategy > n_emp:
            target_hires += ld_strategy - n_emp
            realized_hires += max(0, ld - n_emp)
        elif ld_strategy < n_emp:
            gap = n_emp - ld_strategy
            target_fires += gap
            realized_fires += min(n_emp - ld, gap)
    state.probe.record_step(target_hires, realized_hires, target_fires, realized_fires)
    state.last_hire_ratio = (
        realized_hires / target_hires if target_hires > 0 else 1.0
    )

    # (b) job market: over-staffed firms fire, then random matching
    for i in range(n):
        while state.vacancies[i] < 0:
            emp = state.employees[i]
            k = rng.index(len(emp))
            h = emp[k]
            _swap_remove(emp, k)
            state.hh_wage[h] = 0.0
            state.hh_employer[h] = -1
            state.vacancies[i] += 1
    unemployed = [h for h in range(state.n_households) if state.hh_wage[h] == 0.0]
    demanding = [i for i in range(n) if state.vacancies[i] > 0]
    while unemployed and demanding:
        hu = rng.index(len(unemployed))
        fd = rng.index(len(demanding))
        h, i = unemployed[hu], demanding[fd]
        state.employees[i].append(h)
        state.hh_wage[h] = WAGE
        state.hh_employer[h] = i
        state.vacancies[i] -= 1
        _swap_remove(unemployed, hu)
        if state.vacancies[i] == 0:
            _swap_remove(demanding, fd)

    # (c) production, wages, young-firm markup
    for i in range(n):
        n_emp = len(state.employees[i])
        y[i] = min(yt[i], ALPHA * n_emp)
        d[i] = 0.0
        for h in state.employees[i]:
            state.hh_savings[h] += WAGE
        liq[i] -= WAGE * n_emp
        if state.age[i] < YOUNG_AGE and y[i] > 0.0:
            cost = (1.0 + MARKUP) * (WAGE * n_emp + state.interests[i]) / y[i]
            if cost > p[i]:
                p[i] = cost

    # (d) goods market: households in random order, m_goods shops, cheapest first
    perm = np.arange(state.n_households, dtype=np.int64)
    rng.shuffle(perm)
    m = min(config.m_goods, n)
    for h in perm:
        budget = config.c * state.hh_savings[h]
        if budget <= 0.0:
            continue
        shops: list[int] = []
        while len(shops) < m:
            j = rng.index(n)
            if j not in shops:
                shops.append(j)
        shops.sort(key=lambda j: p[j])  # stable: ties keep draw order
        spent = 0.0
        for j in shops:
            if spent >= budget:
                break
            stock = y[j] - d[j]
            if stock > 0.0:
                q = (budget - spent) / p[j]
                if stock > q:
                    d[j] += q
                    liq[j] += p[j] * q
                    spent = budget
                else:
                    d[j] += stock
                    liq[j] += p[j] * stock
                    spent += stock * p[j]
        state.hh_savings[h] -= spent

    # (e) accounting: debt service, dividends
    for i in range(n):
        service = state.interests[i] + config.tau * debt[i]
        liq[i] -= service
        state.bank_cash += service
        debt[i] *= 1.0 - config.tau
        profit = p[i] * d[i] - WAGE * len(state.employees[i]) - state.interests[i]
        if profit > 0.0:
            state.owner_savings += config.delta * profit
            liq[i] -= config.delta * profit

    # (f) bankruptcies: reinit at healthy averages, spread the bad debt
    bankrupt = [i for i in range(n) if liq[i] < 0.0]
    state.last_bankruptcies = len(bankrupt)
    if bankrupt:
        if len(bankrupt) == n:
            raise EconomyCollapse(f"all firms bankrupt at t={state.t}")
        healthy_mask = liq >= 0.0
        bad_debts = float(np.sum(liq[~healthy_mask]))
        p_b = float(np.mean(p[healthy_mask]))
        yt_b = float(np.mean(yt[healthy_mask]))
        y_b = float(np.mean(y[healthy_mask]))
        for i in bankrupt:
            p[i] = p_b
            y[i] = y_b
            yt[i] = yt_b
            d[i] = 0.0
            inject = min(state.owner_savings, y[i] / ALPHA)
            liq[i] = inject
            state.owner_savings -= inject
            debt[i] = 0.0
            state.age[i] = 0
            state.vacancies[i] = 0
            for h in state.employees[i]:
                state.hh_wage[h] = 0.0
                state.hh_employer[h] = -1
            state.employees[i].clear()
        _spread_bad_debt(state, bad_debts)

    # sales-weighted average price
    total_sales = float(np.sum(d))
    if total_sales > 0.0:
        state.p_bar = float(np.dot(p, d)) / total_sales
    state.t += 1
    return state


def _spread_bad_debt(state: Mark1State, bad_debts: float) -> None:
    """Charge the (negative) bad-debt pool to positive-wealth agents,
    proportionally to firm equity and household savings. Households are
    clamped at zero; any clamped remainder rolls into the next step's pool.
    """
    pool = bad_debts + state.pending_debt
    state.pending_debt = 0.0
    if pool >= 0.0:
        return
    equity = state.liquidity - state.debt
    pos_eq = np.maximum(equity, 0.0)
    pos_sv = np.maximum(state.hh_savings, 0.0)
    denom = float(np.sum(pos_eq)) + float(np.sum(pos_sv))
    if denom <= 0.0:
        state.pending_debt = pool
        return
    state.liquidity += pool * pos_eq / denom
    shares = pool * pos_sv / denom
    new_savings = state.hh_savings + shares
    clamped = new_savings < 0.0
    if clamped.any():
        state.pending_debt = float(np.sum(new_savings[clamped]))
        new_savings[clamped] = 0.0
    state.hh_savings = new_savings


def employment_consistent(state: Mark1State) -> bool:
    """Every employed household appears in exactly one employee list and
    bookkeeping (wage, employer, counts) agrees."""
    seen: dict[int, int] = {}
    for i, emp in enumerate(state.employees):
        for h in emp:
            if h in seen:
                return False
            seen[h] = i
    for h in range(state.n_households):
        if state.hh_wage[h] > 0.0:
            if seen.get(h) != state.hh_employer[h] or state.hh_employer[h] < 0:
                return False
        elif h in seen:
            return False
    return True


def run_mark1_python(
    config: SimConfig, rng: RngStream
) -> tuple[dict[str, np.ndarray], Mark1State, str]:
    """Pure-Python run loop; returns (series columns, final state, termination)."""
    state = init_mark1(config)
    n = config.horizon
    cols = {
        "t": np.arange(n, dtype=np.int64),
        "u": np.empty(n),
        "pbar": np.empty(n),
        "wbar": np.full(n, WAGE),
        "S": np.empty(n),
        "k": np.empty(n),
        "bankruptcies": np.zeros(n, dtype=np.int64),
        "active": np.zeros(n, dtype=np.int64),
        "inflation": np.empty(n),
        "R_measured": np.empty(n),
        "mean_rate": np.empty(n),
    }
    termination = "completed"
    prev_log_pbar = math.log(state.p_bar)
    steps_done = 0
    for t in range(n):
        try:
            step_mark1(state, config, rng)
        except EconomyCollapse:
            termination = "economy_collapse"
            break
        log_pbar = math.log(state.p_bar)
        cols["u"][t] = state.unemployment()
        cols["pbar"][t] = state.p_bar
        cols["S"][t] = float(np.sum(state.hh_savings)) + state.owner_savings
        cols["k"][t] = _leverage_mark1(state)
        cols["bankruptcies"][t] = state.last_bankruptcies
        cols["active"][t] = int(np.count_nonzero(state.production > 0.0))
        cols["inflation"][t] = log_pbar - prev_log_pbar
        cols["R_measured"][t] = state.probe.measured()
        indebted = state.debt > 0.0
        cols["mean_rate"][t] = (
            float(np.mean(state.rate[indebted])) if indebted.any() else 0.0
        )
        prev_log_pbar = log_pbar
        steps_done = t + 1
    if steps_done < n:
        cols = {k: v[:steps_done] for k, v in cols.items()}
    return cols, state, termination


def _leverage_mark1(state: Mark1State) -> float:
    """Debt-to-deposits analogue of the hybrid engine's k, on net positions."""
    net = state.liquidity - state.debt
    e_plus = float(np.sum(np.maximum(net, 0.0)))
    e_minus = -float(np.sum(np.minimum(net, 0.0)))
    denom = float(np.sum(state.hh_savings)) + state.owner_savings + e_plus
    return e_minus / denom if denom > 0.0 else 0.0


def find_transition(
    base_config: SimConfig,
    rho_values: list[float],
    seeds_per_point: int = 5,
    master_seed: int = 0,
    run_fn=None,
) -> dict:
    """Sweep rho0 and locate the unemployment tipping point.

    Returns {"rho": values, "mean_u": per-point seed-mean of the long-run
    unemployment, "critical": smallest rho0 with mean u > 0.8, "censored":
    True when the grid never crosses}. Long-run means are taken after
    burn_in (from base_config).
    """
    from .config import with_params
    from .rng import derive_run_seed

    if run_fn is None:
        from .runner import run_mark1 as run_fn  # circular-free lazy import
    mean_u = []
    for ri, rho in enumerate(rho_values):
        us = []
        for s in range(seeds_per_point):
            seed = derive_run_seed(master_seed, (ri, s))
            cfg = with_params(base_config, rho0=rho, seed=seed)
            result = run_fn(cfg)
            u = result.columns["u"][base_config.burn_in:]
            us.append(float(np.mean(u)) if len(u) else 1.0)
        mean_u.append(float(np.mean(us)))
    critical = None
    for rho, u in zip(rho_values, mean_u):
        if u > 0.8:
            critical = rho
            break
    return {
        "rho": list(rho_values),
        "mean_u": mean_u,
        "critical": critical,
        "censored": critical is None,
    }
