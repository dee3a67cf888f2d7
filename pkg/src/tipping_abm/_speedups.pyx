# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled run loops for both engines.

These are drop-in replacements for the pure-Python run loops in mark0.py
and mark1.py: same update rules, same documented RNG draw order (uniform
doubles pulled one at a time from the run's PCG64 bit generator), same
recorded series. Float summation is sequential here versus numpy's pairwise
reductions in the fallback, so trajectories agree to rounding, not bitwise;
draw sequences agree exactly.
"""

from libc.math cimport INFINITY, ceil, exp, floor, isinf, log
from libcpp.vector cimport vector

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid

import numpy as np

cimport numpy as cnp
from numpy.random cimport bitgen_t

cnp.import_array()

KERNEL_VERSION = 1

cdef const char *CAPSULE_NAME = "BitGenerator"


cdef bitgen_t *_bitgen(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, CAPSULE_NAME):
        raise ValueError("expected a numpy BitGenerator")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, CAPSULE_NAME)


cdef inline double _nd(bitgen_t *rng) noexcept:
    return rng.next_double(rng.state)


cdef inline Py_ssize_t _rand_index(bitgen_t *rng, Py_ssize_t n) noexcept:
    cdef Py_ssize_t k = <Py_ssize_t>(_nd(rng) * n)
    return n - 1 if k >= n else k


# ---------------------------------------------------------------------------
# Hybrid engine (mark0)
# ---------------------------------------------------------------------------


def mark0_run(
    object bit_generator,
    Py_ssize_t n_firms,
    double mu,
    double c,
    double beta,
    double gamma_p,
    double gamma_w,
    double eta_plus,
    double eta_minus,
    double delta,
    double delta_plus,
    bint use_delta_plus,
    double theta,
    double phi,
    double f,
    bint has_policy,
    double u_trigger,
    double theta_high,
    Py_ssize_t horizon,
    double[::1] u_out,
    double[::1] pbar_out,
    double[::1] wbar_out,
    double[::1] s_out,
    double[::1] k_out,
    long long[::1] bank_out,
    long long[::1] active_out,
    double[::1] infl_out,
):
    """Initialize and run the hybrid engine for `horizon` steps.

    Returns (steps_done, terminated, draws, total_money): steps actually
    recorded, whether the economy collapsed, uniform doubles consumed, and
    the final money audit (savings + net deposits).
    """
    cdef bitgen_t *rng = _bitgen(bit_generator)
    cdef long long draws = 0

    price_a = np.empty(n_firms)
    wage_a = np.ones(n_firms)
    prod_a = np.empty(n_firms)
    dem_a = np.empty(n_firms)
    dep_a = np.empty(n_firms)
    prof_a = np.zeros(n_firms)
    act_a = np.ones(n_firms, dtype=np.int8)
    lab_a = np.zeros(n_firms)
    wd_a = np.zeros(n_firms)
    pd_a = np.zeros(n_firms)
    healthy_a = np.zeros(n_firms, dtype=np.int64)
    cdef double[::1] p = price_a
    cdef double[::1] w = wage_a
    cdef double[::1] y = prod_a
    cdef double[::1] d = dem_a
    cdef double[::1] e = dep_a
    cdef double[::1] prof = prof_a
    cdef signed char[::1] act = act_a
    cdef double[::1] lab = lab_a
    cdef double[::1] wd = wd_a
    cdef double[::1] pd = pd_a
    cdef long long[::1] healthy = healthy_a

    cdef Py_ssize_t i, j, t, n_healthy, nb_active, steps_done = 0
    cdef bint terminated = 0
    cdef double s, total_y, pbar, wbar, u, eps, theta_eff, budget
    cdef double xmax, denom, z, sold, pr, payout, deficit, rem
    cdef double e_plus, e_minus, k_val, log_pbar, prev_log_pbar
    cdef double yi, di, cap, coin, gap, wage_rev, wy
    cdef long long nb

    # init: three draws per firm (price, production, deposits)
    s = n_firms
    for i in range(n_firms):
        p[i] = 1.0 + 0.2 * (_nd(rng) - 0.5)
        y[i] = mu * (1.0 + 0.2 * (_nd(rng) - 0.5)) / 2.0
        e[i] = w[i] * y[i] * 2.0 * _nd(rng)
        d[i] = y[i]
        s -= e[i]
    draws += 3 * n_firms

    pbar = 1.0
    wbar = 1.0
    total_y = 0.0
    for i in range(n_firms):
        total_y += y[i]
    if total_y > 0.0:
        xmax = 0.0
        denom = 0.0
        for i in range(n_firms):
            xmax += p[i] * y[i]
            denom += w[i] * y[i]
        pbar = xmax / total_y
        wbar = denom / total_y
    prev_log_pbar = log(pbar)

    for t in range(horizon):
        # refresh aggregates
        total_y = 0.0
        for i in range(n_firms):
            total_y += y[i]
        u = 1.0 - total_y / (mu * n_firms)
        if total_y > 0.0:
            xmax = 0.0
            denom = 0.0
            for i in range(n_firms):
                xmax += p[i] * y[i]
                denom += w[i] * y[i]
            pbar = xmax / total_y
            wbar = denom / total_y
        theta_eff = theta_high if (has_policy and u > u_trigger) else theta

        # labor allocation over active firms
        nb_active = 0
        xmax = -INFINITY
        for i in range(n_firms):
            if act[i] == 1:
                nb_active += 1
                z = beta * w[i] / wbar
                if z > xmax:
                    xmax = z
        if nb_active > 0:
            denom = 0.0
            for i in range(n_firms):
                if act[i] == 1:
                    denom += exp(beta * w[i] / wbar - xmax)
            for i in range(n_firms):
                if act[i] == 1:
                    lab[i] = (
                        exp(beta * w[i] / wbar - xmax) / denom
                        * mu * n_firms * u
                    )
                else:
                    lab[i] = 0.0
        else:
            for i in range(n_firms):
                lab[i] = 0.0

        # firm updates: wage block (only when gamma_w > 0), then price block
        if gamma_w > 0.0:
            for i in range(n_firms):
                wd[i] = _nd(rng)
            draws += n_firms
        for i in range(n_firms):
            pd[i] = _nd(rng)
        draws += n_firms
        eps = 1.0 - u
        for i in range(n_firms):
            if act[i] != 1:
                continue
            yi = y[i]
            di = d[i]
            if yi < di:
                if gamma_w > 0.0 and prof[i] > 0.0:
                    w[i] *= 1.0 + gamma_w * eps * wd[i]
                    cap = p[i] * (di if di < yi else yi) / yi
                    if cap < w[i]:
                        w[i] = cap
                gap = eta_plus * (di - yi)
                if lab[i] < gap:
                    gap = lab[i]
                y[i] = yi + gap
                if p[i] < pbar:
                    p[i] *= 1.0 + gamma_p * pd[i]
            elif yi > di:
                if gamma_w > 0.0 and prof[i] < 0.0:
                    w[i] *= 1.0 - gamma_w * u * wd[i]
                gap = yi - eta_minus * (yi - di)
                y[i] = gap if gap > 0.0 else 0.0
                if p[i] > pbar:
                    p[i] *= 1.0 - gamma_p * pd[i]

        # refresh u and pbar
        total_y = 0.0
        for i in range(n_firms):
            total_y += y[i]
        u = 1.0 - total_y / (mu * n_firms)
        if total_y > 0.0:
            xmax = 0.0
            for i in range(n_firms):
                xmax += p[i] * y[i]
            pbar = xmax / total_y

        # demand allocation
        nb_active = 0
        for i in range(n_firms):
            if act[i] == 1:
                nb_active += 1
        if nb_active == 0:
            terminated = 1
            break
        budget = 0.0
        for i in range(n_firms):
            budget += w[i] * y[i]
        budget = c * ((s if s > 0.0 else 0.0) + budget)
        xmax = -INFINITY
        for i in range(n_firms):
            if act[i] == 1:
                z = -beta * p[i] / pbar
                if z > xmax:
                    xmax = z
        denom = 0.0
        for i in range(n_firms):
            if act[i] == 1:
                denom += exp(-beta * p[i] / pbar - xmax)
        for i in range(n_firms):
            if act[i] == 1:
                d[i] = budget * exp(-beta * p[i] / pbar - xmax) / (p[i] * denom)
            else:
                d[i] = 0.0

        # accounting, dividends, healthy set
        n_healthy = 0
        for i in range(n_firms):
            if act[i] != 1:
                prof[i] = 0.0
                continue
            sold = y[i] if y[i] < d[i] else d[i]
            pr = p[i] * sold - w[i] * y[i]
            s -= pr
            e[i] += pr
            prof[i] = pr
            if pr > 0.0 and e[i] > 0.0:
                payout = delta_plus * e[i] if use_delta_plus else delta * pr
                e[i] -= payout
                s += payout
            if not isinf(theta_eff):
                if e[i] > theta_eff * w[i] * y[i]:
                    healthy[n_healthy] = i
                    n_healthy += 1

        # default resolution
        deficit = 0.0
        nb = 0
        if not isinf(theta_eff):
            for i in range(n_firms):
                if act[i] != 1:
                    continue
                if e[i] >= -(theta_eff * w[i] * y[i]):
                    continue
                if n_healthy > 0:
                    j = healthy[_rand_index(rng, n_healthy)]
                    coin = _nd(rng)
                    draws += 2
                    if coin < 1.0 - f and e[j] > -e[i]:
                        e[j] += e[i]
                        e[i] = 0.0
                        p[i] = p[j]
                        w[i] = w[j]
                        continue
                deficit -= e[i]
                act[i] = 0
                y[i] = 0.0
                e[i] = 0.0
                nb += 1

        # revivals
        if phi > 0.0:
            wage_rev = wbar
            if gamma_w > 0.0:
                total_y = 0.0
                wy = 0.0
                for i in range(n_firms):
                    if act[i] == 1:
                        total_y += y[i]
                        wy += w[i] * y[i]
                if total_y > 0.0:
                    wage_rev = wy / total_y
            for i in range(n_firms):
                if act[i] == 0:
                    coin = _nd(rng)
                    draws += 1
                    if coin < phi:
                        act[i] = 1
                        p[i] = pbar
                        y[i] = mu * u * _nd(rng)
                        draws += 1
                        if gamma_w > 0.0:
                            w[i] = wage_rev
                        e[i] = w[i] * y[i]
                        deficit += e[i]

        # charge the deficit to savings, then to positive deposits
        if deficit > s:
            rem = deficit - s
            s = 0.0
            e_plus = 0.0
            for i in range(n_firms):
                if act[i] == 1 and e[i] > 0.0:
                    e_plus += e[i]
            if e_plus > 0.0:
                for i in range(n_firms):
                    if act[i] == 1 and e[i] > 0.0:
                        e[i] -= e[i] / e_plus * rem
            else:
                s = -rem
        else:
            s -= deficit

        # record the step
        total_y = 0.0
        for i in range(n_firms):
            total_y += y[i]
        u = 1.0 - total_y / (mu * n_firms)
        if total_y > 0.0:
            xmax = 0.0
            denom = 0.0
            for i in range(n_firms):
                xmax += p[i] * y[i]
                denom += w[i] * y[i]
            pbar = xmax / total_y
            wbar = denom / total_y
        e_plus = 0.0
        e_minus = 0.0
        for i in range(n_firms):
            if e[i] > 0.0:
                e_plus += e[i]
            else:
                e_minus -= e[i]
        denom = s + e_plus
        k_val = e_minus / denom if denom > 0.0 else 0.0
        log_pbar = log(pbar)
        u_out[t] = u
        pbar_out[t] = pbar
        wbar_out[t] = wbar
        s_out[t] = s
        k_out[t] = k_val
        bank_out[t] = nb
        nb_active = 0
        for i in range(n_firms):
            if act[i] == 1:
                nb_active += 1
        active_out[t] = nb_active
        infl_out[t] = log_pbar - prev_log_pbar
        prev_log_pbar = log_pbar
        steps_done = t + 1

    total_y = s
    for i in range(n_firms):
        total_y += e[i]
    return steps_done, bool(terminated), draws, total_y


# ---------------------------------------------------------------------------
# Fully agent-based engine (mark1)
# ---------------------------------------------------------------------------


cdef inline double _credit_contraction(double rate) noexcept:
    cdef double v = 1.0 - (rate - 0.05) / 0.05
    if v > 1.0:
        return 1.0
    return v if v > 0.0 else 0.0


def mark1_run(
    object bit_generator,
    Py_ssize_t n_firms,
    Py_ssize_t n_households,
    double c,
    double gamma_p,
    double gamma_y,
    double delta,
    double rho0,
    double tau,
    Py_ssize_t m_goods,
    bint rate_noise,
    Py_ssize_t horizon,
    double[::1] u_out,
    double[::1] pbar_out,
    double[::1] s_out,
    double[::1] k_out,
    long long[::1] bank_out,
    long long[::1] active_out,
    double[::1] infl_out,
    double[::1] r_out,
    double[::1] rate_out,
):
    """Initialize and run the agent-based engine for `horizon` steps.

    Same return contract as mark0_run; the wage is 1 and productivity one
    worker per output unit throughout.
    """
    cdef bitgen_t *rng = _bitgen(bit_generator)
    cdef long long draws = 0
    cdef double WAGE = 1.0, MARKUP = 0.0
    cdef Py_ssize_t YOUNG_AGE = 100

    price_a = np.ones(n_firms)
    prod_a = np.ones(n_firms)
    targ_a = np.ones(n_firms)
    dem_a = np.ones(n_firms)
    liq_a = np.full(n_firms, 50.0)
    debt_a = np.zeros(n_firms)
    rate_a = np.zeros(n_firms)
    int_a = np.zeros(n_firms)
    vac_a = np.zeros(n_firms, dtype=np.int64)
    age_a = np.zeros(n_firms, dtype=np.int64)
    hs_a = np.zeros(n_households)
    hw_a = np.zeros(n_households)
    perm_a = np.empty(n_households, dtype=np.int64)
    cdef double[::1] p = price_a
    cdef double[::1] y = prod_a
    cdef double[::1] yt = targ_a
    cdef double[::1] d = dem_a
    cdef double[::1] liq = liq_a
    cdef double[::1] debt = debt_a
    cdef double[::1] rate = rate_a
    cdef double[::1] inter = int_a
    cdef long long[::1] vac = vac_a
    cdef long long[::1] age = age_a
    cdef double[::1] hs = hs_a
    cdef double[::1] hw = hw_a
    cdef long long[::1] perm = perm_a

    cdef vector[vector[int]] employees = vector[vector[int]](n_firms)
    cdef vector[int] unemployed
    cdef vector[int] demanding
    cdef vector[int] shops
    cdef vector[int] bankrupt

    cdef double owner_s = 0.0, bank_cash = 0.0, pbar = 1.0
    cdef double pending_debt = 0.0
    cdef double hire_ratio_sum = 0.0, fire_ratio_sum = 0.0
    cdef long long hire_steps = 0, fire_steps = 0
    cdef long long target_hires, realized_hires, target_fires, realized_fires

    cdef Py_ssize_t i, j, k, t, h, n_emp, ld, ld_strategy, steps_done = 0
    cdef Py_ssize_t hu, fd, m, pos, nb_active
    cdef bint terminated = 0
    cdef double draw, need, lev, offered, credit, cost, budget, spent
    cdef double stock, q, service, profit, bad_debts, pool, denom_pool
    cdef double p_b, yt_b, y_b, inject, share, total_sales, acc
    cdef double e_plus, e_minus, net, denom, log_pbar, prev_log_pbar
    cdef double rate_sum
    cdef long long rate_n, nb, gap
    cdef int tmp

    m = m_goods if m_goods < n_firms else n_firms
    prev_log_pbar = log(pbar)

    for t in range(horizon):
        # (a) strategy, loans, interests, labor demand
        target_hires = 0
        realized_hires = 0
        target_fires = 0
        realized_fires = 0
        for i in range(n_firms):
            draw = _nd(rng)
            draws += 1
            age[i] += 1
            if y[i] == d[i]:
                if p[i] >= pbar:
                    yt[i] = y[i] * (1.0 + gamma_y * draw)
                else:
                    p[i] = p[i] * (1.0 + gamma_p * draw)
            elif y[i] > d[i]:
                if p[i] >= pbar:
                    p[i] = p[i] * (1.0 - gamma_p * draw)
                else:
                    yt[i] = y[i] * (1.0 - gamma_y * draw)
            if yt[i] < 1.0:
                yt[i] = 1.0
            ld_strategy = <Py_ssize_t>ceil(yt[i])
            n_emp = employees[i].size()
            need = WAGE * ld_strategy - liq[i]
            if need > 0.0:
                lev = (debt[i] + need) / (liq[i] + 0.001)
                offered = rho0 * (1.0 + log(1.0 + lev))
                if rate_noise:
                    offered *= 1.0 + _nd(rng)
                    draws += 1
                credit = need * _credit_contraction(offered)
                if credit > 0.0:
                    rate[i] = offered
                    debt[i] += credit
                    liq[i] += credit
                    bank_cash -= credit
            inter[i] = rate[i] * debt[i]
            ld = <Py_ssize_t>floor(liq[i] / WAGE)
            if ld_strategy < ld:
                ld = ld_strategy
            if ld < 0:
                ld = 0
            vac[i] = ld - n_emp
            if ld_strategy > n_emp:
                target_hires += ld_strategy - n_emp
                if ld > n_emp:
                    realized_hires += ld - n_emp
            elif ld_strategy < n_emp:
                gap = n_emp - ld_strategy
                target_fires += gap
                realized_fires += gap if n_emp - ld > gap else n_emp - ld
        if target_hires > 0:
            hire_ratio_sum += (<double>realized_hires) / target_hires
            hire_steps += 1
        if target_fires > 0:
            fire_ratio_sum += (<double>realized_fires) / target_fires
            fire_steps += 1

        # (b) job market: fires, then random matching
        for i in range(n_firms):
            while vac[i] < 0:
                k = _rand_index(rng, employees[i].size())
                draws += 1
                h = employees[i][k]
                employees[i][k] = employees[i].back()
                employees[i].pop_back()
                hw[h] = 0.0
                vac[i] += 1
        unemployed.clear()
        for h in range(n_households):
            if hw[h] == 0.0:
                unemployed.push_back(<int>h)
        demanding.clear()
        for i in range(n_firms):
            if vac[i] > 0:
                demanding.push_back(<int>i)
        while unemployed.size() > 0 and demanding.size() > 0:
            hu = _rand_index(rng, unemployed.size())
            fd = _rand_index(rng, demanding.size())
            draws += 2
            h = unemployed[hu]
            i = demanding[fd]
            employees[i].push_back(<int>h)
            hw[h] = WAGE
            vac[i] -= 1
            unemployed[hu] = unemployed.back()
            unemployed.pop_back()
            if vac[i] == 0:
                demanding[fd] = demanding.back()
                demanding.pop_back()

        # (c) production, wage payment, young-firm markup
        for i in range(n_firms):
            n_emp = employees[i].size()
            y[i] = yt[i] if yt[i] < n_emp else <double>n_emp
            d[i] = 0.0
            for k in range(n_emp):
                hs[employees[i][k]] += WAGE
            liq[i] -= WAGE * n_emp
            if age[i] < YOUNG_AGE and y[i] > 0.0:
                cost = (1.0 + MARKUP) * (WAGE * n_emp + inter[i]) / y[i]
                if cost > p[i]:
                    p[i] = cost

        # (d) goods market: random order, m cheapest-first shops each
        for h in range(n_households):
            perm[h] = h
        for i in range(n_households - 1, 0, -1):
            j = _rand_index(rng, i + 1)
            draws += 1
            k = perm[i]
            perm[i] = perm[j]
            perm[j] = k
        for pos in range(n_households):
            h = perm[pos]
            budget = c * hs[h]
            if budget <= 0.0:
                continue
            shops.clear()
            while <Py_ssize_t>shops.size() < m:
                j = _rand_index(rng, n_firms)
                draws += 1
                for k in range(<Py_ssize_t>shops.size()):
                    if shops[k] == <int>j:
                        j = -1
                        break
                if j >= 0:
                    shops.push_back(<int>j)
            # stable insertion sort by ascending price
            for k in range(1, <Py_ssize_t>shops.size()):
                tmp = shops[k]
                fd = k
                while fd > 0 and p[shops[fd - 1]] > p[tmp]:
                    shops[fd] = shops[fd - 1]
                    fd -= 1
                shops[fd] = tmp
            spent = 0.0
            for k in range(<Py_ssize_t>shops.size()):
                if spent >= budget:
                    break
                j = shops[k]
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
            hs[h] -= spent

        # (e) accounting: debt service and dividends
        for i in range(n_firms):
            service = inter[i] + tau * debt[i]
            liq[i] -= service
            bank_cash += service
            debt[i] *= 1.0 - tau
            profit = p[i] * d[i] - WAGE * employees[i].size() - inter[i]
            if profit > 0.0:
                owner_s += delta * profit
                liq[i] -= delta * profit

        # (f) bankruptcies: reinit at healthy averages, spread bad debt
        bankrupt.clear()
        for i in range(n_firms):
            if liq[i] < 0.0:
                bankrupt.push_back(<int>i)
        nb = bankrupt.size()
        if nb > 0:
            if nb == <long long>n_firms:
                terminated = 1
                break
            bad_debts = 0.0
            p_b = 0.0
            yt_b = 0.0
            y_b = 0.0
            for i in range(n_firms):
                if liq[i] < 0.0:
                    bad_debts += liq[i]
                else:
                    p_b += p[i]
                    yt_b += yt[i]
                    y_b += y[i]
            p_b /= n_firms - nb
            yt_b /= n_firms - nb
            y_b /= n_firms - nb
            for k in range(<Py_ssize_t>bankrupt.size()):
                i = bankrupt[k]
                p[i] = p_b
                y[i] = y_b
                yt[i] = yt_b
                d[i] = 0.0
                inject = owner_s if owner_s < y[i] else y[i]
                liq[i] = inject
                owner_s -= inject
                debt[i] = 0.0
                age[i] = 0
                vac[i] = 0
                for j in range(<Py_ssize_t>employees[i].size()):
                    hw[employees[i][j]] = 0.0
                employees[i].clear()
            pool = bad_debts + pending_debt
            pending_debt = 0.0
            if pool < 0.0:
                denom_pool = 0.0
                for i in range(n_firms):
                    net = liq[i] - debt[i]
                    if net > 0.0:
                        denom_pool += net
                for h in range(n_households):
                    if hs[h] > 0.0:
                        denom_pool += hs[h]
                if denom_pool <= 0.0:
                    pending_debt = pool
                else:
                    for i in range(n_firms):
                        net = liq[i] - debt[i]
                        if net > 0.0:
                            liq[i] += pool * net / denom_pool
                    for h in range(n_households):
                        if hs[h] > 0.0:
                            share = pool * hs[h] / denom_pool
                            if hs[h] + share < 0.0:
                                pending_debt += hs[h] + share
                                hs[h] = 0.0
                            else:
                                hs[h] += share

        # sales-weighted average price
        total_sales = 0.0
        acc = 0.0
        for i in range(n_firms):
            total_sales += d[i]
            acc += p[i] * d[i]
        if total_sales > 0.0:
            pbar = acc / total_sales

        # record the step
        k = 0
        for h in range(n_households):
            if hw[h] == 0.0:
                k += 1
        u_out[t] = (<double>k) / n_households
        pbar_out[t] = pbar
        acc = owner_s
        for h in range(n_households):
            acc += hs[h]
        s_out[t] = acc
        e_plus = 0.0
        e_minus = 0.0
        for i in range(n_firms):
            net = liq[i] - debt[i]
            if net > 0.0:
                e_plus += net
            else:
                e_minus -= net
        denom = acc + e_plus
        k_out[t] = e_minus / denom if denom > 0.0 else 0.0
        bank_out[t] = nb
        nb_active = 0
        for i in range(n_firms):
            if y[i] > 0.0:
                nb_active += 1
        active_out[t] = nb_active
        log_pbar = log(pbar)
        infl_out[t] = log_pbar - prev_log_pbar
        prev_log_pbar = log_pbar
        if hire_steps == 0 or fire_steps == 0:
            r_out[t] = 1.0
        else:
            denom = fire_ratio_sum / fire_steps
            if denom > 0.0:
                r_out[t] = (hire_ratio_sum / hire_steps) / denom
            else:
                r_out[t] = INFINITY
        rate_sum = 0.0
        rate_n = 0
        for i in range(n_firms):
            if debt[i] > 0.0:
                rate_sum += rate[i]
                rate_n += 1
        rate_out[t] = rate_sum / rate_n if rate_n > 0 else 0.0
        steps_done = t + 1

    acc = bank_cash + owner_s + pending_debt
    for i in range(n_firms):
        acc += liq[i]
    for h in range(n_households):
        acc += hs[h]
    return steps_done, bool(terminated), draws, acc
