"""Analytical oracles for the hybrid engine's reduced dynamics.

In the small-adjustment limit the firm log-price offsets λᵢ decouple from
the production deficits and evolve by a master equation whose γ_p = 0
operator has the tent density 1 - |λ| as its stationary state. This module
implements that operator exactly on a grid, the first-order stationary
density, the closed-form and numerically integrated critical hiring/firing
ratio R_c, the two-variable (λ, z) reduced simulation, the schematic
savings-price oscillator and its two moment-map approximations, and the
single representative-firm reduction. Everything here is fast, deterministic
given a seed, and used as an oracle against the full engines.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .rng import RngStream

SUPPORT_TOL = 1e-9


@dataclass
class DensityGrid:
    """Piecewise-linear probability density on a uniform grid.

    `mass` holds density values at the n_bins nodes; the normalization
    convention is sum(mass) * dx = 1 (boundary values vanish for all
    densities handled here, so this equals the trapezoid integral).
    """

    lo: float
    hi: float
    n_bins: int
    mass: np.ndarray

    def __post_init__(self) -> None:
        if self.n_bins < 3 or len(self.mass) != self.n_bins:
            raise ValueError("mass must hold one value per grid node")
        if float(np.min(self.mass)) < -1e-9:
            raise ValueError("density values must be non-negative")
        self.mass = np.maximum(np.asarray(self.mass, dtype=float), 0.0)

    @property
    def dx(self) -> float:
        return (self.hi - self.lo) / (self.n_bins - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n_bins)

    def total_mass(self) -> float:
        return float(np.sum(self.mass)) * self.dx

    def normalized(self) -> "DensityGrid":
        total = self.total_mass()
        if total <= 0.0:
            raise ValueError("cannot normalize a zero density")
        return DensityGrid(self.lo, self.hi, self.n_bins, self.mass / total)

    def mean(self) -> float:
        return float(np.sum(self.x * self.mass)) * self.dx


def default_grid_nodes(n_bins: int = 2001, half_width: float = 1.6) -> np.ndarray:
    return np.linspace(-half_width, half_width, n_bins)


def tent_values(lam: np.ndarray) -> np.ndarray:
    """The γ_p = 0 stationary density 1 - |λ| on [-1, 1]."""
    return np.maximum(1.0 - np.abs(lam), 0.0)


def stationary_density_values(
    lam: np.ndarray, gamma_p: float, beta: float
) -> np.ndarray:
    """First-order stationary density of the log-price offsets (not clipped)."""
    return (
        1.0
        - np.abs(lam + beta * gamma_p / 4.0)
        - (gamma_p / 2.0) * np.sign(lam) * lam**2
    )


def stationary_density(
    gamma_p: float, beta: float, n_bins: int = 2001, half_width: float = 1.6
) -> DensityGrid:
    """Discretized first-order stationary density, clipped at 0 and normalized.

    Warns when the raw formula goes negative on a non-negligible set, which
    signals that gamma_p is outside the perturbative regime.
    """
    x = default_grid_nodes(n_bins, half_width)
    raw = stationary_density_values(x, gamma_p, beta)
    dx = x[1] - x[0]
    # Beyond its support the formula is legitimately negative and clipping is
    # by construction; interior clipping shows up as a normalization deficit.
    clipped_total = float(np.sum(np.maximum(raw, 0.0))) * dx
    if abs(clipped_total - 1.0) > 0.02:
        warnings.warn(
            f"stationary density negative on a non-negligible set "
            f"(clipped integral {clipped_total:.4f}); gamma_p={gamma_p} is "
            "outside the perturbative regime",
            stacklevel=2,
        )
    grid = DensityGrid(x[0], x[-1], n_bins, np.maximum(raw, 0.0))
    return grid.normalized()


# ---------------------------------------------------------------------------
# Master-equation operators
# ---------------------------------------------------------------------------


def _node_index(x: np.ndarray, value: float) -> int:
    dx = x[1] - x[0]
    idx = (value - x[0]) / dx
    k = int(round(idx))
    if abs(idx - k) > 1e-9 or not 0 <= k < len(x):
        raise ValueError(
            f"grid must contain {value} as an exact node (spacing {dx})"
        )
    return k


def l0_apply_values(values: np.ndarray, x: np.ndarray) -> np.ndarray:
    """One application of the γ_p = 0 master-equation operator.

    Exact for piecewise-linear inputs: the scattering windows land on grid
    nodes (the grid must contain -1, 0, 1 and 1 must be an integer number of
    cells), so the cumulative trapezoid integral incurs no quadrature error.
    Accepts signed grid functions; input must vanish outside [-1, 1].
    """
    values = np.asarray(values, dtype=float)
    dx = x[1] - x[0]
    i_m1, i_0, i_p1 = _node_index(x, -1.0), _node_index(x, 0.0), _node_index(x, 1.0)
    outside = np.abs(values) * (np.abs(x) > 1.0 + SUPPORT_TOL)
    if float(np.sum(outside)) * dx > SUPPORT_TOL:
        raise ValueError("density has support outside [-1, 1]")

    # cumulative trapezoid: F[k] = integral from x[0] to x[k]
    f = np.zeros(len(x))
    np.cumsum((values[:-1] + values[1:]) * (dx / 2.0), out=f[1:])

    k = np.arange(len(x))
    shift = i_p1 - i_0  # number of cells in one unit length
    # rising branch: integral of P over [max(lambda, 0), min(lambda + 1, 1)]
    a1 = np.maximum(k, i_0)
    b1 = np.minimum(k + shift, i_p1)
    term1 = np.where(b1 > a1, f[np.minimum(b1, len(x) - 1)] - f[a1], 0.0)
    # falling branch: integral of P over [max(lambda - 1, -1), min(lambda, 0)]
    a2 = np.maximum(k - shift, i_m1)
    b2 = np.minimum(k, i_0)
    term2 = np.where(b2 > a2, f[b2] - f[np.maximum(a2, 0)], 0.0)
    return term1 + term2


def apply_L0(density: DensityGrid) -> DensityGrid:
    """Grid-level wrapper of `l0_apply_values` for probability densities."""
    out = l0_apply_values(density.mass, density.x)
    return DensityGrid(density.lo, density.hi, density.n_bins, np.maximum(out, 0.0))


def _master_operator_matrix(x: np.ndarray, gamma_p: float) -> np.ndarray:
    """Dense matrix of the full gamma_p > 0 master-equation operator.

    Row k integrates the density over the two scattering windows of node
    lambda_k, rewritten in arrival-point coordinates u where both branches
    share the kernel weight (1 + 2 gamma_p (u - lambda))^(-1/2) (the
    Jacobians (1 ± gamma_p xi) coincide after the substitution). Cells are
    integrated with two-point Gauss-Legendre against the piecewise-linear
    basis, machine-exact up to the smooth weight's high-order variation; at
    gamma_p = 0 this reduces to the exact tent-preserving operator.
    """
    n = len(x)
    dx = x[1] - x[0]
    g = gamma_p
    a = np.zeros((n, n))
    gl_off = 0.5 / math.sqrt(3.0)

    def add_window(k: int, lo_u: float, hi_u: float) -> None:
        lo_u = max(lo_u, x[0])
        hi_u = min(hi_u, x[-1])
        if hi_u <= lo_u + 1e-15:
            return
        j0 = int(math.floor((lo_u - x[0]) / dx))
        j1 = min(int(math.floor((hi_u - x[0]) / dx)), n - 2)
        cells = np.arange(j0, j1 + 1)
        seg_lo = np.maximum(lo_u, x[cells])
        seg_hi = np.minimum(hi_u, x[cells] + dx)
        width = seg_hi - seg_lo
        ok = width > 0.0
        cells, seg_lo, width = cells[ok], seg_lo[ok], width[ok]
        for off in (0.5 - gl_off, 0.5 + gl_off):
            u = seg_lo + off * width
            w = 0.5 * width / np.sqrt(1.0 + 2.0 * g * (u - x[k]))
            frac = (u - x[cells]) / dx
            np.add.at(a[k], cells, w * (1.0 - frac))
            np.add.at(a[k], cells + 1, w * frac)

    for k in range(n):
        lam = x[k]
        # branch moving right (lambda' > 0 sources): u = lam + xi + g xi^2/2
        a_lo = max(0.0, -lam * (1.0 + g * lam / 2.0))
        a_hi = min(1.0, 1.0 - lam - (g / 2.0) * (1.0 + (1.0 - lam) ** 2))
        if a_hi > a_lo:
            add_window(
                k,
                lam + a_lo + g * a_lo**2 / 2.0,
                lam + a_hi + g * a_hi**2 / 2.0,
            )
        # branch moving left (lambda' < 0 sources): u = lam - xi + g xi^2/2
        b_lo = max(0.0, lam * (1.0 + g * lam / 2.0))
        b_hi = min(1.0, 1.0 + lam + (g / 2.0) * (1.0 + (1.0 + lam) ** 2))
        if b_hi > b_lo:
            add_window(
                k,
                lam - b_hi + g * b_hi**2 / 2.0,
                lam - b_lo + g * b_lo**2 / 2.0,
            )
    return a * dx  # integration against density values


def perturbative_check(
    gamma_p: float,
    n_bins: int = 801,
    max_iter: int = 10000,
    tol: float = 1e-12,
) -> float:
    """Iterate the full master equation to its stationary state and return the
    L1 distance to the first-order formula 1 - |λ| - (γ_p/2) sign(λ) λ².

    The distance is O(γ_p²); raises on non-convergence within max_iter.
    """
    if not 0.0 <= gamma_p <= 0.2:
        raise ValueError(f"gamma_p={gamma_p} outside the perturbative range (0, 0.2]")
    x = default_grid_nodes(n_bins)
    dx = x[1] - x[0]
    op = _master_operator_matrix(x, gamma_p)
    p = tent_values(x)
    p /= np.sum(p) * dx
    for _ in range(max_iter):
        nxt = op @ p
        nxt /= np.sum(nxt) * dx
        delta = float(np.sum(np.abs(nxt - p))) * dx
        p = nxt
        if delta < tol:
            break
    else:
        raise RuntimeError(
            f"master-equation iteration did not converge in {max_iter} steps"
        )
    reference = np.maximum(stationary_density_values(x, gamma_p, 0.0), 0.0)
    return float(np.sum(np.abs(p - reference))) * dx


# ---------------------------------------------------------------------------
# Critical hiring/firing ratio
# ---------------------------------------------------------------------------


def critical_R(gamma_p: float, beta: float, method: str = "closed") -> float:
    """Critical ratio R_c = η₊/η₋ separating collapse from full employment.

    closed: 1 - γ_p (2+β)² / (2(1+β)). numeric: the ratio of the drift
    integrals of the production-deficit equation against the first-order
    stationary density.
    """
    if gamma_p < 0.0 or beta < 0.0:
        raise ValueError("gamma_p and beta must be non-negative")
    if gamma_p >= 4.0 / (beta + 2.0):
        raise ValueError(
            f"gamma_p={gamma_p} outside validity range: needs gamma_p < 4/(beta+2)"
        )
    if method == "closed":
        return 1.0 - gamma_p * (2.0 + beta) ** 2 / (2.0 * (1.0 + beta))
    if method != "numeric":
        raise ValueError(f"unknown method {method!r}; expected 'closed' or 'numeric'")

    g, b = gamma_p, beta
    beta_hat = 1.0 + b + b * b
    lam_bar = -g * (1.0 + b) / 4.0
    split = b / (1.0 + b) * lam_bar  # = -g b / 4, the branch threshold
    # The clipped density vanishes at its own support edges (threshold ∓ the
    # maximal single-step moves), so integrating over a wide window is the
    # support-consistent evaluation.
    lam_min = split - 1.0 - g / 2.0
    lam_max = split + 1.0 - g / 2.0

    def drift(lam: np.ndarray) -> np.ndarray:
        return lam + b * (lam - lam_bar) - 0.5 * g * beta_hat * lam**2

    x_hi = np.linspace(split, lam_max, 20001)
    x_lo = np.linspace(lam_min, split, 20001)
    p_hi = np.maximum(stationary_density_values(x_hi, g, b), 0.0)
    p_lo = np.maximum(stationary_density_values(x_lo, g, b), 0.0)
    up = float(np.trapezoid(p_hi * drift(x_hi), x_hi))
    down = float(np.trapezoid(p_lo * (-drift(x_lo)), x_lo))
    return up / down


# ---------------------------------------------------------------------------
# Reduced (λ, z) simulation
# ---------------------------------------------------------------------------


@dataclass
class ReducedAgent:
    """One firm in reduced coordinates: log-price offset, scaled production
    deficit, savings offset."""

    lam: float
    z: float
    alpha: float = 0.0


@dataclass
class ReducedResult:
    lbar: np.ndarray
    zbar: np.ndarray
    verdict: str  # "collapse" | "full_employment"
    lambda_mean: float


def simulate_reduced(
    n_agents: int,
    gamma_p: float,
    beta: float,
    eta_plus: float,
    eta_minus: float,
    horizon: int,
    rng: RngStream,
    bounded: bool = True,
    burn_in: int | None = None,
) -> ReducedResult:
    """Simulate the decoupled (λᵢ, zᵢ) system and classify the phase.

    Price offsets random-walk toward the tent distribution; the mean deficit
    z̄ drifts up (collapse) or is pinned at its floor (full employment)
    depending on R = η₊/η₋ against the critical ratio. `bounded=False`
    removes the z̄ floor in the hiring branch (the unbounded-production
    variant). Verdict: collapse when the final-quarter mean of z̄ exceeds
    twice the second-quarter mean plus one.

    Draws per step: one block of n_agents uniforms (agents whose offset sits
    exactly on the branch threshold keep their draw unused).
    """
    if eta_minus <= 0.0:
        raise ValueError("eta_minus must be positive")
    r = eta_plus / eta_minus
    beta_hat = 1.0 + beta + beta * beta
    lam = rng.random_block(n_agents) - 0.5
    z = np.zeros(n_agents)
    lbar = np.empty(horizon)
    zbar = np.empty(horizon)
    for t in range(horizon):
        lb = float(np.mean(lam))
        zb = float(np.mean(z))
        lbar[t] = lb
        zbar[t] = zb
        thr = beta / (1.0 + beta) * lb
        xi = rng.random_block(n_agents)
        gap = lam + beta * (lam - lb) - 0.5 * gamma_p * beta_hat * lam**2
        low = lam < thr
        high = lam > thr
        if bounded:
            z += np.where(low, -np.minimum(-gap, zb), 0.0)
        else:
            z += np.where(low, gap, 0.0)
        z += np.where(high, gap / r, 0.0)
        quad = 0.5 * gamma_p * xi**2
        lam += np.where(low, xi - quad, 0.0)
        lam -= np.where(high, xi + quad, 0.0)
    quarter = max(horizon // 4, 1)
    early = float(np.mean(zbar[quarter : 2 * quarter]))
    late = float(np.mean(zbar[-quarter:]))
    verdict = "collapse" if late > 2.0 * early + 1.0 else "full_employment"
    if burn_in is None:
        burn_in = horizon // 4
    return ReducedResult(
        lbar=lbar,
        zbar=zbar,
        verdict=verdict,
        lambda_mean=float(np.mean(lbar[burn_in:])),
    )


# ---------------------------------------------------------------------------
# Schematic oscillator and its moment maps
# ---------------------------------------------------------------------------


@dataclass
class OscillatorResult:
    lbar: np.ndarray
    abar: np.ndarray
    sustained: bool


def _window_amplitude(series: np.ndarray, start: float, end: float) -> float:
    lo = int(len(series) * start)
    hi = int(len(series) * end)
    window = series[lo:hi]
    return float(np.max(window) - np.min(window))


def classify_sustained(
    lbar: np.ndarray, ratio: float = 0.5, floor: float = 0.2
) -> bool:
    """Sustained iff the λ̄ amplitude over the final quarter is at least
    `ratio` times the second-quarter amplitude and above `floor`.

    Below the onset the oscillation is noise-excited with amplitude
    ~ n_agents^(-1/2); above it the limit cycle is size independent with
    peak-to-peak amplitude ~ 0.3. The floor separates the two for
    n_agents >~ 5000 (for smaller systems compare amplitudes across sizes
    instead); the ratio guard catches oscillations still decaying late in
    the run."""
    second = _window_amplitude(lbar, 0.25, 0.5)
    final = _window_amplitude(lbar, 0.75, 1.0)
    return final >= ratio * second and final >= floor


def simulate_schematic_oscillator(
    n_agents: int,
    big_c: float,
    horizon: int,
    rng: RngStream,
    kick: float = 0.3,
) -> OscillatorResult:
    """Simulate the agent-level savings-price oscillator.

    Each agent's savings offset αᵢ absorbs min(λᵢ, Cλᵢ + (ᾱ - Cλ̄)/2); the
    offsets λᵢ random-walk up below the lower threshold, down above the
    upper one, and freeze in between. Offsets start tent-distributed and
    displaced by `kick` so a damped run shows its decay. Draws per step:
    one block of n_agents uniforms (frozen agents keep theirs unused).
    """
    if not 0.0 < big_c < 1.0:
        raise ValueError(f"C={big_c} outside (0, 1)")
    lam_star = (1.0 - big_c) / 6.0
    alpha_star = (2.0 - big_c) * lam_star
    # sum of two uniforms is triangular on [-1, 1]: the tent distribution
    lam = (
        lam_star
        + kick
        + rng.random_block(n_agents)
        + rng.random_block(n_agents)
        - 1.0
    )
    alpha = np.full(n_agents, alpha_star)
    lbar = np.empty(horizon)
    abar = np.empty(horizon)
    for t in range(horizon):
        lb = float(np.mean(lam))
        ab = float(np.mean(alpha))
        lbar[t] = lb
        abar[t] = ab
        half_gap = 0.5 * (ab - big_c * lb)
        eps = half_gap / (1.0 - big_c)
        lower = min(lb, eps)
        upper = max(lb, eps)
        alpha -= np.minimum(lam, big_c * lam + half_gap)
        xi = rng.random_block(n_agents)
        rising = lam < lower
        falling = lam > upper
        lam[rising] += xi[rising]
        lam[falling] -= xi[falling]
    return OscillatorResult(
        lbar=lbar, abar=abar, sustained=classify_sustained(lbar)
    )


def oscillator_fixed_point(big_c: float) -> tuple[float, float]:
    """(λ̄*, ᾱ*) of the schematic oscillator: ((1-C)/6, (2-C)(1-C)/6)."""
    lam_star = (1.0 - big_c) / 6.0
    return lam_star, (2.0 - big_c) * lam_star


def moment_map_simple(
    big_c: float,
    horizon: int = 5000,
    kick: float = 0.05,
    tol: float = 1e-8,
    divergence_cap: float = 1e6,
) -> dict:
    """Iterate the closed two-variable (λ̄, ᾱ) approximation of the oscillator.

    Verdict: 'converges' (reaches the fixed point), 'period-2 cycle'
    (bounded, alternating), or 'diverges' (escapes the cap, as the map does
    for C close to 1 after a transient period-2 regime).
    """
    if not 0.0 < big_c < 1.0:
        raise ValueError(f"C={big_c} outside (0, 1)")
    lam_star, alpha_star = oscillator_fixed_point(big_c)
    lam, alpha = lam_star + kick, alpha_star
    lbar = np.empty(horizon)
    abar = np.empty(horizon)
    verdict = "period-2 cycle"
    steps = horizon
    for t in range(horizon):
        lbar[t] = lam
        abar[t] = alpha
        eps = (alpha - big_c * lam) / (2.0 * (1.0 - big_c))
        a_gap = eps - lam
        lower, upper = min(lam, eps), max(lam, eps)
        bracket = -1.0 + 3.0 * a_gap - 3.0 * a_gap**2 + a_gap**3 * math.copysign(
            1.0, a_gap
        )
        new_alpha = alpha - lam - (1.0 - big_c) / 6.0 * bracket
        dl, du = lower - lam, upper - lam
        new_lam = 0.5 * (
            lower
            + upper
            - 0.5 * dl * dl * math.copysign(1.0, dl)
            - 0.5 * du * du * math.copysign(1.0, du)
        )
        lam, alpha = new_lam, new_alpha
        if abs(lam) > divergence_cap or abs(alpha) > divergence_cap:
            verdict = "diverges"
            steps = t + 1
            break
        if abs(lam - lam_star) < tol and abs(alpha - alpha_star) < tol:
            verdict = "converges"
            steps = t + 1
            break
    return {
        "lbar": lbar[:steps],
        "abar": abar[:steps],
        "verdict": verdict,
    }


def moment_map_simple_onset(
    lo: float = 0.85, hi: float = 0.99, tol: float = 1e-3, horizon: int = 5000
) -> float:
    """Smallest C (by bisection) where the simple moment map stops converging."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if moment_map_simple(mid, horizon)["verdict"] == "converges":
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class OscillatorState:
    """State of the perturbative two-mode map: the two perturbation means
    plus the short histories its memory terms need (d enters with a two-step
    lag, M with one step; s is recomputed inline)."""

    dl1: float
    dl2: float
    d_hist: list[float] = field(default_factory=lambda: [0.0, 0.0, 0.0])
    m_hist: list[float] = field(default_factory=lambda: [0.0, 0.0, 0.0])


def moment_map_linear(
    big_c: float,
    horizon: int = 4000,
    init: tuple[float, float] = (0.01, 0.0),
) -> dict:
    """Iterate the perturbative two-mode oscillation map and classify decay.

    δλ̄₁ ← (δλ̄₁ + δλ̄₂)/2 and δλ̄₂ ← ¾δλ̄₂ - ¼M(t-1) + (7/24)d(t-2)
    - C/(4(1-C))·(δλ̄₁+δλ̄₂), with d = |δλ̄₂-δλ̄₁| and M = max(δλ̄₁, δλ̄₂).
    Histories start at zero. The map is homogeneous of degree one, so the
    damped/sustained verdict is independent of the initial amplitude.
    """
    if not 0.0 < big_c < 1.0:
        raise ValueError(f"C={big_c} outside (0, 1)")
    if big_c > 0.999:
        raise ValueError("C too close to 1: the coupling coefficient diverges")
    state = OscillatorState(dl1=init[0], dl2=init[1])
    # buffers hold [x(t-2), x(t-1), x(t)] while computing t+1
    state.d_hist = [0.0, 0.0, abs(state.dl2 - state.dl1)]
    state.m_hist = [0.0, 0.0, max(state.dl1, state.dl2)]
    coupling = big_c / (4.0 * (1.0 - big_c))
    series = np.empty(horizon)
    for t in range(horizon):
        series[t] = state.dl1
        if abs(state.dl1) > 1e9 or abs(state.dl2) > 1e9:
            # past the onset the oscillation grows without bound
            return {"series": series[: t + 1], "verdict": "sustained"}
        m_prev = state.m_hist[-2]
        d_prev2 = state.d_hist[-3]
        s = state.dl1 + state.dl2
        new1 = 0.5 * s
        new2 = 0.75 * state.dl2 - 0.25 * m_prev + (7.0 / 24.0) * d_prev2 - coupling * s
        state.dl1, state.dl2 = new1, new2
        state.d_hist.append(abs(new2 - new1))
        state.m_hist.append(max(new1, new2))
        state.d_hist.pop(0)
        state.m_hist.pop(0)
    quarter = horizon // 4
    second = float(np.max(np.abs(series[quarter : 2 * quarter])))
    final = float(np.max(np.abs(series[-quarter:])))
    sustained = final >= 0.7 * second
    return {
        "series": series,
        "verdict": "sustained" if sustained else "damped",
    }


def moment_map_linear_onset(
    lo: float = 0.80, hi: float = 0.99, tol: float = 1e-3, horizon: int = 4000
) -> float:
    """Smallest C (by bisection) where the perturbative map stops damping."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if moment_map_linear(mid, horizon)["verdict"] == "damped":
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Representative firm
# ---------------------------------------------------------------------------


def representative_firm(
    eta_plus: float,
    eta_minus: float,
    gamma: float,
    horizon: int,
    rng: RngStream,
    y0: float = 0.5,
    p0: float = 1.05,
    cap: bool = True,
) -> dict:
    """Single-firm reduction: demand 1/p, price random-walks around 1.

    Below unit price the firm grows at rate η₊(1/p - 1) and its price rises;
    above, it shrinks at η₋ and the price falls. Production optionally capped
    at 1 (full employment). Verdict 'full_employment' when the final-decile
    mean production exceeds its starting value, else 'collapse'; the verdict
    flips at R ≈ R_c(γ, β=0). One draw per step. Exactly unit price never
    moves, so p0 defaults slightly off 1.
    """
    y, p = y0, p0
    ys = np.empty(horizon)
    ps = np.empty(horizon)
    for t in range(horizon):
        xi = rng.random()
        if p < 1.0:
            y *= 1.0 + eta_plus * (1.0 / p - 1.0)
            p *= 1.0 + gamma * xi
        elif p > 1.0:
            y *= 1.0 + eta_minus * (1.0 / p - 1.0)
            p *= 1.0 - gamma * xi
        if cap and y > 1.0:
            y = 1.0
        ys[t] = y
        ps[t] = p
    decile = max(horizon // 10, 1)
    verdict = "full_employment" if float(np.mean(ys[-decile:])) > y0 else "collapse"
    return {"y": ys, "p": ps, "verdict": verdict}


def representative_firm_transition(
    gamma: float,
    eta_minus: float = 0.05,
    horizon: int = 20000,
    seed: int = 1234,
    lo: float = 0.5,
    hi: float = 1.3,
    tol: float = 0.02,
) -> float:
    """Locate the representative firm's collapse/full-employment flip in R
    by bisection (majority over three seeds per point)."""
    def collapses(r: float) -> bool:
        votes = 0
        for s in range(3):
            rng = RngStream(seed + s)
            out = representative_firm(r * eta_minus, eta_minus, gamma, horizon, rng)
            votes += out["verdict"] == "collapse"
        return votes >= 2

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if collapses(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
