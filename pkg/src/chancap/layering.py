"""Expected capacity via degraded broadcast layering.

Each channel state is treated as a virtual receiver of a degraded
broadcast channel.  For BSC states the Bergmans cascade parameterizes
the region: auxiliary crossovers 0 = r_0 <= r_1 <= ... <= r_N = 1/2,
layer i carrying rate h(r_i * p_i) - h(r_{i-1} * p_i), and state i
decoding all layers j >= i.  The continuous-state limit replaces the
cascade by a monotone profile r(p) whose optimality condition is an
Euler equation with two cutoffs p_l (r = 0) and p_u (r = 1/2): states
better than p_l decode everything, states worse than p_u get nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .channels import (
    EPS,
    PointMassDensity,
    binary_entropy,
    bsc_capacity,
    star,
)

# Switch to the removable-singularity limit of the Euler LHS this close
# to x = 1/2.
_LHS_LIMIT_BAND = 1e-6


def _h(x: float) -> float:
    """Scalar binary entropy for hot loops (no array dispatch)."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -(x * math.log(x) + (1.0 - x) * math.log(1.0 - x)) / math.log(2.0)


def _h_prime(x: float) -> float:
    x = min(max(x, EPS), 1.0 - EPS)
    return math.log2((1.0 - x) / x)


def _star(a: float, b: float) -> float:
    return a + b - 2.0 * a * b


@dataclass(frozen=True)
class LayerProfile:
    """Monotone overall auxiliary crossover r(p) on a grid."""

    grid: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if g.ndim != 1 or g.size < 2 or r.shape != g.shape:
            raise ValueError("LayerProfile: grid and r must be matching 1-D arrays")
        if np.any(np.diff(g) <= 0.0):
            raise ValueError("LayerProfile: grid must be strictly increasing")
        if g[0] < 0.0 or g[-1] > 0.5:
            raise ValueError("LayerProfile: grid must lie in [0, 1/2]")
        if np.any(r < -1e-12) or np.any(r > 0.5 + 1e-12):
            raise ValueError("LayerProfile: r must lie in [0, 1/2]")
        if np.any(np.diff(r) < -1e-12):
            raise ValueError("LayerProfile: r must be nondecreasing")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "r", np.clip(r, 0.0, 0.5))


@dataclass(frozen=True)
class RateProfile:
    """Cumulative decodable rate R(p): what a state-p receiver gets."""

    grid: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        rr = np.asarray(self.rates, dtype=float)
        if g.shape != rr.shape:
            raise ValueError("RateProfile: grid and rates must match")
        if np.any(np.diff(rr) > 1e-9):
            raise ValueError("RateProfile: rates must be nonincreasing in p")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "rates", rr)

    def rate_at(self, p):
        """R(p); the plateau value below the grid, 0 above it."""
        return np.interp(p, self.grid, self.rates, left=float(self.rates[0]), right=0.0)


@dataclass(frozen=True)
class CutoffPair:
    p_l: float
    p_u: float

    def __post_init__(self):
        if not 0.0 <= self.p_l <= self.p_u <= 0.5:
            raise ValueError("CutoffPair: need 0 <= p_l <= p_u <= 1/2")


def ge_expected_capacity(p_good: float, p_bad: float, pi_good: float) -> tuple[float, float]:
    """Expected capacity of the two-state (frozen) BSC composite.

    Maximizes J(r) = 1 - h(r * p_bad) + pi_good [h(r * p_good) - h(p_good)]
    over the single auxiliary crossover r.  Setting J'(r) = 0 gives a
    closed form: with A = (1-2 p_bad)/(1-2 p_good) and
    f(a, b) = log(1/a - 1)/log(1/b - 1),

        r* = 0    if pi_good <= A f(p_bad, p_good)   (J'(0) <= 0)
        r* = 1/2  if pi_good >= A^2                  (J'(1/2) >= 0)
        else r* solves f(r * p_good, r * p_bad) = A / pi_good,
        whose left side decreases from f(p_good, p_bad) to 1/A, so the
        interior root is unique and bisection applies.

    The result is cross-checked against a direct bounded golden-section
    maximization of J; disagreement beyond 1e-6 raises.

    Returns (expected capacity, r*).
    """
    if not 0.0 <= p_good < p_bad <= 0.5:
        raise ValueError("ge_expected_capacity: need 0 <= p_good < p_bad <= 1/2")
    if not 0.0 <= pi_good <= 1.0:
        raise ValueError("ge_expected_capacity: pi_good must lie in [0, 1]")

    def objective(r: float) -> float:
        return (
            1.0
            - binary_entropy(star(r, p_bad))
            + pi_good * (binary_entropy(star(r, p_good)) - binary_entropy(p_good))
        )

    if pi_good == 0.0:
        return bsc_capacity(p_bad), 0.0
    if pi_good == 1.0:
        return bsc_capacity(p_good), 0.5

    def log_ratio(a: float, b: float) -> float:
        return math.log(1.0 / a - 1.0) / math.log(1.0 / b - 1.0)

    big_a = (1.0 - 2.0 * p_bad) / (1.0 - 2.0 * p_good)
    if p_good > 0.0 and pi_good <= big_a * log_ratio(p_bad, p_good):
        r_star = 0.0
    elif pi_good >= big_a * big_a:
        r_star = 0.5
    else:
        def stationarity(r: float) -> float:
            return log_ratio(star(r, p_good), star(r, p_bad)) - big_a / pi_good

        r_star = brentq(stationarity, 1e-12, 0.5 - 1e-12, xtol=1e-12)

    ce = objective(r_star)
    check = minimize_scalar(
        lambda r: -objective(r), bounds=(0.0, 0.5), method="bounded", options={"xatol": 1e-9}
    )
    if ce < -check.fun - 1e-6:
        raise AssertionError("ge_expected_capacity: closed form disagrees with direct maximization")
    return ce, r_star


def bergmans_rates(p_states, r) -> np.ndarray:
    """Per-layer rates of the Bergmans cascade.

    `p_states` are the N state crossovers sorted ascending; `r` is the
    full auxiliary chain of length N+1 with r[0] = 0 and r[-1] = 1/2.
    Layer i (1-based) carries R_i = h(r_i * p_i) - h(r_{i-1} * p_i);
    state i decodes layers i..N.
    """
    p = np.asarray(p_states, dtype=float)
    rr = np.asarray(r, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ValueError("bergmans_rates: need at least one state")
    if np.any(p < 0.0) or np.any(p > 0.5) or np.any(np.diff(p) < 0.0):
        raise ValueError("bergmans_rates: states must be sorted in [0, 1/2]")
    if rr.shape != (p.size + 1,):
        raise ValueError("bergmans_rates: r must have length N+1 (including both endpoints)")
    if abs(rr[0]) > 1e-12 or abs(rr[-1] - 0.5) > 1e-12:
        raise ValueError("bergmans_rates: r must start at 0 and end at 1/2")
    if np.any(np.diff(rr) < -1e-12):
        raise ValueError("bergmans_rates: r must be nondecreasing")
    return binary_entropy(star(rr[1:], p)) - binary_entropy(star(rr[:-1], p))


def discrete_expected_rate(weights, p_states, r) -> float:
    """Expected rate sum_i w_i R(p_i) with R(p_i) = sum_{j >= i} R_j.

    Rearranged as sum_j W_j R_j with W_j the cdf of the weights, which
    is the form the optimizer differentiates.
    """
    w = np.asarray(weights, dtype=float)
    rates = bergmans_rates(p_states, r)
    return float(np.dot(np.cumsum(w), rates))


def optimize_discrete(weights, p_states) -> tuple[np.ndarray, float]:
    """Maximize the discrete layered expected rate over the r chain.

    Projected coordinate ascent on the interior r_1..r_{N-1}: each pass
    maximizes one coordinate exactly on [r_{k-1}, r_{k+1}] (the local
    objective touches only layers k and k+1).  Three starts (linear
    ramp, near-0, near-1/2); the best finisher must satisfy first-order
    stationarity with projected-gradient residual < 1e-8.
    """
    p = np.asarray(p_states, dtype=float)
    w = np.asarray(weights, dtype=float)
    if w.shape != p.shape:
        raise ValueError("optimize_discrete: weights and states must match")
    if np.any(w < 0.0) or abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("optimize_discrete: weights must be a pmf")
    n = p.size
    if n == 1:
        r = np.array([0.0, 0.5])
        return r, discrete_expected_rate(w, p, r)

    cum_w = np.cumsum(w)

    def local_term(k: int, rk: float) -> float:
        # Only layers k and k+1 (1-based) involve r_k.
        val = cum_w[k - 1] * _h(_star(rk, p[k - 1]))
        val -= cum_w[k] * _h(_star(rk, p[k]))
        return val

    def residual(chain: np.ndarray) -> float:
        worst = 0.0
        for k in range(1, n):
            grad = (1.0 - 2.0 * p[k - 1]) * cum_w[k - 1] * _h_prime(
                _star(chain[k], p[k - 1])
            ) - (1.0 - 2.0 * p[k]) * cum_w[k] * _h_prime(_star(chain[k], p[k]))
            at_lo = chain[k] - chain[k - 1] < 1e-10
            at_hi = chain[k + 1] - chain[k] < 1e-10
            if at_lo and at_hi:
                continue
            if at_lo:
                viol = max(0.0, grad)
            elif at_hi:
                viol = max(0.0, -grad)
            else:
                viol = abs(grad)
            worst = max(worst, viol)
        return worst

    ramp = np.linspace(0.0, 0.5, n + 1)
    near0 = np.concatenate([[0.0], np.linspace(1e-6, 2e-6, n - 1), [0.5]])
    near_half = np.concatenate([[0.0], np.linspace(0.5 - 2e-6, 0.5 - 1e-6, n - 1), [0.5]])

    best_chain, best_val = None, -np.inf
    for start in (ramp, near0, near_half):
        chain = start.copy()
        prev = -np.inf
        for _ in range(500):
            for k in range(1, n):
                lo, hi = chain[k - 1], chain[k + 1]
                if hi - lo < 1e-14:
                    chain[k] = lo
                    continue
                res = minimize_scalar(
                    lambda rk: -local_term(k, rk),
                    bounds=(lo, hi),
                    method="bounded",
                    options={"xatol": 1e-13},
                )
                cand = float(res.x)
                # Bounded search never lands exactly on the endpoints;
                # snap when an endpoint is at least as good.
                for edge in (lo, hi):
                    if local_term(k, edge) >= local_term(k, cand):
                        cand = edge
                chain[k] = cand
            val = discrete_expected_rate(w, p, chain)
            if val - prev < 1e-14:
                break
            prev = val
        val = discrete_expected_rate(w, p, chain)
        if val > best_val:
            best_chain, best_val = chain, val

    if residual(best_chain) >= 1e-8:
        raise AssertionError("optimize_discrete: coordinate ascent failed stationarity")
    return best_chain, best_val


def discretize_density(density, n_states: int) -> tuple[np.ndarray, np.ndarray]:
    """Quantize a continuous crossover density to n_states BSC states.

    Splits the support [0, sup] into equal cells and represents each
    cell by its right edge, weighted by the cell mass f(p_k) dp.  Every
    state in a cell is at least as good as its representative, so any
    layered code designed for the quantized channel is achievable on
    the continuous one: the discrete optimum approaches the continuous
    expected capacity from below, and doubling n_states refines the
    grid in a nested way (values nondecreasing).

    Returns (weights, p_states) for optimize_discrete.
    """
    if n_states < 1:
        raise ValueError("discretize_density: need at least one state")
    top = density.support_sup()
    edges = np.linspace(0.0, top, n_states + 1)
    p = edges[1:]
    w = np.array([density.cdf(edges[i + 1]) - density.cdf(edges[i]) for i in range(n_states)])
    w = np.maximum(w, 0.0)
    s = w.sum()
    if s <= 0.0:
        raise ValueError("discretize_density: density carries no mass on its support")
    return w / s, p


def euler_lhs(x: float) -> float:
    """LHS of the Euler condition: [1/x - 1/(1-x)] / ln((1-x)/x).

    Natural logs: the Euler-Lagrange derivation cancels the log base
    from this ratio, and the removable singularity at x = 1/2 has the
    limit 2 (matching the p_u condition RHS = 2).  Decreasing in x.
    """
    if not 0.0 < x <= 0.5:
        raise ValueError("euler_lhs: x must lie in (0, 1/2]")
    if 0.5 - x < _LHS_LIMIT_BAND:
        return 2.0
    return (1.0 / x - 1.0 / (1.0 - x)) / math.log((1.0 - x) / x)


def euler_rhs(p: float, density) -> float:
    """RHS of the Euler condition: [(1-2p) f(p) - 2 F(p)] / F(p)."""
    big_f = density.cdf(p)
    if big_f <= 0.0:
        raise ValueError("euler_rhs: F(p) must be positive")
    return ((1.0 - 2.0 * p) * density.pdf(p) - 2.0 * big_f) / big_f


def euler_residual(p: float, r: float, density) -> float:
    """LHS(p * r) - RHS(p); a solved profile makes this vanish."""
    return euler_lhs(max(star(p, r), EPS)) - euler_rhs(p, density)


def solve_euler_r(p: float, density) -> float:
    """Pointwise Euler solution r(p) in [0, 1/2].

    The LHS decreases in r, so a sign change of the residual brackets a
    unique root; bisection (Brent) refines it.  No sign change means p
    lies outside the cutoff band; NaN is returned as the out-of-range
    indicator (callers map it to 0 below p_l, 1/2 above p_u).
    """
    rhs = euler_rhs(p, density)
    lo = euler_lhs(max(p, EPS)) - rhs       # r = 0
    hi = 2.0 - rhs                           # r = 1/2 (limit value)
    if lo <= 0.0 or hi >= 0.0:
        return float("nan")
    return brentq(lambda r: euler_lhs(_star(p, r)) - rhs, 0.0, 0.5, xtol=1e-12)


def find_cutoffs(density, scan_points: int = 4096) -> CutoffPair:
    """Cutoff probabilities: r(p_l) = 0 and r(p_u) = 1/2 boundaries.

    p_u solves RHS(p) = 2 (the LHS limit at r = 1/2) and p_l solves
    LHS(p) = RHS(p) (the r = 0 boundary); each root is bracketed by a
    sign scan and polished by bisection to 1e-8.  A point mass
    collapses both cutoffs onto the atom.
    """
    if isinstance(density, PointMassDensity):
        return CutoffPair(density.p0, density.p0)

    p_min = max(float(density.grid[0]), 1e-9)
    p_max = min(density.support_sup(), 0.5)
    # Skip ahead to positive F so the RHS is defined.
    ps = np.linspace(p_min, p_max, scan_points)
    ps = ps[density.cdf(ps) > 0.0]
    if ps.size < 2:
        raise ValueError("find_cutoffs: degenerate density grid")

    def root_on(fn, increasing: bool) -> float:
        vals = np.array([fn(float(p)) for p in ps])
        sign_change = np.nonzero(np.diff(np.sign(vals)) != 0.0)[0]
        if sign_change.size == 0:
            # Boundary never crossed inside the support: the cutoff
            # sits at whichever support edge the sign points to.
            if increasing:
                return float(ps[0] if vals[0] >= 0.0 else ps[-1])
            return float(ps[0] if vals[0] <= 0.0 else ps[-1])
        k = int(sign_change[0])
        return brentq(fn, float(ps[k]), float(ps[k + 1]), xtol=1e-8)

    # RHS decreases through 2 at p_u; the r=0 residual increases through
    # 0 at p_l.
    p_u = root_on(lambda p: euler_rhs(p, density) - 2.0, increasing=False)
    p_l = root_on(lambda p: euler_lhs(max(p, EPS)) - euler_rhs(p, density), increasing=True)
    return CutoffPair(p_l=min(p_l, p_u), p_u=p_u)


def solve_layering(density, num: int = 4097) -> LayerProfile:
    """Solve the Euler equation pointwise on a grid over [p_l, p_u]."""
    cut = find_cutoffs(density)
    grid = np.linspace(cut.p_l, cut.p_u, num)
    r = np.empty(num)
    r[0], r[-1] = 0.0, 0.5
    for i in range(1, num - 1):
        val = solve_euler_r(float(grid[i]), density)
        if math.isnan(val):
            # Roundoff at the band edges: clamp to the nearer boundary.
            val = 0.0 if grid[i] - cut.p_l < cut.p_u - grid[i] else 0.5
        r[i] = val
    r = np.maximum.accumulate(r)
    return LayerProfile(grid=grid, r=r)


def rate_profile(layer: LayerProfile) -> RateProfile:
    """Integrate the incremental layer rates down from the worst state.

    -dR(p) = log2(1/(p * r(p)) - 1) (1 - 2p) r'(p) dp, so
    R(p) = integral from p to the top of the grid; r' by central
    differences, integral by trapezoid.  R vanishes above p_u (r is
    flat at 1/2 there) and plateaus below p_l.
    """
    g, r = layer.grid, layer.r
    x = np.clip(star(g, r), EPS, 1.0 - EPS)
    integrand = np.log2(1.0 / x - 1.0) * (1.0 - 2.0 * g) * np.gradient(r, g)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(g))])
    rates = cum[-1] - cum
    rates = np.maximum(rates, 0.0)
    return RateProfile(grid=g, rates=rates)


def expected_capacity_continuous(density, num: int = 4097) -> float:
    """Expected capacity of the continuous-state BSC composite.

    Solves the layering, then evaluates
    C^e = integral F(p) log2(1/(p * r(p)) - 1) (1 - 2p) r'(p) dp,
    cross-checked against the integration-by-parts form
    F(p_l) R(p_l) + integral f(p) R(p) dp; the two must agree to 1e-6.
    """
    if isinstance(density, PointMassDensity):
        return bsc_capacity(density.p0)
    layer = solve_layering(density, num=num)
    g, r = layer.grid, layer.r
    x = np.clip(star(g, r), EPS, 1.0 - EPS)
    weight = density.cdf(g) * np.log2(1.0 / x - 1.0) * (1.0 - 2.0 * g) * np.gradient(r, g)
    value = float(np.trapezoid(weight, g))

    prof = rate_profile(layer)
    alt = float(density.cdf(g[0]) * prof.rates[0] + np.trapezoid(density.pdf(g) * prof.rates, g))
    if abs(value - alt) > 1e-6:
        raise AssertionError("expected_capacity_continuous: integral forms disagree")
    return value


def parametric_profile(density, family: str, gamma: float, num: int = 4097) -> LayerProfile:
    """Suboptimal one-parameter layering families.

    "optimal-cutoff": r = ((p - p_l)/(p_u - p_l))^gamma / 2 on the
    solved cutoff band.  "full-range": r = (2p)^gamma / 2 on [0, 1/2].
    """
    if gamma <= 0.0:
        raise ValueError("parametric_profile: gamma must be positive")
    if family == "optimal-cutoff":
        cut = find_cutoffs(density)
        grid = np.linspace(cut.p_l, cut.p_u, num)
        span = max(cut.p_u - cut.p_l, EPS)
        r = 0.5 * ((grid - cut.p_l) / span) ** gamma
    elif family == "full-range":
        grid = np.linspace(0.0, 0.5, num)
        r = 0.5 * (2.0 * grid) ** gamma
    else:
        raise ValueError("parametric_profile: family must be 'optimal-cutoff' or 'full-range'")
    return LayerProfile(grid=grid, r=np.clip(r, 0.0, 0.5))


def parametric_expected_rate(density, family: str, gamma: float, num: int = 4097) -> float:
    """Expected rate of a parametric profile: F(lo) R(lo) + integral f R."""
    layer = parametric_profile(density, family, gamma, num=num)
    prof = rate_profile(layer)
    g = layer.grid
    return float(
        density.cdf(g[0]) * prof.rates[0] + np.trapezoid(density.pdf(g) * prof.rates, g)
    )


def bec_bc_region(alpha1: float, alpha2: float, p_aux: float) -> tuple[float, float]:
    """Rate pair of the two-user degraded BEC broadcast channel.

    User 1 (erasure alpha1 < alpha2) gets the private rate
    R1 = (1 - alpha1) h(p); both users get the common rate
    R12 = (1 - alpha2)(1 - h(p)).
    """
    if not 0.0 <= alpha1 < alpha2 <= 1.0:
        raise ValueError("bec_bc_region: need 0 <= alpha1 < alpha2 <= 1")
    if not 0.0 <= p_aux <= 0.5:
        raise ValueError("bec_bc_region: p_aux must lie in [0, 1/2]")
    h = binary_entropy(p_aux)
    return (1.0 - alpha1) * h, (1.0 - alpha2) * (1.0 - h)


def bec_bc_expected_rate(alpha1: float, alpha2: float, w1: float = 0.5) -> float:
    """Best expected rate of BEC broadcast codes: max{1-alpha2, w1 (1-alpha1)}.

    The objective R12 + w1 R1 is linear in h(p_aux), so the maximum over
    the auxiliary parameter sits at an endpoint: all-common (h = 0)
    giving 1 - alpha2, or all-private (h = 1) giving w1 (1 - alpha1).
    With equiprobable states (w1 = 1/2) this reduces to
    max{1 - alpha2, (1 - alpha1)/2}.
    """
    if not 0.0 <= w1 <= 1.0:
        raise ValueError("bec_bc_expected_rate: w1 must lie in [0, 1]")
    r1_full, _ = bec_bc_region(alpha1, alpha2, 0.5)
    _, r12_full = bec_bc_region(alpha1, alpha2, 0.0)
    return max(r12_full, w1 * r1_full)
