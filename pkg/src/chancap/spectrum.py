"""Information spectrum estimation.

The normalized information density of a block, (1/n) i(X^n; Y^n | S),
has closed forms for the symmetric families under uniform input:
a function of the Hamming distance for the BSC and of the erasure
count for the BEC.  Sampling those sufficient statistics directly
avoids accumulating n log-ratios (no cancellation, and n = 10^4 is
cheap).  The empirical cdf of the samples is the estimated
information spectrum F(alpha).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import (
    ContinuousBscComposite,
    DiscreteComposite,
    GilbertElliott,
    sample_state_indices,
)


@dataclass(frozen=True)
class SpectrumSample:
    """One realization of the normalized information density."""

    value: float
    state_id: int


@dataclass(frozen=True)
class Quantile:
    """A quantile of an empirical cdf.

    `at_atom` marks that the returned value carries more than one
    sample (an atom of the empirical measure), in which case the
    supremum in the outage definition sits just below the atom and a
    conservative caller may prefer the preceding value.
    """

    value: float
    at_atom: bool


def info_density_bsc(d, n: int, p: float):
    """Normalized information density of a BSC block at Hamming distance d.

    Under uniform input, (1/n) i = 1 + (d/n) log2 p + (1 - d/n) log2(1-p).
    At p = 0 (or 1) only the deterministic distance is possible; any
    other d signals an impossible event and is rejected loudly.
    """
    d_arr = np.asarray(d)
    if n < 1:
        raise ValueError("info_density_bsc: n must be >= 1")
    if np.any(d_arr < 0) or np.any(d_arr > n):
        raise ValueError("info_density_bsc: need 0 <= d <= n")
    if not 0.0 <= p <= 1.0:
        raise ValueError("info_density_bsc: p must lie in [0, 1]")
    if p == 0.0 or p == 1.0:
        forced = 0 if p == 0.0 else n
        if np.any(d_arr != forced):
            raise AssertionError("info_density_bsc: impossible distance for a deterministic channel")
        out = np.ones_like(np.asarray(d_arr, dtype=float))
        return float(out) if np.isscalar(d) else out
    frac = np.asarray(d_arr, dtype=float) / n
    out = 1.0 + frac * np.log2(p) + (1.0 - frac) * np.log2(1.0 - p)
    return float(out) if np.isscalar(d) else out


def info_density_bec(e, n: int, alpha: float):
    """Normalized information density of a BEC block with e erasures: (n-e)/n."""
    e_arr = np.asarray(e)
    if n < 1:
        raise ValueError("info_density_bec: n must be >= 1")
    if np.any(e_arr < 0) or np.any(e_arr > n):
        raise ValueError("info_density_bec: need 0 <= e <= n")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("info_density_bec: alpha must lie in [0, 1]")
    out = (n - np.asarray(e_arr, dtype=float)) / n
    return float(out) if np.isscalar(e) else out


@dataclass(frozen=True)
class EmpiricalCdf:
    """Sorted Monte Carlo samples of the normalized information density."""

    values: np.ndarray
    state_ids: np.ndarray
    blocklength: int
    trials: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        s = np.asarray(self.state_ids)
        if v.ndim != 1 or v.size == 0 or s.shape != v.shape:
            raise ValueError("EmpiricalCdf: values/state_ids must be matching nonempty 1-D arrays")
        if not np.all(np.isfinite(v)):
            raise ValueError("EmpiricalCdf: values must be finite")
        if np.any(np.diff(v) < 0.0):
            raise ValueError("EmpiricalCdf: values must be sorted")
        if self.trials != v.size:
            raise ValueError("EmpiricalCdf: trials must equal the sample count")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "state_ids", s)

    def evaluate(self, alpha):
        """F_hat(alpha) = fraction of samples <= alpha (right-continuous)."""
        idx = np.searchsorted(self.values, alpha, side="right")
        out = np.asarray(idx, dtype=float) / self.trials
        return float(out) if np.isscalar(alpha) else out


def cdf_quantile(cdf: EmpiricalCdf, q: float) -> Quantile:
    """Largest alpha with F_hat(alpha) <= q, i.e. sup of the outage set.

    For a step function the supremum is the (floor(q m) + 1)-th order
    statistic: every alpha below it has F_hat <= q, and F_hat jumps
    above q at it.  q = 0 returns the sample minimum (the support
    infimum at this resolution).
    """
    if not 0.0 <= q < 1.0:
        raise ValueError("cdf_quantile: q must lie in [0, 1)")
    m = cdf.trials
    k = min(int(np.floor(q * m)), m - 1)
    value = float(cdf.values[k])
    multiplicity = np.searchsorted(cdf.values, value, side="right") - np.searchsorted(
        cdf.values, value, side="left"
    )
    return Quantile(value=value, at_atom=bool(multiplicity > 1))


def _shard_sizes(trials: int, shards: int) -> list[int]:
    base, extra = divmod(trials, shards)
    return [base + (1 if i < extra else 0) for i in range(shards)]


def estimate_spectrum(composite, n: int, trials: int, seed, shards: int = 16) -> EmpiricalCdf:
    """Monte Carlo estimate of the information spectrum at blocklength n.

    Each trial draws a state, then the closed-form sufficient statistic
    (Hamming distance or erasure count) as a Binomial(n, .) variable,
    and maps it through the per-block density.  Trials are split into
    `shards` logical shards with seeds spawned from the master seed by
    counter; shard outputs are concatenated in shard order and stably
    sorted, so the result is independent of how shards are executed.
    """
    if n < 1:
        raise ValueError("estimate_spectrum: n must be >= 1")
    if trials < 1:
        raise ValueError("estimate_spectrum: trials must be >= 1")
    if isinstance(composite, GilbertElliott):
        if composite.is_ergodic:
            raise ValueError("estimate_spectrum: ergodic Gilbert-Elliott has no frozen-state spectrum")
        composite = composite.as_composite()

    shards = max(1, min(shards, trials))
    seqs = np.random.SeedSequence(seed).spawn(shards)
    vals = []
    ids = []
    for size, seq in zip(_shard_sizes(trials, shards), seqs):
        if size == 0:
            continue
        rng = np.random.default_rng(seq)
        if isinstance(composite, DiscreteComposite):
            idx = sample_state_indices(composite, rng, size)
            params = composite.params[idx]
        elif isinstance(composite, ContinuousBscComposite):
            params = composite.sample(rng, size)
            idx = np.full(size, -1)
        else:
            raise ValueError("estimate_spectrum: unsupported composite type")

        if isinstance(composite, DiscreteComposite) and composite.family == "bec":
            counts = rng.binomial(n, params)
            v = (n - counts.astype(float)) / n
        else:
            counts = rng.binomial(n, params)
            frac = counts.astype(float) / n
            # p in {0, 1} states are handled exactly below; clamp only
            # protects the vectorized log evaluation.
            pc = np.clip(params, 1e-300, 1.0 - 1e-16)
            v = 1.0 + frac * np.log2(pc) + (1.0 - frac) * np.log2(1.0 - pc)
            exact_zero = params == 0.0
            exact_one = params == 1.0
            if np.any(exact_zero):
                if np.any(counts[exact_zero] != 0):
                    raise AssertionError("estimate_spectrum: impossible flip for p = 0 state")
                v[exact_zero] = 1.0
            if np.any(exact_one):
                if np.any(counts[exact_one] != n):
                    raise AssertionError("estimate_spectrum: impossible non-flip for p = 1 state")
                v[exact_one] = 1.0
        vals.append(v)
        ids.append(idx)

    values = np.concatenate(vals)
    state_ids = np.concatenate(ids)
    order = np.argsort(values, kind="stable")
    return EmpiricalCdf(
        values=values[order],
        state_ids=state_ids[order],
        blocklength=n,
        trials=trials,
    )
