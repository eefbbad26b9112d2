"""Small-blocklength random-coding simulation with outage decoding.

Encoding draws codebooks i.i.d. uniform; a fresh codebook is drawn for
every trial, so measured rates are averages over the random-coding
ensemble (a single fixed codebook at n = 8 is dominated by codebook
luck, which says nothing about the ensemble trend the theory predicts).

Decoding is the typical-set rule with threshold I_q - epsilon: compute
the normalized information density of the received block against every
codeword; declare an outage when no codeword passes, decode on a unique
passer, declare an error on multiple passers or a wrong unique passer.

An exhaustive maximum-likelihood oracle can run alongside: whenever the
typical-set decoder is correct, the true codeword is the unique passer
and hence the strict Hamming minimizer, so per trial
1{ML error} <= 1{TS outage or TS error}.

Trials are sharded with seeds spawned from the master seed and merged
by summing counts; blocklengths in a sweep share each shard's state and
noise streams (common random numbers), pairing the per-n comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .capacity import capacity_vs_outage
from .channels import (
    ContinuousBscComposite,
    DiscreteComposite,
    GilbertElliott,
    sample_state_indices,
)

# Codebook size guard: floor(2^{nR}) entries of n bits.
_MAX_NR = 20.0


@dataclass(frozen=True)
class SimResult:
    """Aggregated Monte Carlo outcome; deterministic for a fixed seed."""

    trials: int
    blocklength: int
    rate: float
    outage_rate: float
    error_rate_given_no_outage: float
    expected_rate: float
    seed: int
    per_state_rates: dict | None = None
    ml_error_rate: float | None = None
    ml_dominance_violations: int | None = None

    def __post_init__(self):
        for name in ("outage_rate", "error_rate_given_no_outage"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"SimResult: {name} must lie in [0, 1]")
        # The delivered rate is the nominal rate thinned by outages, so
        # it lives in [0, rate] (rates above 1 are legal inputs; they
        # just guarantee decoding errors on a binary channel).
        if not 0.0 <= self.expected_rate <= self.rate + 1e-12:
            raise ValueError("SimResult: expected_rate must lie in [0, rate]")


def ml_decode(codebook: np.ndarray, y: np.ndarray, state) -> int:
    """Exhaustive maximum-likelihood index; ties break to the smallest.

    BSC: log-likelihood is d log(p) + (n-d) log(1-p), monotone in the
    Hamming distance d for p < 1/2.  BEC: a codeword is consistent when
    it matches y on every unerased position; consistent codewords are
    equally likely.
    """
    from .channels import ERASURE, BecState, BscState

    book = np.asarray(codebook)
    yv = np.asarray(y)
    if book.ndim != 2 or yv.shape != (book.shape[1],):
        raise ValueError("ml_decode: codebook must be (M, n) and y length n")
    if isinstance(state, BscState):
        p = min(max(state.crossover, 1e-12), 1.0 - 1e-12)
        dist = (book != yv).sum(axis=1)
        loglik = dist * math.log(p) + (book.shape[1] - dist) * math.log(1.0 - p)
        return int(np.argmax(loglik))
    if isinstance(state, BecState):
        known = yv != ERASURE
        consistent = np.all(book[:, known] == yv[known], axis=1)
        hits = np.nonzero(consistent)[0]
        if hits.size == 0:
            raise ValueError("ml_decode: no codeword consistent with the erased block")
        return int(hits[0])
    raise ValueError("ml_decode: unsupported state type")


def _draw_crossovers(composite, rng, size: int) -> np.ndarray:
    if isinstance(composite, GilbertElliott):
        if composite.is_ergodic:
            raise ValueError("simulate: ergodic Gilbert-Elliott has no frozen state to draw")
        composite = composite.as_composite()
    if isinstance(composite, DiscreteComposite):
        if composite.family != "bsc":
            raise ValueError("simulate: outage-code simulation covers BSC families")
        idx = sample_state_indices(composite, rng, size)
        return composite.params[idx]
    if isinstance(composite, ContinuousBscComposite):
        return composite.sample(rng, size)
    raise ValueError("simulate: unsupported composite type")


def _shard_sizes(trials: int, shards: int) -> list[int]:
    base, extra = divmod(trials, shards)
    return [base + (1 if i < extra else 0) for i in range(shards)]


def simulate_outage_code_sweep(
    composite,
    ns,
    rate: float,
    q: float,
    trials: int,
    epsilon: float = 0.01,
    seed: int = 0,
    shards: int = 8,
    ml_oracle: bool = False,
) -> list[SimResult]:
    """Run the typical-set decoder at several blocklengths, paired.

    Within a shard, every blocklength sees the same drawn states and the
    same noise uniforms (truncated to its own n), so cross-n error
    comparisons are common-random-number paired.
    """
    ns = [int(n) for n in ns]
    if len(ns) == 0 or any(n < 1 for n in ns):
        raise ValueError("simulate: blocklengths must be positive")
    if trials < 1:
        raise ValueError("simulate: trials must be >= 1")
    if rate <= 0.0:
        raise ValueError("simulate: rate must be positive")
    if epsilon <= 0.0:
        raise ValueError("simulate: epsilon must be positive")
    for n in ns:
        if n * rate > _MAX_NR:
            raise ValueError(f"simulate: nR = {n * rate:.1f} exceeds the codebook budget ({_MAX_NR})")

    threshold = capacity_vs_outage(composite, q) - epsilon
    n_max = max(ns)
    shards = max(1, min(shards, trials))
    shard_seqs = np.random.SeedSequence(seed).spawn(shards)
    sizes = _shard_sizes(trials, shards)

    counts = {n: {"outage": 0, "error": 0, "ml_error": 0, "violations": 0} for n in ns}
    for size, seq in zip(sizes, shard_seqs):
        if size == 0:
            continue
        state_seq, *book_seqs = seq.spawn(1 + len(ns))
        trial_rng = np.random.default_rng(state_seq)
        ps = _draw_crossovers(composite, trial_rng, size)
        noise_u = trial_rng.random((size, n_max))
        pc = np.clip(ps, 1e-300, 1.0 - 1e-16)
        log_p = np.log2(pc)[:, None]
        log_1p = np.log2(1.0 - pc)[:, None]

        for n, book_seq in zip(ns, book_seqs):
            book_rng = np.random.default_rng(book_seq)
            m = int(math.floor(2.0 ** (n * rate)))
            books = book_rng.integers(0, 2, size=(size, m, n), dtype=np.int8)
            sent = book_rng.integers(0, m, size=size)
            noise = (noise_u[:, :n] < ps[:, None]).astype(np.int8)
            y = books[np.arange(size), sent] ^ noise
            dist = (books ^ y[:, None, :]).sum(axis=2)
            dens = 1.0 + (dist / n) * log_p + (1.0 - dist / n) * log_1p
            passed = dens >= threshold
            num_passed = passed.sum(axis=1)
            first = np.argmax(passed, axis=1)
            outage = num_passed == 0
            error = (~outage) & ((num_passed > 1) | (first != sent))
            counts[n]["outage"] += int(outage.sum())
            counts[n]["error"] += int(error.sum())
            if ml_oracle:
                loglik = dist * np.log(pc)[:, None] + (n - dist) * np.log(1.0 - pc)[:, None]
                ml_pick = np.argmax(loglik, axis=1)
                ml_err = ml_pick != sent
                counts[n]["ml_error"] += int(ml_err.sum())
                counts[n]["violations"] += int((ml_err & ~(outage | error)).sum())

    results = []
    for n in ns:
        c = counts[n]
        decoded = trials - c["outage"]
        err_rate = c["error"] / decoded if decoded > 0 else 0.0
        out_rate = c["outage"] / trials
        results.append(
            SimResult(
                trials=trials,
                blocklength=n,
                rate=rate,
                outage_rate=out_rate,
                error_rate_given_no_outage=err_rate,
                # An outage code delivers its nominal rate exactly when
                # no outage is declared.
                expected_rate=rate * (1.0 - out_rate),
                seed=seed,
                ml_error_rate=(c["ml_error"] / trials) if ml_oracle else None,
                ml_dominance_violations=c["violations"] if ml_oracle else None,
            )
        )
    return results


def simulate_outage_code(
    composite,
    n: int,
    rate: float,
    q: float,
    trials: int,
    epsilon: float = 0.01,
    seed: int = 0,
    shards: int = 8,
    ml_oracle: bool = False,
) -> SimResult:
    """Single-blocklength wrapper around the sweep."""
    return simulate_outage_code_sweep(
        composite, [n], rate, q, trials, epsilon=epsilon, seed=seed, shards=shards,
        ml_oracle=ml_oracle,
    )[0]


def simulate_uncoded_bec(composite: DiscreteComposite, n: int, trials: int, seed: int = 0,
                         shards: int = 8) -> SimResult:
    """Transmit information bits uncoded over a composite BEC.

    The receiver keeps the unerased positions, so a state-alpha trial
    delivers (n - erasures)/n information bits per use, approaching
    1 - alpha; the achieved expected rate estimates 1 - E[alpha].
    No outages and no errors occur: erasure locations are known.
    """
    if not (isinstance(composite, DiscreteComposite) and composite.family == "bec"):
        raise ValueError("simulate_uncoded_bec: needs a discrete BEC composite")
    if n < 1 or trials < 1:
        raise ValueError("simulate_uncoded_bec: n and trials must be >= 1")

    shards = max(1, min(shards, trials))
    seqs = np.random.SeedSequence(seed).spawn(shards)
    alphas = composite.params
    rate_sum = 0.0
    state_sums = np.zeros(len(alphas))
    state_counts = np.zeros(len(alphas), dtype=int)
    for size, seq in zip(_shard_sizes(trials, shards), seqs):
        if size == 0:
            continue
        rng = np.random.default_rng(seq)
        idx = sample_state_indices(composite, rng, size)
        erased = rng.binomial(n, alphas[idx])
        rates = (n - erased.astype(float)) / n
        rate_sum += float(rates.sum())
        np.add.at(state_sums, idx, rates)
        np.add.at(state_counts, idx, 1)

    per_state = {
        int(i): float(state_sums[i] / state_counts[i])
        for i in range(len(alphas))
        if state_counts[i] > 0
    }
    return SimResult(
        trials=trials,
        blocklength=n,
        rate=1.0,  # raw information bits in, one per use
        outage_rate=0.0,
        error_rate_given_no_outage=0.0,
        expected_rate=rate_sum / trials,
        seed=seed,
        per_state_rates=per_state,
    )
