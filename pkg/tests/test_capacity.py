import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from chancap import (
    BecState,
    BscState,
    CapacityBounds,
    ContinuousBscComposite,
    DiscreteComposite,
    EmpiricalCdf,
    GilbertElliott,
    best_outage_rate,
    binary_entropy,
    bsc_capacity,
    capacity_from_spectrum,
    capacity_vs_outage,
    expected_capacity_bounds,
    expected_retransmissions,
    mean_state_capacity,
    outage_curve,
    shannon_capacity,
    subchannel_capacity,
)


def _bsc(pairs):
    ps, ws = zip(*pairs)
    return DiscreteComposite(tuple(BscState(p) for p in ps), list(ws))


UNIFORM = ContinuousBscComposite.uniform()
ATOMIC = _bsc([(0.01, 0.9), (0.49, 0.1)])
THREE = _bsc([(0.05, 0.5), (0.2, 0.3), (0.45, 0.2)])


def test_shannon_capacity_worst_state():
    assert shannon_capacity(_bsc([(0.05, 0.5), (0.3, 0.5)])) == bsc_capacity(0.3)
    # support-set invariance: the pmf matters only through its support
    assert shannon_capacity(_bsc([(0.05, 0.9), (0.3, 0.1)])) == bsc_capacity(0.3)
    assert shannon_capacity(_bsc([(0.05, 1.0), (0.3, 0.0)])) == bsc_capacity(0.05)
    bec = DiscreteComposite((BecState(0.2), BecState(0.7)), [0.5, 0.5])
    assert shannon_capacity(bec) == 1.0 - 0.7
    # the uniform crossover family reaches p = 1/2, a zero-capacity state
    assert shannon_capacity(UNIFORM) == 0.0


def test_shannon_capacity_gilbert_elliott():
    frozen = GilbertElliott(0.05, 0.3, g=0.0, b=0.0, pi_good=0.5)
    assert shannon_capacity(frozen) == bsc_capacity(0.3)
    ergodic = GilbertElliott(0.05, 0.3, g=0.2, b=0.1, pi_good=0.5)
    pi_g, pi_b = ergodic.stationary()
    want = pi_g * bsc_capacity(0.05) + pi_b * bsc_capacity(0.3)
    assert shannon_capacity(ergodic) == want


def test_capacity_vs_outage_uniform_closed_form():
    for q in np.linspace(0.0, 0.95, 20):
        assert capacity_vs_outage(UNIFORM, float(q)) == bsc_capacity((1.0 - q) / 2.0)
    assert capacity_vs_outage(UNIFORM, 0.5) == 0.18872187554086717


def test_capacity_vs_outage_atom_convention():
    # an atom joins the outage set only when its whole mass fits under q
    assert capacity_vs_outage(ATOMIC, 0.1) == bsc_capacity(0.01)
    assert capacity_vs_outage(ATOMIC, 0.0999) == bsc_capacity(0.49)
    assert capacity_vs_outage(ATOMIC, 0.2) == bsc_capacity(0.01)


def test_capacity_vs_outage_three_state():
    assert capacity_vs_outage(THREE, 0.19) == bsc_capacity(0.45)
    assert capacity_vs_outage(THREE, 0.2) == bsc_capacity(0.2)
    assert capacity_vs_outage(THREE, 0.49) == bsc_capacity(0.2)
    assert capacity_vs_outage(THREE, 0.5) == bsc_capacity(0.05)


def test_capacity_vs_outage_domain():
    with pytest.raises(ValueError):
        capacity_vs_outage(UNIFORM, 1.0)
    with pytest.raises(ValueError):
        capacity_vs_outage(UNIFORM, -0.1)


def test_capacity_vs_outage_ergodic_ge_is_flat():
    ergodic = GilbertElliott(0.05, 0.3, g=0.2, b=0.1, pi_good=0.5)
    c = shannon_capacity(ergodic)
    for q in (0.0, 0.3, 0.9):
        assert capacity_vs_outage(ergodic, q) == c


def test_subchannel_capacity_identity():
    for q in (0.0, 0.1, 0.25, 0.6):
        assert subchannel_capacity(THREE, q) == capacity_vs_outage(THREE, q)
        assert subchannel_capacity(UNIFORM, q) == capacity_vs_outage(UNIFORM, q)


def test_outage_curve():
    grid = np.linspace(0.0, 0.9, 10)
    curve = outage_curve(UNIFORM, grid)
    assert np.array_equal(curve.q, grid)
    assert np.all(np.diff(curve.c_q) >= 0.0)
    assert curve.c_q[0] == shannon_capacity(UNIFORM)
    assert np.array_equal(curve.outage_capacity, (1.0 - grid) * curve.c_q)
    with pytest.raises(ValueError):
        outage_curve(UNIFORM, [])
    with pytest.raises(ValueError):
        outage_curve(UNIFORM, [0.5, 1.0])


def test_best_outage_rate_discrete():
    q_star, value = best_outage_rate(ATOMIC)
    assert q_star == 0.1
    assert value == 0.82728617769368
    assert value == pytest.approx(0.9 * bsc_capacity(0.01), abs=1e-15)
    # single state: never worth declaring an outage
    q_star, value = best_outage_rate(_bsc([(0.2, 1.0)]))
    assert (q_star, value) == (0.0, bsc_capacity(0.2))


def test_best_outage_rate_uniform():
    q_star, value = best_outage_rate(UNIFORM)
    assert q_star == pytest.approx(0.6909078264720224, abs=1e-5)
    assert value == pytest.approx(0.11711474003319604, abs=1e-9)
    # stationarity of (1-q)(1 - h((1-q)/2)) at the optimum
    eps = 1e-4
    f = lambda q: (1.0 - q) * capacity_vs_outage(UNIFORM, q)
    assert f(q_star) >= f(q_star - eps) - 1e-12
    assert f(q_star) >= f(q_star + eps) - 1e-12


def test_best_outage_rate_ergodic_ge():
    ergodic = GilbertElliott(0.05, 0.3, g=0.2, b=0.1, pi_good=0.5)
    assert best_outage_rate(ergodic) == (0.0, shannon_capacity(ergodic))


def test_expected_retransmissions():
    assert expected_retransmissions(0.0) == 1.0
    assert expected_retransmissions(0.5) == 2.0
    assert expected_retransmissions(0.9) == pytest.approx(10.0, abs=1e-12)
    with pytest.raises(ValueError):
        expected_retransmissions(1.0)


def test_capacity_from_spectrum():
    cdf = EmpiricalCdf(
        values=np.array([0.1, 0.2, 0.3, 0.4]),
        state_ids=np.zeros(4, dtype=int),
        blocklength=8,
        trials=4,
    )
    assert capacity_from_spectrum(cdf, 0.5) == 0.3
    assert capacity_from_spectrum(cdf, 0.0) == 0.1


def test_mean_state_capacity():
    # uniform density: 2 * integral of 1 - h(p) over [0, 1/2]
    assert mean_state_capacity(UNIFORM) == pytest.approx(0.27865264154626224, abs=1e-12)
    target, _ = quad(lambda p: 2.0 * (1.0 - binary_entropy(p)), 0.0, 0.5)
    assert mean_state_capacity(UNIFORM) == pytest.approx(target, abs=1e-6)
    two = _bsc([(0.05, 0.7), (0.3, 0.3)])
    assert mean_state_capacity(two) == 0.7 * bsc_capacity(0.05) + 0.3 * bsc_capacity(0.3)
    bec = DiscreteComposite((BecState(0.2), BecState(0.6)), [0.5, 0.5])
    assert mean_state_capacity(bec) == 0.5 * 0.8 + 0.5 * 0.4
    ge = GilbertElliott(0.05, 0.3, g=0.0, b=0.0, pi_good=0.7)
    assert mean_state_capacity(ge) == 0.7 * bsc_capacity(0.05) + 0.3 * bsc_capacity(0.3)


def test_expected_capacity_bounds():
    for comp in (UNIFORM, ATOMIC, THREE, GilbertElliott(0.05, 0.3, g=0.0, b=0.0, pi_good=0.5)):
        bounds = expected_capacity_bounds(comp)
        assert bounds.lower <= bounds.upper
    with pytest.raises(ValueError):
        CapacityBounds(lower=0.5, upper=0.4)


@st.composite
def discrete_bsc(draw):
    k = draw(st.integers(min_value=1, max_value=5))
    params = draw(
        st.lists(
            st.floats(min_value=0.0, max_value=0.5, allow_nan=False),
            min_size=k,
            max_size=k,
            unique=True,
        )
    )
    weights = draw(st.lists(st.integers(min_value=1, max_value=9), min_size=k, max_size=k))
    total = sum(weights)
    return _bsc([(p, w / total) for p, w in zip(params, weights)])


@settings(max_examples=60, deadline=None)
@given(comp=discrete_bsc(), q1=st.floats(0.0, 0.98), q2=st.floats(0.0, 0.98))
def test_capacity_vs_outage_monotone(comp, q1, q2):
    lo, hi = sorted((q1, q2))
    assert capacity_vs_outage(comp, lo) <= capacity_vs_outage(comp, hi) + 1e-15
    assert capacity_vs_outage(comp, 0.0) == shannon_capacity(comp)


@settings(max_examples=60, deadline=None)
@given(comp=discrete_bsc())
def test_best_outage_dominates_grid(comp):
    _, value = best_outage_rate(comp)
    for q in np.linspace(0.0, 0.95, 24):
        assert value >= (1.0 - q) * capacity_vs_outage(comp, float(q)) - 1e-12
