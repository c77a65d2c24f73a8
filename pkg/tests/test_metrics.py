import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from mixfourier.metrics import ScoreCard, relative_error, scorecard, wasserstein1
from mixfourier.model import GaussianMixture, MixingDistribution, sample


def w1_linprog(a: MixingDistribution, b: MixingDistribution) -> float:
    """Transport LP: min sum c_ij P_ij with marginals a, b."""
    m, n = a.support.size, b.support.size
    cost = np.abs(np.subtract.outer(a.support, b.support)).ravel()
    A_eq = np.zeros((m + n, m * n))
    for i in range(m):
        A_eq[i, i * n:(i + 1) * n] = 1
    for j in range(n):
        A_eq[m + j, j::n] = 1
    res = linprog(cost, A_eq=A_eq, b_eq=np.concatenate([a.weights, b.weights]),
                  bounds=(0, None), method="highs",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    return res.fun


def test_identical_is_zero():
    a = MixingDistribution([0.0, 1.0], [0.3, 0.7])
    assert wasserstein1(a, a) == 0.0


def test_unit_shift():
    assert wasserstein1(MixingDistribution([0.0], [1.0]), MixingDistribution([1.0], [1.0])) == 1.0


def test_split_mass():
    a = MixingDistribution([0.0, 2.0], [0.5, 0.5])
    assert wasserstein1(a, MixingDistribution([1.0], [1.0])) == pytest.approx(1.0, abs=1e-15)


def test_accepts_mixtures():
    m1 = GaussianMixture([-0.5, 0.5], [0.5, 0.5], 1.0)
    m2 = GaussianMixture([-0.4, 0.6], [0.5, 0.5], 2.0)
    assert wasserstein1(m1, m2) == pytest.approx(0.1)


def measures(max_atoms=5):
    def build(draw):
        k = draw(st.integers(1, max_atoms))
        pts = draw(st.lists(st.floats(-10, 10), min_size=k, max_size=k, unique=True))
        w = np.array(draw(st.lists(st.floats(0.01, 1.0), min_size=k, max_size=k)))
        return MixingDistribution(pts, w / w.sum())
    return st.composite(lambda draw: build(draw))()


@settings(max_examples=100, deadline=None)
@given(measures(), measures())
def test_w1_matches_transport_lp(a, b):
    assert wasserstein1(a, b) == pytest.approx(w1_linprog(a, b), abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(measures(), measures(), measures())
def test_w1_metric_axioms(a, b, c):
    ab = wasserstein1(a, b)
    assert ab >= 0
    assert ab == pytest.approx(wasserstein1(b, a), abs=1e-12)
    assert ab <= wasserstein1(a, c) + wasserstein1(c, b) + 1e-9


def test_score_identities():
    sc = ScoreCard(loglik=-123.4, p=4, n=500)
    assert sc.aic == 2 * 4 + 2 * 123.4
    assert sc.bic == 4 * math.log(500) + 2 * 123.4


def test_bic_minus_aic_at_n_e():
    sc = ScoreCard(loglik=-3.0, p=2, n=math.e)
    assert sc.bic - sc.aic == pytest.approx(-2.0, abs=1e-14)


def test_doubling_loglik():
    a, b = ScoreCard(-10.0, 4, 100), ScoreCard(-20.0, 4, 100)
    assert b.aic - a.aic == pytest.approx(20.0)


def test_scorecard_parameter_count(two_component):
    x = sample(two_component, 300, 1)
    sc = scorecard(two_component, x)
    assert sc.p == 4 and sc.n == 300
    assert sc.aic == 2 * 4 - 2 * sc.loglik


def test_relative_error():
    assert relative_error(1.1, 1.0) == pytest.approx(0.1)
    assert relative_error(2.5, 2.5) == 0
    assert relative_error(0.455, 0.450) == pytest.approx(0.011111111, rel=1e-6)
    with pytest.raises(ZeroDivisionError):
        relative_error(1.0, 0.0)
