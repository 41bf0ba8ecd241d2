"""Excess and competitor-gap tests.

Hand-computed oracles used below, all for the cone over a circle of
radius 1 carrying a single profile mode i with amplitude c at a = i/Q:

* excess against the horizontal plane: (pi Q / 4) c^2 (1 + a^2)
  plus O(c^4),
* competitor-to-cone gap ratio: 2a / (1 + a^2) plus O(c^2),
* a pure mode-Q profile is a tilt to second order, so the optimal
  plane absorbs the excess down to the c^4 scale.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tclab.currents import WindingCurve
from tclab.epiperimetric import (_one_sided_probe, cylindrical_excess,
                                 epiperimetric_gap, mode_ratio,
                                 optimal_plane, regraph_over_plane)
from tclab.errors import NotGraph, SupportEscapesCylinder
from tclab.fourier import FourierSeries
from tclab.geom import plane_from_spanning, standard_plane
from tclab.scenarios import random_epi_curve, single_mode_curve


@pytest.mark.parametrize("Q,i,c", [(1, 2, 1e-2), (2, 3, 5e-3),
                                   (3, 4, 1e-2), (1, 3, 2e-2)])
def test_raw_excess_matches_quadratic_model(Q, i, c):
    curve = single_mode_curve(Q, i, c)
    raw = cylindrical_excess(curve, standard_plane(2 + curve.n))
    a = i / Q
    pred = 0.25 * np.pi * Q * c * c * (1.0 + a * a)
    assert abs(raw - pred) <= 1e-3 * pred


def test_optimal_plane_absorbs_pure_mode_q():
    for Q in (1, 2):
        rep = optimal_plane(single_mode_curve(Q, Q, 1e-2))
        assert rep.raw_excess > 1e-5
        assert rep.excess < 1e-12


def test_optimal_plane_cannot_improve_other_modes():
    rep = optimal_plane(single_mode_curve(2, 5, 8e-3))
    assert rep.excess == pytest.approx(rep.raw_excess, rel=1e-12)


@pytest.mark.parametrize("Q,i", [(1, 2), (2, 3), (3, 4)])
def test_gap_ratio_matches_linearization(Q, i):
    verdict = epiperimetric_gap(single_mode_curve(Q, i, 1e-2))
    assert abs(verdict.ratio - mode_ratio(i / Q)) < 1e-4
    assert verdict.passed
    assert verdict.epsilon13 == pytest.approx(1.0 - verdict.ratio)


def test_mixture_certifies_at_conical_minimum():
    # the mass norm's Pfaffian term kinks the tilt objective, so the
    # minimizer is a conical vertex; the tilt still absorbs the mode-Q
    # component exactly and the certified excess is the quadratic model
    # of the two leftover modes
    alpha = np.zeros((4, 2))
    beta = np.zeros((3, 2))
    alpha[2, 0] = 0.02
    alpha[3, 1] = 0.015
    beta[0, 1] = 0.01
    curve = WindingCurve.from_fourier(FourierSeries(Q=2, n=2, alpha=alpha,
                                                    beta=beta))
    rep = optimal_plane(curve)
    pred = 0.25 * np.pi * 2 * (0.015 ** 2 * (1 + 1.5 ** 2)
                               + 0.01 ** 2 * (1 + 0.5 ** 2))
    assert rep.excess == pytest.approx(pred, rel=1e-2)
    assert rep.excess < 0.4 * rep.raw_excess


def test_one_sided_probe_reads_descent_through_even_kink():
    # an even downward kink cancels out of central differences; the
    # probe must report the one-sided descent that gradient methods miss
    def f(v):
        return -abs(v[0]) + v[0] ** 2 + v[1] ** 2

    worst = _one_sided_probe(f, np.zeros(2), 0.0)
    assert worst == pytest.approx(-1.0, abs=1e-4)


def test_huge_profile_escapes_cylinder():
    with pytest.raises(SupportEscapesCylinder):
        cylindrical_excess(single_mode_curve(1, 2, 3.0), standard_plane(3))


def test_regraph_identity_roundtrip():
    curve = single_mode_curve(1, 2, 5e-3)
    back = regraph_over_plane(curve, standard_plane(3), curve.rho)
    theta = np.linspace(0.0, curve.period, 50)
    assert np.allclose(back.points(theta), curve.points(theta), atol=1e-12)


def test_regraph_smaller_cylinder_stays_on_cone():
    curve = single_mode_curve(2, 3, 0.05)
    back = regraph_over_plane(curve, standard_plane(3), 0.5)
    assert back.Q == curve.Q and back.rho == 0.5
    pts = back.points(np.linspace(0.0, back.period, 64))
    radii = np.linalg.norm(pts[:, :2], axis=1)
    assert np.allclose(radii, 0.5, atol=1e-12)


def test_regraph_rejects_orthogonal_plane():
    curve = single_mode_curve(2, 3, 0.05)
    e = np.eye(3)
    with pytest.raises(NotGraph):
        regraph_over_plane(curve, plane_from_spanning(e[0], e[2]), 1.0)


@given(st.integers(0, 10_000))
@settings(max_examples=10, deadline=None)
def test_random_curves_beat_the_cone(seed):
    curve = random_epi_curve(np.random.default_rng(seed))
    verdict = epiperimetric_gap(curve)
    assert verdict.passed
    assert 0.0 <= verdict.ratio <= 0.95
