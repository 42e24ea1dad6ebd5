import math

import numpy as np
import pytest

from conftest import make_map
from duopoly.services.dynamics1d_service import (
    chaotic_intervals,
    classify_regime,
    critical_orbit,
    find_two_cycles,
    fixed_points,
    homoclinic_value,
    interval_image,
    iterate_f,
    lyapunov,
)
from duopoly.services.dynamics2d_service import attractor_catalog
from duopoly.services.model_service import build_best_reply, eval_best_reply, new_uncertainty_set
from duopoly.utils.errors import InvalidParameters, NotChaoticRegime, ZeroSlopeEncountered


def test_fixed_point_regime_i(fig1a_map):
    report = fixed_points(fig1a_map)
    assert report.kind == "unique-left"
    assert report.point == pytest.approx(1 / 1.2, abs=1e-12)
    assert report.eigenvalue == 0.0
    assert report.stability == "attracting"


def test_fixed_point_fig6(fig6_map):
    report = fixed_points(fig6_map)
    assert report.kind == "unique-right"
    assert report.point == pytest.approx(1 / 0.45, abs=1e-12)
    assert report.eigenvalue == pytest.approx(-1.25)
    assert report.stability == "repelling"


def test_fixed_point_segment_at_r_one():
    m = make_map("fig1b")
    report = fixed_points(m)
    assert report.kind == "segment"
    assert report.segment == (m.x_l, m.x_u)
    assert report.stability == "marginal"


def test_fixed_point_segment_excludes_x_m_when_b_lo_is_zero():
    m = build_best_reply(new_uncertainty_set(0.5, 0.0, 0.5, 0.0))
    report = fixed_points(m)
    assert report.kind == "segment"
    assert report.right_open
    lo, hi = report.segment
    assert hi == m.x_m
    assert eval_best_reply(m, hi) == 0.0
    inner = np.nextafter(hi, 0.0)
    assert eval_best_reply(m, inner) == pytest.approx(inner, abs=1e-12)
    assert not fixed_points(make_map("fig1b")).right_open


@pytest.mark.parametrize("name", ["fig1a", "fig1c", "fig3", "fig5", "fig6", "fig7"])
def test_fixed_point_solves_f_of_x_equals_x(name):
    m = make_map(name)
    x = fixed_points(m).point
    assert eval_best_reply(m, x) == pytest.approx(x, abs=1e-12)
    # no other root of f(x) - x on a fine grid
    xs = np.linspace(0.0, 1.1 * m.x_m, 10_001)
    g = np.array([eval_best_reply(m, float(v)) for v in xs]) - xs
    crossings = xs[:-1][np.sign(g[:-1]) != np.sign(g[1:])]
    assert np.all(np.abs(crossings - x) < 1e-3)


@pytest.mark.parametrize("name, case", [
    ("fig1a", "I"), ("fig1b", "II"), ("fig1c", "IIIa"),
    ("fig1d", "IIIb"), ("fig1e", "IIIc"), ("fig1f", "IIId"),
])
def test_classify_regime_reproduces_fig1(name, case):
    assert classify_regime(make_map(name)).case == case


def test_classify_regime_fig5_is_single_interval(fig5_map):
    regime = classify_regime(fig5_map)
    assert (regime.case, regime.k, regime.absorbing_ok) == ("IIId", 0, True)
    assert homoclinic_value(fig5_map) < fig5_map.x_star_right


def test_classify_regime_fig6_two_pieces(fig6_map):
    regime = classify_regime(fig6_map)
    assert (regime.case, regime.k) == ("IIIc", 1)
    assert homoclinic_value(fig6_map) == pytest.approx(2.34375, abs=1e-10)
    assert regime.pieces == 2


def test_classify_regime_without_detection_leaves_k_open(fig6_map):
    regime = classify_regime(fig6_map, detect_k=False)
    assert regime.case == "IIIc"
    assert regime.k is None


def test_two_cycle_fig6(fig6_map):
    cycles = find_two_cycles(fig6_map)
    assert len(cycles) == 1
    c = cycles[0]
    x1 = 1 / (2 * 0.1 + 0.25 * 1.25)
    assert c.points == pytest.approx([x1, 1.25 * x1], abs=1e-10)
    assert c.points == pytest.approx([1.951219512, 2.439024390], abs=1e-8)
    assert c.eigenvalue == pytest.approx(-1.5625, abs=1e-10)
    assert c.stability == "repelling"
    for x in c.points:
        assert eval_best_reply(fig6_map, eval_best_reply(fig6_map, x)) == pytest.approx(x, abs=1e-12)


def test_no_two_cycles_in_regime_i(fig1a_map):
    assert find_two_cycles(fig1a_map) == []


def test_two_cycle_continuum_in_regime_iiib(fig1d_map):
    cycles = find_two_cycles(fig1d_map)
    assert len(cycles) == 1
    c = cycles[0]
    assert c.continuum
    assert c.eigenvalue == 1.0
    assert c.stability == "marginal"
    assert c.points == [fig1d_map.x_u, eval_best_reply(fig1d_map, fig1d_map.x_u)]


def test_regime_iiib_second_iterate_is_identity(fig1d_map):
    m = fig1d_map
    for x in np.linspace(m.x_u, eval_best_reply(m, m.x_u), 100):
        assert eval_best_reply(m, eval_best_reply(m, float(x))) == pytest.approx(x, abs=1e-12)


def test_critical_orbit_fig6(fig6_map):
    assert critical_orbit(fig6_map, 4) == pytest.approx([2.5, 1.875, 2.34375, 2.0703125], abs=1e-10)


def test_critical_orbit_fig5(fig5_map):
    # x_u = 23/12.9 and r = 30/23 in closed form
    assert critical_orbit(fig5_map, 2) == pytest.approx([30 / 12.9, 19.5 / 12.9], abs=1e-10)


def test_critical_orbit_regime_i(fig1a_map):
    assert critical_orbit(fig1a_map, 1) == pytest.approx([fig1a_map.r * fig1a_map.x_u])


def test_critical_orbit_needs_depth(fig6_map):
    with pytest.raises(InvalidParameters):
        critical_orbit(fig6_map, 0)


def test_chaotic_intervals_fig5(fig5_map):
    bands = chaotic_intervals(fig5_map)
    assert bands.k == 0
    lo, hi = bands.intervals[0]
    assert (lo, hi) == pytest.approx((19.5 / 12.9, 30 / 12.9), abs=1e-10)


def test_chaotic_intervals_fig6(fig6_map):
    bands = chaotic_intervals(fig6_map)
    assert bands.k == 1
    (a_lo, a_hi), (b_lo, b_hi) = bands.intervals
    assert (a_lo, a_hi) == pytest.approx((2.34375, 2.5), abs=1e-10)
    assert (b_lo, b_hi) == pytest.approx((1.875, 2.0703125), abs=1e-10)

    img_lo, img_hi = interval_image(fig6_map, a_lo, a_hi)
    assert (img_lo, img_hi) == pytest.approx((b_lo, b_hi), abs=1e-10)
    img_lo, img_hi = interval_image(fig6_map, b_lo, b_hi)
    assert a_lo - 1e-10 <= img_lo and img_hi <= a_hi + 1e-10


def test_fig6_repellers_sit_between_and_inside_bands(fig6_map):
    bands = chaotic_intervals(fig6_map)
    (a_lo, _), (_, b_hi) = bands.intervals
    assert b_hi < fig6_map.x_star_right < a_lo
    for x in find_two_cycles(fig6_map)[0].points:
        assert bands.contains(x)


def test_chaotic_intervals_fig7_four_pieces(fig7_map):
    m = fig7_map
    bands = chaotic_intervals(m)
    assert bands.k == 2
    assert len(bands.intervals) == 4

    ordered = sorted(bands.intervals)
    assert all(a[1] < b[0] for a, b in zip(ordered, ordered[1:]))
    assert bands.intervals[0][1] == pytest.approx(eval_best_reply(m, m.x_u), abs=1e-12)
    assert bands.intervals[1][0] == pytest.approx(bands.critical_orbit[1], abs=1e-12)
    assert bands.intervals[3][0] <= m.x_u <= bands.intervals[3][1]

    for i in range(3):
        image = interval_image(m, *bands.intervals[i])
        assert image == pytest.approx(bands.intervals[i + 1], abs=1e-10)


def test_classify_regime_fig7(fig7_map):
    regime = classify_regime(fig7_map)
    assert (regime.case, regime.k) == ("IIIc", 2)


def _fig2_map(b_lo):
    return build_best_reply(new_uncertainty_set(0.6, b_lo, 0.5, 0.0))


@pytest.mark.parametrize("b_lo", [0.1665, 0.175])
def test_two_pieces_just_past_the_homoclinic_boundary(b_lo):
    m = _fig2_map(b_lo)
    regime = classify_regime(m)
    assert regime.case == "IIIc"
    assert regime.k == 1
    first, second = chaotic_intervals(m).intervals
    assert second[1] < first[0]
    assert len(attractor_catalog(m)) == 3


def test_two_pieces_at_fig2_b_lo_0_1665():
    first, second = chaotic_intervals(_fig2_map(0.1665)).intervals
    assert first == pytest.approx((1.20426, 1.30463), abs=1e-5)
    assert second == pytest.approx((1.04410, 1.19480), abs=1e-5)


@pytest.mark.slow
def test_fig2_chaotic_range_always_gets_a_piece_count():
    for b_lo in np.linspace(0.12, 0.2495, 40):
        regime = classify_regime(_fig2_map(float(b_lo)))
        assert regime.case in ("IIIc", "IIId")
        assert regime.k is not None, b_lo


@pytest.mark.parametrize("name", ["fig1a", "fig1b", "fig1c", "fig1d"])
def test_chaotic_intervals_outside_chaos(name):
    with pytest.raises(NotChaoticRegime):
        chaotic_intervals(make_map(name))


def test_interval_image_over_kink(fig6_map):
    # x_u is the maximum of f
    assert interval_image(fig6_map, 1.5, 3.0) == pytest.approx((eval_best_reply(fig6_map, 3.0), 2.5))


@pytest.mark.parametrize("x0", [0.0, 0.3, 1.0, 2.5, 3.9, 5.0])
def test_regime_i_orbits_reach_fixed_point(fig1a_map, x0):
    orbit = iterate_f(fig1a_map, x0, n=20, burn=200)
    assert orbit.values == pytest.approx([1 / 1.2] * 20, abs=1e-8)


def test_orbit_from_x_m(fig6_map):
    orbit = iterate_f(fig6_map, fig6_map.x_m, n=3, burn=0)
    assert orbit.values[0] == 0.0
    assert orbit.values[1] == pytest.approx(1 / 0.6)


def test_fig6_orbit_stays_in_bands(fig6_map):
    bands = chaotic_intervals(fig6_map)
    orbit = iterate_f(fig6_map, 1.9, n=5000)
    assert all(bands.contains(x, tol=1e-9) for x in orbit.values)


def test_iterate_f_validates(fig6_map):
    with pytest.raises(InvalidParameters):
        iterate_f(fig6_map, 1.0, n=0)


@pytest.mark.parametrize("name", ["fig3", "fig5", "fig6"])
def test_lyapunov_positive_in_chaos(name):
    m = make_map(name)
    assert lyapunov(m, m.x_u * 0.99, n=100_000) > 0.05


def test_lyapunov_fig6_equals_log_slope(fig6_map):
    # both active branches have |slope| = 1.25
    assert lyapunov(fig6_map, 1.9, n=10_000) == pytest.approx(math.log(1.25), abs=1e-12)


def test_lyapunov_zero_on_continuum(fig1d_map):
    m = fig1d_map
    x0 = 0.5 * (m.x_u + eval_best_reply(m, m.x_u))
    assert lyapunov(m, x0, n=100_000) == pytest.approx(0.0, abs=1e-10)


def test_lyapunov_regime_i_with_flat_branch(fig1a_map):
    assert lyapunov(fig1a_map, 1.0, n=1000) == -math.inf
    with pytest.raises(ZeroSlopeEncountered):
        lyapunov(fig1a_map, 1.0, n=1000, strict=True)


def test_lyapunov_regime_i_with_sloped_branch():
    m = build_best_reply(new_uncertainty_set(0.6, 0.2, 0.3, 0.1))
    assert lyapunov(m, 1.0, n=1000) == pytest.approx(math.log(0.1 / 1.2), rel=1e-12)


def test_lyapunov_negative_in_regime_iiia(fig1c_map):
    assert lyapunov(fig1c_map, 1.0, n=1000) < 0


def test_lyapunov_needs_long_orbit(fig6_map):
    with pytest.raises(InvalidParameters):
        lyapunov(fig6_map, 1.0, n=999)
