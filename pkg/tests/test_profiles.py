import json
import math

import numpy as np
import pytest

from dehnfill.errors import (
    DerivOrderUnsupported,
    InvalidMass,
    NotInCuspRegion,
    OutOfDomain,
    RadiusTooSmall,
)
from dehnfill.profiles import (
    BlackHoleProfile,
    CuspProfile,
    CutoffFunction,
    GluedProfile,
    SampledProfile,
    closing_parameters,
    coordinate_change_to_cusp,
    eval_profile,
    make_glued_profile,
    profile_from_json,
    profile_to_json,
)


def test_eval_profile_cusp():
    assert eval_profile(CuspProfile(), 3.0, 0) == 9.0
    assert eval_profile(CuspProfile(), 3.0, 1) == 6.0
    assert eval_profile(CuspProfile(), 3.0, 2) == 2.0


def test_eval_profile_blackhole_values():
    prof = BlackHoleProfile(m=1.0, n=4)
    # V(2) = 4 - 2/2
    assert eval_profile(prof, 2.0, 0) == pytest.approx(3.0, abs=1e-14)
    r_plus = 2.0 ** (1.0 / 3.0)
    assert eval_profile(prof, r_plus, 0) == pytest.approx(0.0, abs=1e-14)
    assert prof.r_plus == pytest.approx(r_plus, abs=1e-15)


def test_eval_profile_domain_and_order_errors():
    prof = BlackHoleProfile(m=1.0, n=4, domain=(1.3, 10.0))
    with pytest.raises(OutOfDomain):
        eval_profile(prof, 0.5, 0)
    with pytest.raises(OutOfDomain):
        eval_profile(prof, 11.0, 0)
    with pytest.raises(DerivOrderUnsupported):
        eval_profile(prof, 2.0, 3)


def test_closing_parameters_values():
    r_plus, beta = closing_parameters(1.0, 4)
    assert r_plus == pytest.approx(1.2599210, abs=1e-6)
    assert beta == pytest.approx(3.3246500, abs=1e-5)

    r_plus, beta = closing_parameters(0.5, 3)
    assert r_plus == 1.0
    assert beta == pytest.approx(2.0 * math.pi, abs=1e-14)

    with pytest.raises(InvalidMass):
        closing_parameters(0.0, 4)
    with pytest.raises(InvalidMass):
        closing_parameters(-1.0, 5)


def test_closing_smooth_cone_consistency():
    # beta must equal 4 pi / V'(r_plus) since V'(r_plus) = (n-1) r_plus
    r_plus, beta = closing_parameters(1.0, 5)
    prof = BlackHoleProfile(m=1.0, n=5)
    v1 = eval_profile(prof, r_plus, 1)
    assert beta == pytest.approx(4.0 * math.pi / v1, abs=1e-12)


def test_closing_identity_sweep():
    for m in (0.25, 0.5, 1.0, 2.0, 4.0):
        for n in range(3, 9):
            r_plus, beta = closing_parameters(m, n)
            prof = BlackHoleProfile(m=m, n=n)
            assert abs(beta * eval_profile(prof, r_plus, 1) - 4.0 * math.pi) < 1e-12
            assert abs(r_plus - (2.0 * m) ** (1.0 / (n - 1))) < 1e-12


def test_cutoff_shape():
    cut = CutoffFunction(8.0, 9.0)
    r = np.linspace(7.0, 10.0, 301)
    chi = cut.chi(r)
    assert np.all((0.0 <= chi) & (chi <= 1.0))
    assert np.all(np.diff(chi) <= 1e-15)
    assert np.all(chi[r <= 8.0] == 1.0)
    assert np.all(chi[r >= 9.0] == 0.0)
    # derivatives vanish identically outside the window, not just approximately
    outside = (r < 8.0) | (r > 9.0)
    assert np.all(cut.chi_d1(r)[outside] == 0.0)
    assert np.all(cut.chi_d2(r)[outside] == 0.0)
    with pytest.raises(RadiusTooSmall):
        CutoffFunction(9.0, 8.0)


def test_glued_profile_closed_form_regions():
    prof = make_glued_profile(100.0, 4)
    # chi = 1 region: V(50) = 2500 - 2/50
    assert eval_profile(prof, 50.0, 0) == pytest.approx(2499.96, abs=1e-12)
    # chi = 0 region: pure cusp
    assert eval_profile(prof, 99.5, 0) == pytest.approx(99.5**2, abs=1e-12)


def test_glued_profile_matches_pieces_bitwise():
    prof = make_glued_profile(100.0, 4)
    bh = BlackHoleProfile(m=1.0, n=4)
    lo, hi = prof.cutoff.lo, prof.cutoff.hi
    r_in = np.linspace(prof.domain[0] * 1.001, lo * 0.999, 97)
    r_out = np.linspace(hi * 1.001, 99.9, 97)
    for order in (0, 1, 2):
        assert np.array_equal(eval_profile(prof, r_in, order),
                              eval_profile(bh, r_in, order))
        cusp_vals = {0: r_out**2, 1: 2.0 * r_out, 2: np.full_like(r_out, 2.0)}
        assert np.array_equal(eval_profile(prof, r_out, order), cusp_vals[order])


def test_glued_profile_smooth_junctions():
    # R=10 puts the transition on [8, 9]; check C^4 by comparing one-sided
    # finite differences of V across each junction
    prof = make_glued_profile(10.0, 5)
    for rj in (prof.cutoff.lo, prof.cutoff.hi):
        h = 1e-2
        for order in (1, 2):
            left = _fd(prof, rj - 2.0 * h, h, order)
            right = _fd(prof, rj + 2.0 * h, h, order)
            exact_l = eval_profile(prof, rj - 2.0 * h, order)
            exact_r = eval_profile(prof, rj + 2.0 * h, order)
            assert abs(left - exact_l) < 1e-6 * max(1.0, abs(exact_l))
            assert abs(right - exact_r) < 1e-6 * max(1.0, abs(exact_r))


def _fd(prof, r, h, order):
    stencil = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * h + r
    vals = eval_profile(prof, stencil, 0)
    if order == 1:
        w = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h)
    else:
        w = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h**2)
    return float(w @ vals)


def test_analytic_derivatives_match_fd():
    profiles = [
        (CuspProfile(domain=(0.5, 50.0)), np.linspace(1.0, 40.0, 23)),
        (BlackHoleProfile(m=1.0, n=4), np.linspace(1.5, 40.0, 23)),
        (BlackHoleProfile(m=2.0, n=7), np.linspace(1.6, 40.0, 23)),
        (make_glued_profile(30.0, 5), np.linspace(2.0, 29.0, 41)),
    ]
    for prof, rs in profiles:
        for r in rs:
            for order in (1, 2):
                fd = _fd(prof, r, 1e-3 * max(1.0, r), order)
                exact = eval_profile(prof, float(r), order)
                assert abs(fd - exact) < 1e-6 * max(1.0, abs(exact))


def test_make_glued_profile_too_small():
    with pytest.raises(RadiusTooSmall):
        make_glued_profile(1.8, 4)


def test_coordinate_change_to_cusp():
    prof = make_glued_profile(100.0, 4)
    out = coordinate_change_to_cusp(prof, 100.0, 0.995)
    assert out["rho"] == pytest.approx(0.995)
    assert out["max_mismatch"] < 1e-14

    prof50 = make_glued_profile(50.0, 4)
    out = coordinate_change_to_cusp(prof50, 50.0, 0.99)
    assert out["max_mismatch"] < 1e-14

    # below the end of the transition the profile is not the cusp form
    with pytest.raises(NotInCuspRegion):
        coordinate_change_to_cusp(prof, 100.0, 0.85)


def test_profile_serialization_roundtrip():
    for prof in (CuspProfile(), BlackHoleProfile(m=2.0, n=6),
                 make_glued_profile(25.0, 4)):
        back = profile_from_json(profile_to_json(prof))
        r = np.linspace(prof.domain[0] + 0.1, min(prof.domain[1], 20.0), 17)
        assert np.array_equal(eval_profile(back, r, 0), eval_profile(prof, r, 0))


def test_sampled_profile_roundtrip_exact():
    grid = np.geomspace(1.0, 20.0, 64)
    vals = grid**2 - 2.0 / grid
    prof = SampledProfile(grid=grid, values=vals)
    back = profile_from_json(profile_to_json(prof))
    assert np.array_equal(back.grid, prof.grid)
    assert np.array_equal(back.values, prof.values)
    assert np.array_equal(eval_profile(back, grid, 0), eval_profile(prof, grid, 0))


def test_sampled_profile_validation():
    grid = np.linspace(1.0, 2.0, 8)
    with pytest.raises(OutOfDomain):
        SampledProfile(grid=grid, values=grid**2)  # fewer than 9 points
    grid = np.array([1.0, 2.0, 1.5, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0])
    with pytest.raises(OutOfDomain):
        SampledProfile(grid=grid, values=grid**2)


def test_positivity_above_core():
    prof = make_glued_profile(40.0, 6)
    r = np.linspace(prof.r_plus * 1.01, 39.9, 500)
    assert np.all(eval_profile(prof, r, 0) > 0)
