"""Closed-form ball solutions and their pointwise identities.

The ball catalog values are frozen from an independent 1-D quadrature
oracle (volume form 2 pi h dr for n = 2) evaluated outside the package:

    spherical n=2 R=pi/4:  |boundary| = 2 pi sin(pi/4) = 4.442882938158366
                           int hdot   = pi/2           = 1.5707963267948966
                           int h^2 hdot                = 0.39269908169872414
    euclidean n=2 R=1:     int hdot |Du|^2 = pi/2, matching the split form
"""

import math

import numpy as np
import pytest

from torsionlab import (
    RadialSolution,
    bochner_residual,
    compute_catalog,
    make_profile,
    newton_equality_check,
    pohozaev_pointwise_residual,
    radial_torsion_solution,
)

EUCLID = make_profile("euclidean", 10.0)
SPHERE = make_profile("spherical", math.pi / 2)
HYPER = make_profile("hyperbolic", 5.0)


class TestRadialSolution:
    def test_euclidean_unit_ball(self):
        sol = radial_torsion_solution(EUCLID, 2, 1.0)
        assert sol.u(0.0) == -0.5
        assert sol.c == 1.0
        assert sol.u(1.0) == 0.0

    def test_spherical_quarter_ball(self):
        sol = radial_torsion_solution(SPHERE, 2, math.pi / 4)
        assert sol.u(0.0) == pytest.approx(-0.2928932188134524, abs=1e-15)
        assert sol.c == pytest.approx(0.7071067811865475, abs=1e-15)

    def test_hyperbolic_neumann_constant(self):
        sol = radial_torsion_solution(HYPER, 3, 1.0)
        assert sol.c == pytest.approx(1.1752011936438014, abs=1e-15)

    def test_solution_negative_inside_zero_on_boundary(self):
        for profile, R in ((EUCLID, 1.2), (SPHERE, 0.9), (HYPER, 1.5)):
            sol = radial_torsion_solution(profile, 4, R)
            assert sol.u(R) == 0.0
            for r in np.linspace(0.0, R * 0.999, 20):
                assert sol.u(r) < 0.0
            assert sol.u_r(R) == sol.c > 0.0

    def test_rejects_out_of_range_radius(self):
        with pytest.raises(ValueError):
            radial_torsion_solution(SPHERE, 2, math.pi / 2 + 0.1)
        with pytest.raises(ValueError):
            radial_torsion_solution(EUCLID, 2, 0.0)
        with pytest.raises(ValueError):
            radial_torsion_solution(EUCLID, 1, 1.0)

    def test_evaluation_outside_ball_rejected(self):
        sol = radial_torsion_solution(EUCLID, 2, 1.0)
        with pytest.raises(ValueError):
            sol.u(1.5)

    def test_is_frozen_dataclass(self):
        sol = radial_torsion_solution(EUCLID, 2, 1.0)
        assert isinstance(sol, RadialSolution)
        with pytest.raises(AttributeError):
            sol.R = 2.0


# Shared pointwise sweep: 3 profiles x dimensions x radii x 50 points.
POINTWISE_CASES = [
    (profile, n, R)
    for profile in (EUCLID, SPHERE, HYPER)
    for n in (2, 3, 4, 5)
    for R in (0.3, math.pi / 4, 1.2)
    if R < profile.r_max
]


class TestPointwiseIdentities:
    @pytest.mark.parametrize("profile,n,R", POINTWISE_CASES)
    def test_bochner_residual_vanishes(self, profile, n, R):
        sol = radial_torsion_solution(profile, n, R)
        rs = np.linspace(R / 51, R * 50 / 51, 50)
        assert max(abs(bochner_residual(sol, r)) for r in rs) < 1e-10

    @pytest.mark.parametrize("profile,n,R", POINTWISE_CASES)
    def test_pohozaev_residual_vanishes(self, profile, n, R):
        sol = radial_torsion_solution(profile, n, R)
        rs = np.linspace(R / 51, R * 50 / 51, 50)
        assert max(abs(pohozaev_pointwise_residual(sol, r)) for r in rs) < 1e-10

    @pytest.mark.parametrize("profile,n,R", POINTWISE_CASES)
    def test_newton_gap_exactly_zero(self, profile, n, R):
        sol = radial_torsion_solution(profile, n, R)
        rs = np.linspace(R / 51, R * 50 / 51, 50)
        assert all(newton_equality_check(sol, r) == 0.0 for r in rs)

    def test_euclidean_bochner_terms(self):
        # Flat case: every Bochner term is constant, residual identically 0.
        sol = radial_torsion_solution(EUCLID, 2, 1.0)
        assert bochner_residual(sol, 0.5) == 0.0

    def test_pohozaev_sides_spherical_value(self):
        # Both sides equal -(n+2) h^2 hdot / 2 on radial solutions; at
        # r = 0.5, n = 2 that is -0.4034226801113349 (frozen evaluation).
        sol = radial_torsion_solution(SPHERE, 2, math.pi / 4)
        assert abs(pohozaev_pointwise_residual(sol, 0.5)) < 1e-13

    def test_euclidean_pohozaev_sides(self):
        # Both sides are -2 r^2 in the plane.
        from torsionlab import RadialJet, divergence_radial

        r = 0.7
        phi = RadialJet(-0.5 * r ** 3, -1.5 * r ** 2, 0.0)
        assert divergence_radial(EUCLID, 2, phi, r) == pytest.approx(-0.98, abs=1e-15)
        sol = radial_torsion_solution(EUCLID, 2, 1.0)
        assert pohozaev_pointwise_residual(sol, r) == pytest.approx(0.0, abs=1e-13)


class TestRadialCatalog:
    def test_spherical_quarter_ball_catalog(self):
        sol = radial_torsion_solution(SPHERE, 2, math.pi / 4)
        cat = compute_catalog(sol)
        assert cat.bdry_measure == pytest.approx(4.442882938158366, abs=1e-10)
        assert cat.int_hdot == pytest.approx(1.5707963267948966, abs=1e-10)
        # perimeter balance: |boundary| - (n/c) int hdot = 0
        assert cat.bdry_measure - 2.0 / cat.c_mean * cat.int_hdot \
            == pytest.approx(0.0, abs=1e-8)
        # both sides of the exact split equal pi/8
        assert cat.bw_lhs == pytest.approx(0.39269908169872414, abs=1e-8)
        assert cat.bw_rhs_exact == pytest.approx(0.39269908169872414, abs=1e-8)
        assert abs(cat.bw_gap) < 1e-8
        assert abs(cat.energy_defect) < 1e-8

    def test_euclidean_unit_ball_catalog(self):
        sol = radial_torsion_solution(EUCLID, 2, 1.0)
        cat = compute_catalog(sol)
        assert cat.int_hdot_gradsq == pytest.approx(math.pi / 2, abs=1e-10)
        rhs_split = 2 * cat.int_u_hdot2 + cat.int_u_ur_hddot
        assert rhs_split == pytest.approx(math.pi / 2, abs=1e-10)
        assert cat.bdry_measure == pytest.approx(2 * math.pi, abs=1e-12)

    def test_identical_integrands_alias(self):
        # With u_r = h the weighted gradient integrals coincide exactly.
        for profile, R in ((EUCLID, 1.0), (SPHERE, 0.8), (HYPER, 1.3)):
            cat = compute_catalog(radial_torsion_solution(profile, 3, R))
            assert cat.int_u_gradsq == cat.int_u_radial_flux
            assert cat.energy_defect == 0.0
            assert cat.c_std == 0.0

    @pytest.mark.parametrize("profile,R", [
        (EUCLID, 0.5), (EUCLID, 1.2), (SPHERE, 0.4), (SPHERE, math.pi / 4),
        (HYPER, 0.5), (HYPER, 1.0),
    ])
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_equality_cases_all_profiles(self, profile, R, n):
        cat = compute_catalog(radial_torsion_solution(profile, n, R))
        assert abs(cat.bw_gap) < 1e-8
        assert abs(cat.energy_defect) < 1e-8
        assert cat.newton_int == pytest.approx(0.0, abs=1e-10)

    def test_boundary_measure_scales_with_sphere_area(self):
        # n = 3 ball: boundary measure is 4 pi h(R)^2.
        sol = radial_torsion_solution(SPHERE, 3, 0.6)
        cat = compute_catalog(sol)
        want = 4 * math.pi * math.sin(0.6) ** 2
        assert cat.bdry_measure == pytest.approx(want, rel=1e-12)
