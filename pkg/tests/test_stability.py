import math

import numpy as np
import pytest
import scipy.integrate

from eulerdisk import (GridField, Orbit, SolverConfig, SpectralField,
                       bessel_j, bessel_zero, mode_norm_sq)
from eulerdisk.functionals import enstrophy, impulse
from eulerdisk.solver import rotate_field
from eulerdisk.stability import (PERTURBATION_NAMES, dist_to_orbit,
                                 dist_to_steady, distance_growth_factor,
                                 first_eigenvalue, make_perturbation,
                                 orbit_point, project_steady, report_csv_text,
                                 run_stability_experiment, second_eigenvalue,
                                 stability_bound)


def _smooth_random(basis, seed, scale=0.4):
    """Seeded band-limited field with enough coefficient decay that the
    quadrature represents its L2 inner products to rounding."""
    rng = np.random.default_rng(seed)
    k = basis.spec.k_radial
    env = (np.exp(-0.6 * np.arange(basis.n_orders))[:, None, None]
           * np.exp(-0.6 * np.arange(k))[None, None, :])
    c = rng.standard_normal((basis.n_orders, 2, k)) * env * scale
    c[0, 1, :] = 0.0
    return SpectralField(c)


def constrained_spectrum_fd(order, grid_points=2000, lam_max=55.0):
    """Eigenvalues of the constant-boundary mean-zero problem, one angular
    order at a time, from a second-order finite-difference marching scheme.

    The radial equation u'' + u'/r - order^2 u / r^2 + lam u = 0 is marched
    outward on a staggered grid with the parity ghost condition at the
    center. For order >= 1 the boundary condition u(1) = 0 gives the
    secular function; for order 0 the boundary value is free and the
    secular function is the mean over the disk.
    """
    h = 1.0 / grid_points
    r = (np.arange(grid_points) + 0.5) * h
    parity = 1.0 if order % 2 == 0 else -1.0

    def secular(lam):
        u_prev = 1.0
        u_curr = parity * 1.0  # value at r_0 from the ghost at -h/2
        total = u_curr * r[0]
        for i in range(grid_points - 1):
            ri = r[i]
            c_plus = 1.0 / h**2 + 1.0 / (2.0 * h * ri)
            c_minus = 1.0 / h**2 - 1.0 / (2.0 * h * ri)
            c_center = -2.0 / h**2 - order**2 / ri**2 + lam
            u_next = -(c_center * u_curr + c_minus * u_prev) / c_plus
            u_prev, u_curr = u_curr, u_next
            total += u_curr * r[i + 1]
            if abs(u_curr) > 1e250:
                u_prev *= 1e-250
                u_curr *= 1e-250
                total *= 1e-250
        if order == 0:
            return total * h
        # interpolate the wall value between the last node and its ghost
        ri = r[-1]
        c_plus = 1.0 / h**2 + 1.0 / (2.0 * h * ri)
        c_minus = 1.0 / h**2 - 1.0 / (2.0 * h * ri)
        c_center = -2.0 / h**2 - order**2 / ri**2 + lam
        ghost = -(c_center * u_curr + c_minus * u_prev) / c_plus
        return 0.5 * (u_curr + ghost)

    found = []
    lam_grid = np.arange(1.0, lam_max, 0.5)
    values = [secular(lam) for lam in lam_grid]
    for a, b, fa, fb in zip(lam_grid, lam_grid[1:], values, values[1:]):
        if fa * fb < 0:
            lo, hi, flo = a, b, fa
            for _ in range(50):
                mid = 0.5 * (lo + hi)
                fm = secular(mid)
                if flo * fm <= 0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            found.append(0.5 * (lo + hi))
    return found


class TestEigenvalues:
    def test_first_eigenvalue_value(self):
        assert first_eigenvalue() == pytest.approx(14.68197, abs=1e-4)

    def test_second_eigenvalue_value(self):
        assert second_eigenvalue() == pytest.approx(26.3746, abs=1e-3)
        assert second_eigenvalue() > first_eigenvalue()

    def test_classification_against_fd_oracle(self):
        # collect the low end of the spectrum over angular orders 0..3
        eigenvalues = []
        for order in range(4):
            eigenvalues.extend(constrained_spectrum_fd(order))
        eigenvalues.sort()
        assert eigenvalues[0] == pytest.approx(first_eigenvalue(), abs=1e-3)
        distinct = [eigenvalues[0]]
        for lam in eigenvalues[1:]:
            if lam - distinct[-1] > 1e-3:
                distinct.append(lam)
        assert distinct[1] == pytest.approx(second_eigenvalue(), abs=1e-3)

    def test_radial_order_skips_plain_dirichlet_zero(self):
        # the mean-zero constraint moves the radial eigenvalues away from
        # the zeros of J0: the smallest is j_{1,1}^2, not j_{0,1}^2
        radial = constrained_spectrum_fd(0)
        assert radial[0] == pytest.approx(bessel_zero(1, 1) ** 2, abs=1e-3)
        assert abs(radial[0] - bessel_zero(0, 1) ** 2) > 5.0


class TestGrowthFactor:
    def test_value(self):
        assert distance_growth_factor() == pytest.approx(1.5019, abs=1e-3)

    def test_monotone_in_second_eigenvalue(self):
        lam1 = first_eigenvalue()
        factors = [math.sqrt(lam2 / (lam2 - lam1)) for lam2 in (20.0, 26.0, 40.0)]
        assert factors[0] > factors[1] > factors[2]

    def test_exceeds_one(self):
        assert distance_growth_factor() > 1.0


class TestStabilityBound:
    def test_dipole_case(self):
        assert stability_bound(Orbit(0.0, 1.0), 0.1) == pytest.approx(0.11, abs=1e-15)

    def test_radial_case(self):
        assert stability_bound(Orbit(1.0, 0.0), 0.04) == pytest.approx(0.24, abs=1e-15)

    def test_zero_eps(self):
        assert stability_bound(Orbit(0.0, 1.0), 0.0) == 0.0
        assert stability_bound(Orbit(1.0, 0.0), 0.0) == 0.0

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            stability_bound(Orbit(0.0, 1.0), -0.1)
        with pytest.raises(ValueError):
            stability_bound(Orbit(0.0, 1.0), 0.1, constant=0.0)
        with pytest.raises(ValueError):
            Orbit(0.0, -1.0)


class TestProjection:
    def test_exact_coordinates(self, basis):
        w = orbit_point(basis, Orbit(1.0, 2.0))
        coords = project_steady(basis, w)
        assert coords.a == pytest.approx(1.0, abs=1e-12)
        assert coords.b_c == pytest.approx(2.0, abs=1e-12)
        assert coords.b_s == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_mode_projects_to_zero(self, basis):
        j21 = bessel_zero(2, 1)
        vals = bessel_j(2, j21 * basis.r[:, None]) * np.cos(2 * basis.theta[None, :])
        coords = project_steady(basis, basis.analyze(GridField(vals)))
        assert abs(coords.a) <= 1e-10
        assert coords.b_mag <= 1e-10

    def test_phase_decomposition(self, basis):
        w = orbit_point(basis, Orbit(0.0, 1.0), alpha=math.pi / 3)
        coords = project_steady(basis, w)
        assert coords.b_c == pytest.approx(0.5, abs=1e-12)
        assert coords.b_s == pytest.approx(-math.sin(math.pi / 3), abs=1e-12)
        assert coords.b_mag == pytest.approx(1.0, abs=1e-12)
        assert coords.phase == pytest.approx(math.pi / 3, abs=1e-12)

    def test_idempotent(self, basis):
        rng = np.random.default_rng(15)
        c = rng.standard_normal((basis.n_orders, 2, 32))
        c[0, 1, :] = 0.0
        first = project_steady(basis, SpectralField(c))
        recon = orbit_point(basis, Orbit(first.a, 0.0))
        recon.coeffs[1, 0, :] = first.b_c * basis.j1_radial_coeffs
        recon.coeffs[1, 1, :] = first.b_s * basis.j1_radial_coeffs
        second = project_steady(basis, recon)
        assert second.a == pytest.approx(first.a, abs=1e-12)
        assert second.b_c == pytest.approx(first.b_c, abs=1e-12)
        assert second.b_s == pytest.approx(first.b_s, abs=1e-12)


class TestDistances:
    def test_steady_family_distance_zero(self, basis):
        w = orbit_point(basis, Orbit(0.4, 1.7), alpha=-0.9)
        assert dist_to_steady(basis, w) <= 1e-10

    def test_orthogonal_mode_distance_is_norm(self, basis):
        j21 = bessel_zero(2, 1)
        vals = bessel_j(2, j21 * basis.r[:, None]) * np.cos(2 * basis.theta[None, :])
        w = basis.analyze(GridField(vals))
        assert dist_to_steady(basis, w) == pytest.approx(
            math.sqrt(enstrophy(basis, w)), abs=1e-10)

    def test_mixed_field_distance(self, basis):
        j21 = bessel_zero(2, 1)
        vals = bessel_j(2, j21 * basis.r[:, None]) * np.cos(2 * basis.theta[None, :])
        tail = basis.analyze(GridField(vals))
        w = orbit_point(basis, Orbit(1.0, 0.0)) + 0.1 * tail
        expected = 0.1 * math.sqrt(enstrophy(basis, tail))
        assert dist_to_steady(basis, w) == pytest.approx(expected, abs=1e-10)

    def test_pythagoras(self, basis):
        w = _smooth_random(basis, 16)
        coords = project_steady(basis, w)
        proj_sq = (coords.a**2 * mode_norm_sq(0)
                   + coords.b_mag**2 * mode_norm_sq(1))
        total = enstrophy(basis, w)
        assert dist_to_steady(basis, w) ** 2 + proj_sq == pytest.approx(
            total, abs=1e-10)

    def test_orbit_member_distance_zero(self, basis):
        orbit = Orbit(1.0, 2.0)
        for alpha in (0.0, 0.7, -2.2):
            w = orbit_point(basis, orbit, alpha=alpha)
            assert dist_to_orbit(basis, w, orbit) <= 1e-10

    def test_radial_amplitude_gap(self, basis):
        w = 0.6 * orbit_point(basis, Orbit(1.0, 0.0))
        expected = 0.4 * math.sqrt(mode_norm_sq(0))
        assert dist_to_orbit(basis, w, Orbit(1.0, 0.0)) == pytest.approx(
            expected, abs=1e-10)

    def test_brute_force_phase_minimum(self, basis):
        # expand the squared norm in grid quadrature pieces and scan the
        # phase on a dense grid; shares only the quadrature with the
        # closed-form path, not the projection formula
        rng = np.random.default_rng(17)
        orbit = Orbit(0.8, 1.1)
        alphas = np.linspace(0.0, 2.0 * math.pi, 10000, endpoint=False)
        e0 = np.broadcast_to(basis.j0_r[:, None], (32, 32))
        e1c = basis.j1_r[:, None] * np.cos(basis.theta[None, :])
        e1s = basis.j1_r[:, None] * np.sin(basis.theta[None, :])
        member_sq = basis.integrate(GridField(
            (orbit.A * e0 + orbit.B * e1c) ** 2))
        for seed in range(20):
            w = _smooth_random(basis, 100 + seed)
            closed = dist_to_orbit(basis, w, orbit)
            grid_vals = basis.synthesize(w).values
            w_sq = basis.integrate(GridField(grid_vals**2))
            inner_e0 = basis.integrate(GridField(grid_vals * e0))
            inner_c = basis.integrate(GridField(grid_vals * e1c))
            inner_s = basis.integrate(GridField(grid_vals * e1s))
            cross = (orbit.A * inner_e0
                     + orbit.B * (np.cos(alphas) * inner_c - np.sin(alphas) * inner_s))
            best = (w_sq - 2.0 * cross + member_sq).min()
            assert closed == pytest.approx(math.sqrt(best), abs=1e-6)

    def test_rotation_invariance(self, basis):
        rng = np.random.default_rng(18)
        orbit = Orbit(0.5, 1.5)
        c = rng.standard_normal((basis.n_orders, 2, 32)) * 0.2
        c[0, 1, :] = 0.0
        w = SpectralField(c)
        base = dist_to_orbit(basis, w, orbit)
        for beta in (0.3, 1.1, -2.7):
            assert dist_to_orbit(basis, rotate_field(w, beta), orbit) == pytest.approx(
                base, abs=1e-10)

    def test_orbit_distance_splits_through_projection(self, basis):
        # the squared orbit distance is the transverse part plus the
        # in-family gap to the nearest orbit point, the latter evaluated
        # here by direct quadrature at the optimal phase
        orbit = Orbit(0.7, 1.2)
        for seed in (31, 32, 33):
            w = _smooth_random(basis, seed)
            coords = project_steady(basis, w)
            projected = orbit_point(basis, Orbit(coords.a, 0.0))
            projected.coeffs[1, 0, :] = coords.b_c * basis.j1_radial_coeffs
            projected.coeffs[1, 1, :] = coords.b_s * basis.j1_radial_coeffs
            nearest = orbit_point(basis, orbit, alpha=coords.phase)
            gap_sq = enstrophy(basis, projected - nearest)
            total = dist_to_orbit(basis, w, orbit) ** 2
            transverse = dist_to_steady(basis, w) ** 2
            assert total == pytest.approx(transverse + gap_sq, abs=1e-10)


class TestImpulseBookkeeping:
    def test_projected_impulse_identity(self, basis):
        # the impulse of the projected field reduces to the radial moment
        j = basis.bessel_j11
        moment, _ = scipy.integrate.quad(
            lambda r: r**3 * bessel_j(0, j * r), 0.0, 1.0,
            epsabs=1e-14, epsrel=1e-13)
        rng = np.random.default_rng(19)
        c = rng.standard_normal((basis.n_orders, 2, 32)) * 0.3
        c[0, 1, :] = 0.0
        w = SpectralField(c)
        coords = project_steady(basis, w)
        proj = orbit_point(basis, Orbit(coords.a, 0.0))
        proj.coeffs[1, 0, :] = coords.b_c * basis.j1_radial_coeffs
        proj.coeffs[1, 1, :] = coords.b_s * basis.j1_radial_coeffs
        assert impulse(basis, proj) == pytest.approx(
            2.0 * math.pi * coords.a * moment, abs=1e-10)


class TestPerturbationLibrary:
    @pytest.mark.parametrize("name", PERTURBATION_NAMES)
    def test_unit_norm_and_mean_zero(self, basis, name):
        p = make_perturbation(basis, name, seed=3)
        assert math.sqrt(enstrophy(basis, p)) == pytest.approx(1.0, abs=1e-12)
        assert basis.mean(basis.synthesize(p)) == pytest.approx(0.0, abs=1e-12)

    def test_random_is_seeded(self, basis):
        a = make_perturbation(basis, "random", seed=5)
        b = make_perturbation(basis, "random", seed=5)
        c = make_perturbation(basis, "random", seed=6)
        assert np.array_equal(a.coeffs, b.coeffs)
        assert not np.array_equal(a.coeffs, c.coeffs)

    def test_unknown_name(self, basis):
        with pytest.raises(ValueError):
            make_perturbation(basis, "vortex_soup")


class TestExperimentHarness:
    def test_zero_eps_stays_on_orbit(self, basis):
        orbit = Orbit(0.0, 1.0)
        p = make_perturbation(basis, "j2_cos2")
        cfg = SolverConfig(dt=1e-3, t_end=0.2, save_every=100)
        report = run_stability_experiment(basis, orbit, p, 0.0, cfg)
        assert max(report.dist_orbit) <= 1e-7
        assert not report.truncated

    def test_in_family_phase_perturbation_stays(self, basis):
        orbit = Orbit(1.0, 1.0)
        p = basis.zero_spectral()
        p.coeffs[1, 1, :] = basis.j1_radial_coeffs / math.sqrt(mode_norm_sq(1))
        cfg = SolverConfig(dt=1e-3, t_end=0.2, save_every=100)
        report = run_stability_experiment(basis, orbit, p, 5e-4, cfg)
        assert max(report.dist_orbit) <= 1e-6

    def test_requires_unit_norm(self, basis):
        orbit = Orbit(0.0, 1.0)
        p = make_perturbation(basis, "j2_cos2")
        cfg = SolverConfig(dt=1e-3, t_end=0.1)
        with pytest.raises(ValueError):
            run_stability_experiment(basis, orbit, 2.0 * p, 0.05, cfg)

    def test_library_runs_stay_in_fixed_frame(self, basis):
        orbit = Orbit(0.0, 1.0)
        p = make_perturbation(basis, "j2_cos2")
        cfg = SolverConfig(dt=1e-3, t_end=0.2, save_every=100)
        report = run_stability_experiment(basis, orbit, p, 0.05, cfg)
        assert report.rotation_rate == pytest.approx(0.0, abs=1e-13)
        assert len(report.dist_orbit) == len(report.dist_orbit_rotating)

    def test_lifted_run_records_both_frames(self, basis):
        # a perturbation carrying a constant component gives the initial
        # data nonzero mean, activating the rotating-frame reduction
        orbit = Orbit(0.0, 1.0)
        p = make_perturbation(basis, "j2_cos2")
        shifted = 0.05 * p
        shifted.coeffs[0, 0, 0] += 0.1
        scale = math.sqrt(enstrophy(basis, shifted))
        pert = SpectralField(shifted.coeffs / scale)
        cfg = SolverConfig(dt=1e-3, t_end=0.3, save_every=100)
        report = run_stability_experiment(basis, orbit, pert, scale, cfg)
        assert report.rotation_rate == pytest.approx(-0.05, abs=1e-12)
        assert report.mean_omega == pytest.approx(0.1, abs=1e-12)
        # the two frames differ by at most the norm of the constant shift
        cap = 2.0 * abs(report.rotation_rate) * math.sqrt(math.pi) * 1.01
        for d_fix, d_rot in zip(report.dist_orbit, report.dist_orbit_rotating):
            assert abs(d_fix - d_rot) <= cap

    def test_report_csv_format(self, basis, tmp_path):
        orbit = Orbit(0.0, 1.0)
        p = make_perturbation(basis, "j2_cos2")
        cfg = SolverConfig(dt=1e-3, t_end=0.05, save_every=25)
        report = run_stability_experiment(basis, orbit, p, 0.02, cfg)
        text = report_csv_text(report)
        lines = text.strip().splitlines()
        header = lines[0].split(",")
        assert header == ["t", "dist_orbit", "dist_V", "E", "I", "J", "EC",
                          "A_prime", "B_prime", "alpha_prime", "mean_omega"]
        assert lines[-1].startswith("# sup_dist_orbit=")
        assert "growth_ratio=" in lines[-1]
        for row in lines[1:-1]:
            assert len(row.split(",")) == len(header)
