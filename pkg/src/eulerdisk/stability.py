"""Orbit machinery: projection onto the steady three-mode family, distances
to the family and to a rotational orbit, the constrained eigenvalue
constants, the stability bound envelopes, and the perturbation experiment
harness with its CSV report format.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import DiskBasis, SpectralField
from .bessel import bessel_j, bessel_zero
from .functionals import ConservedLedger, enstrophy
from .solver import BlowUpError, SolverConfig, rotate_field, simulate

__all__ = [
    "Orbit",
    "SteadyCoordinates",
    "StabilityReport",
    "PERTURBATION_NAMES",
    "orbit_point",
    "project_steady",
    "dist_to_steady",
    "dist_to_orbit",
    "first_eigenvalue",
    "second_eigenvalue",
    "distance_growth_factor",
    "stability_bound",
    "make_perturbation",
    "run_stability_experiment",
    "report_csv_text",
    "write_report_csv",
]


@dataclass(frozen=True)
class Orbit:
    """Rotational orbit parameters (A, B) with the normalization B >= 0."""

    A: float
    B: float

    def __post_init__(self):
        if self.B < 0:
            raise ValueError(f"orbit requires B >= 0, got {self.B}")


@dataclass(frozen=True)
class SteadyCoordinates:
    """Coordinates of the projection onto the steady mode family.

    a multiplies the radial mode, b_c and b_s the cos/sin modes. The
    amplitude-phase form is b_mag >= 0 with phase alpha such that the
    projection equals a*e0 + b_mag*e1 evaluated at (theta + alpha).
    """

    a: float
    b_c: float
    b_s: float

    @property
    def b_mag(self) -> float:
        return math.hypot(self.b_c, self.b_s)

    @property
    def phase(self) -> float:
        if self.b_mag == 0.0:
            return 0.0
        return math.atan2(-self.b_s, self.b_c)


@dataclass
class StabilityReport:
    """Per-run time series of distances, ledgers, and summary ratios."""

    orbit: Orbit
    epsilon: float
    perturbation: str
    times: list[float]
    dist_orbit: list[float]
    dist_orbit_rotating: list[float]
    dist_v: list[float]
    ledgers: list[ConservedLedger]
    coords: list[SteadyCoordinates]
    mean_omega: float
    rotation_rate: float
    sup_dist_orbit: float = 0.0
    empirical_constant: float = math.nan
    growth_ratio: float = math.nan
    truncated: bool = False


def orbit_point(basis: DiskBasis, orbit: Orbit, alpha: float = 0.0) -> SpectralField:
    """The steady field A*J0(j r) + B*J1(j r) cos(theta + alpha)."""
    out = basis.zero_spectral()
    out.coeffs[0, 0, :] = orbit.A * basis.j0_radial_coeffs
    out.coeffs[1, 0, :] = orbit.B * math.cos(alpha) * basis.j1_radial_coeffs
    out.coeffs[1, 1, :] = -orbit.B * math.sin(alpha) * basis.j1_radial_coeffs
    return out


def project_steady(basis: DiskBasis, omega: SpectralField) -> SteadyCoordinates:
    """Orthogonal projection coefficients onto the steady mode family."""
    basis._check_spectral(omega)
    coeffs = omega.coeffs
    synth = basis._synth[:, :coeffs.shape[2]]
    quad = 2.0 * math.pi * basis.w_r
    a = quad @ ((synth @ coeffs[0, 0]) * basis.j0_r) / basis.norm_v0
    quad1 = math.pi * basis.w_r
    b_c = quad1 @ ((synth @ coeffs[1, 0]) * basis.j1_r) / basis.norm_v1
    b_s = quad1 @ ((synth @ coeffs[1, 1]) * basis.j1_r) / basis.norm_v1
    return SteadyCoordinates(float(a), float(b_c), float(b_s))


def _steady_reconstruction(basis: DiskBasis, coords: SteadyCoordinates,
                           m: int) -> np.ndarray:
    out = np.zeros((basis.n_orders, 2, m))
    k = basis.spec.k_radial
    out[0, 0, :k] = coords.a * basis.j0_radial_coeffs
    out[1, 0, :k] = coords.b_c * basis.j1_radial_coeffs
    out[1, 1, :k] = coords.b_s * basis.j1_radial_coeffs
    return out


def dist_to_steady(basis: DiskBasis, omega: SpectralField) -> float:
    """L2 distance from omega to the steady mode family."""
    coords = project_steady(basis, omega)
    residual = omega.coeffs - _steady_reconstruction(basis, coords,
                                                     omega.coeffs.shape[2])
    return math.sqrt(max(enstrophy(basis, SpectralField(residual)), 0.0))


def dist_to_orbit(basis: DiskBasis, omega: SpectralField, orbit: Orbit) -> float:
    """L2 distance from omega to the rotational orbit with parameters (A, B).

    Uses the closed-form minimum over the orbit phase: the transverse part
    contributes dist_to_steady and the in-family part contributes the
    weighted differences of the radial and azimuthal amplitudes.
    """
    coords = project_steady(basis, omega)
    d_v = dist_to_steady(basis, omega)
    gap = (d_v**2
           + (orbit.A - coords.a) ** 2 * basis.norm_v0
           + (orbit.B - coords.b_mag) ** 2 * basis.norm_v1)
    return math.sqrt(max(gap, 0.0))


def first_eigenvalue() -> float:
    """Smallest eigenvalue of the constant-boundary mean-zero eigenproblem."""
    return bessel_zero(1, 1) ** 2


def second_eigenvalue() -> float:
    """Second eigenvalue of the same problem.

    Classified over angular orders: order n >= 1 contributes the Dirichlet
    values j_{n,k}^2 while order 0 with the mean-zero constraint contributes
    j_{1,k}^2, so the runner-up across all orders is j_{2,1}^2.
    """
    return bessel_zero(2, 1) ** 2


def distance_growth_factor() -> float:
    """Bound on sup_t dist(omega_t, family) / dist(omega_0, family)."""
    lam1, lam2 = first_eigenvalue(), second_eigenvalue()
    return math.sqrt(lam2 / (lam2 - lam1))


def stability_bound(orbit: Orbit, eps: float, constant: float = 1.0) -> float:
    """Orbital stability envelope for an initial distance eps.

    For B > 0 the envelope is C (sqrt(A^2+B^2) eps + eps^2) / B; for the
    purely radial case B = 0 it weakens to C (sqrt(|A|) sqrt(eps) + eps).
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if constant <= 0:
        raise ValueError("constant must be positive")
    if orbit.B > 0:
        amp = math.hypot(orbit.A, orbit.B)
        return constant * (amp * eps + eps**2) / orbit.B
    return constant * (math.sqrt(abs(orbit.A)) * math.sqrt(eps) + eps)


PERTURBATION_NAMES = ("j2_cos2", "j0_recentered", "j1_second", "random")


def _normalize(basis: DiskBasis, field_: SpectralField) -> SpectralField:
    norm = math.sqrt(enstrophy(basis, field_))
    if norm == 0.0:
        raise ValueError("cannot normalize a zero perturbation")
    return SpectralField(field_.coeffs / norm)


def make_perturbation(basis: DiskBasis, name: str, seed: int = 0) -> SpectralField:
    """Unit-norm perturbation field from the experiment library.

    j2_cos2 and j1_second are single Dirichlet eigenmodes orthogonal to the
    steady family, j0_recentered is a mean-zero radial profile, and random
    is a seeded band-limited mean-zero field with decaying mode envelope.
    """
    from .basis import GridField

    r, th = basis.r[:, None], basis.theta[None, :]
    if name == "j2_cos2":
        vals = bessel_j(2, bessel_zero(2, 1) * r) * np.cos(2 * th)
        out = basis.analyze(GridField(np.broadcast_to(vals, (r.size, th.size)).copy()))
    elif name == "j0_recentered":
        profile = bessel_j(0, bessel_zero(0, 1) * r)
        vals = np.broadcast_to(profile, (r.size, th.size)).copy()
        out = basis.analyze(GridField(vals))
        out.coeffs[0, 0, 0] -= basis.mean(basis.synthesize(out))
    elif name == "j1_second":
        vals = bessel_j(1, bessel_zero(1, 2) * r) * np.cos(th)
        out = basis.analyze(GridField(np.broadcast_to(vals, (r.size, th.size)).copy()))
    elif name == "random":
        # the envelope keeps the field well inside the resolved band, so
        # long runs stay conservative instead of cascading to the cutoff
        rng = np.random.default_rng(seed)
        k = basis.spec.k_radial
        envelope = (np.exp(-0.8 * np.arange(basis.n_orders))[:, None, None]
                    * np.exp(-0.6 * np.arange(k))[None, None, :])
        coeffs = rng.standard_normal((basis.n_orders, 2, k)) * envelope
        coeffs[0, 1, :] = 0.0
        out = SpectralField(coeffs)
        out.coeffs[0, 0, 0] -= basis.mean(basis.synthesize(out))
    else:
        raise ValueError(f"unknown perturbation {name!r}; "
                         f"choose from {PERTURBATION_NAMES}")
    return _normalize(basis, out)


def run_stability_experiment(basis: DiskBasis, orbit: Orbit,
                             perturbation: SpectralField, eps: float,
                             config: SolverConfig,
                             perturbation_name: str = "custom") -> StabilityReport:
    """Evolve orbit point + eps * perturbation and measure orbit distances.

    The perturbation must have unit L2 norm. When the initial data has
    nonzero mean the run is performed in the rotating frame on the lifted
    mean-zero field w, and fixed-frame distances are recovered by undoing
    the rotation and subtracting the constant vorticity shift. The family
    distance series is recorded in the mean-zero frame, where its growth
    factor bound applies. A run cut short by a blow-up guard is returned
    with truncated=True.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    norm = math.sqrt(enstrophy(basis, perturbation))
    if abs(norm - 1.0) > 1e-6:
        raise ValueError(f"perturbation must be unit-norm, got ||p|| = {norm}")

    omega0 = orbit_point(basis, orbit) + eps * perturbation
    mean0 = basis.mean(basis.synthesize(omega0))
    rotation_rate = -0.5 * mean0
    lifted = abs(rotation_rate) > 1e-13
    if lifted:
        sim_field = omega0.copy()
        sim_field.coeffs[0, 0, 0] += 2.0 * rotation_rate
    else:
        sim_field = omega0

    truncated = False
    try:
        traj = simulate(basis, sim_field, config)
    except BlowUpError as err:
        if err.trajectory is None:
            raise
        traj = err.trajectory
        truncated = True

    times, d_orbit, d_rot, d_v, coords_list = [], [], [], [], []
    for t, snap in zip(traj.times, traj.snapshots):
        if lifted:
            fixed = rotate_field(snap, -rotation_rate * t)
            fixed.coeffs[0, 0, 0] -= 2.0 * rotation_rate
        else:
            fixed = snap
        times.append(t)
        d_orbit.append(dist_to_orbit(basis, fixed, orbit))
        d_rot.append(dist_to_orbit(basis, snap, orbit))
        d_v.append(dist_to_steady(basis, snap))
        coords_list.append(project_steady(basis, fixed))

    report = StabilityReport(
        orbit=orbit, epsilon=eps, perturbation=perturbation_name,
        times=times, dist_orbit=d_orbit, dist_orbit_rotating=d_rot,
        dist_v=d_v, ledgers=traj.ledgers, coords=coords_list,
        mean_omega=mean0, rotation_rate=rotation_rate, truncated=truncated,
    )
    report.sup_dist_orbit = max(d_orbit) if d_orbit else math.nan
    bound = stability_bound(orbit, d_orbit[0], 1.0) if d_orbit else 0.0
    report.empirical_constant = (report.sup_dist_orbit / bound
                                 if bound > 0 else math.nan)
    report.growth_ratio = (max(d_v) / d_v[0] if d_v and d_v[0] > 0
                           else math.nan)
    return report


def report_csv_text(report: StabilityReport) -> str:
    """CSV serialization: one row per saved time plus a summary footer."""
    lines = ["t,dist_orbit,dist_V,E,I,J,EC,A_prime,B_prime,alpha_prime,mean_omega"]
    for i, t in enumerate(report.times):
        led = report.ledgers[i]
        c = report.coords[i]
        row = (t, report.dist_orbit[i], report.dist_v[i], led.energy,
               led.impulse, led.enstrophy, led.energy_casimir,
               c.a, c.b_mag, c.phase, report.mean_omega)
        lines.append(",".join(f"{v:.17g}" for v in row))
    lines.append(f"# sup_dist_orbit={report.sup_dist_orbit:.17g}, "
                 f"empirical_constant={report.empirical_constant:.17g}, "
                 f"growth_ratio={report.growth_ratio:.17g}")
    return "\n".join(lines) + "\n"


def write_report_csv(report: StabilityReport, path) -> None:
    with open(path, "w") as handle:
        handle.write(report_csv_text(report))
