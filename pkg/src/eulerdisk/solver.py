"""Time integration of the vorticity equation on the disk basis, plus the
rotating-frame reduction that renders arbitrary initial data mean-zero.

The advection term is formed pseudospectrally on the dealiased grid and the
trajectory is advanced with classical fixed-step RK4. Nothing is filtered
by default: conservation drift is monitored, not enforced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import BasisSpec, DiskBasis, SpectralField
from .functionals import ConservedLedger, make_ledger

__all__ = [
    "BlowUpError",
    "StepSizeError",
    "SolverConfig",
    "Trajectory",
    "nonlinear_term",
    "step",
    "simulate",
    "rotate_field",
    "rotate_and_lift",
]


class BlowUpError(RuntimeError):
    """Field values left the trust region; carries the last valid time."""

    def __init__(self, message: str, last_time: float, trajectory=None):
        super().__init__(message)
        self.last_time = last_time
        self.trajectory = trajectory


class StepSizeError(RuntimeError):
    """The advective CFL guard was violated."""


@dataclass
class SolverConfig:
    dt: float
    t_end: float
    save_every: int = 10
    basis: BasisSpec | None = None
    cfl_limit: float = 0.5
    blowup_factor: float = 1e3
    high_mode_filter: bool = False

    def __post_init__(self):
        if self.dt <= 0 or self.t_end <= 0:
            raise ValueError("dt and t_end must be positive")
        if self.save_every < 1:
            raise ValueError("save_every must be a positive integer")


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    snapshots: list[SpectralField] = field(default_factory=list)
    ledgers: list[ConservedLedger] = field(default_factory=list)


def _advection(basis: DiskBasis, coeffs: np.ndarray) -> np.ndarray:
    """Spectral coefficients of -(v . grad) omega, dealiased by padding.

    Both advective products carry exactly one 1/r factor, so the transport
    term collapses to (dpsi/dth dw/dr - dpsi/dr dw/dth) / r; the four
    derivative fields are synthesized on the product grid in one batch.
    """
    k = basis.spec.k_radial
    psi = basis._green_apply(coeffs)
    four = np.zeros((4, basis.n_orders, 2, k + 2))
    four[0] = basis._dtheta_coeffs(psi)
    four[1] = basis._dr_coeffs(psi)
    four[2, :, :, :k] = basis._dr_coeffs(coeffs)
    four[3, :, :, :k] = basis._dtheta_coeffs(coeffs)
    vals = basis._synth_pad @ four.reshape(4 * basis.n_orders * 2, k + 2).T
    vals = vals.reshape(basis.k_pad, 4, basis.n_orders, 2).transpose(1, 0, 2, 3)
    grids = basis._angular_synthesis(vals, basis.n_theta_pad)
    flux = (grids[0] * grids[2] - grids[1] * grids[3]) / basis.r_pad[:, None]
    return basis._analyze_pad_grid(-flux)


def nonlinear_term(basis: DiskBasis, omega: SpectralField) -> SpectralField:
    """Right-hand side of the vorticity equation, -(v . grad) omega."""
    basis._check_spectral(omega)
    return SpectralField(_advection(basis, omega.coeffs))


def _rk4(basis: DiskBasis, coeffs: np.ndarray, dt: float) -> np.ndarray:
    k1 = _advection(basis, coeffs)
    k2 = _advection(basis, coeffs + 0.5 * dt * k1)
    k3 = _advection(basis, coeffs + 0.5 * dt * k2)
    k4 = _advection(basis, coeffs + dt * k3)
    return coeffs + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def step(basis: DiskBasis, omega: SpectralField, dt: float) -> SpectralField:
    """One classical fourth-order Runge-Kutta step of size dt."""
    basis._check_spectral(omega)
    return SpectralField(_rk4(basis, omega.coeffs, dt))


def _cfl_number(basis: DiskBasis, coeffs: np.ndarray, dt: float) -> float:
    """Advective CFL number as a fraction of the RK4 stability radius.

    The local rate is |v_r|/dr + |v_t|/(r dtheta); dividing the resulting
    dt * rate by 2 sqrt(2), the imaginary-axis radius of classical RK4,
    makes 1.0 the linear stability boundary.
    """
    v_r, v_t = basis.velocity(SpectralField(coeffs))
    r = basis.r
    dr = np.empty_like(r)
    dr[1:-1] = 0.5 * (r[:-2] - r[2:])
    dr[0] = r[0] - r[1]
    dr[-1] = r[-2] - r[-1]
    dtheta = 2.0 * math.pi / basis.spec.n_theta
    rate = np.abs(v_r.values) / dr[:, None] + np.abs(v_t.values) / (r[:, None] * dtheta)
    return float(rate.max() * dt / (2.0 * math.sqrt(2.0)))


_FILTER_ORDER = 16
_FILTER_STRENGTH = 36.0


def _mode_filter(basis: DiskBasis) -> np.ndarray:
    n_frac = np.arange(basis.n_orders) / max(basis.n_max, 1)
    m_frac = np.arange(basis.spec.k_radial) / (basis.spec.k_radial - 1)
    damp_n = np.exp(-_FILTER_STRENGTH * n_frac**_FILTER_ORDER)
    damp_m = np.exp(-_FILTER_STRENGTH * m_frac**_FILTER_ORDER)
    return damp_n[:, None, None] * damp_m[None, None, :]


def simulate(basis: DiskBasis, omega0: SpectralField, config: SolverConfig) -> Trajectory:
    """Advance omega0 to t_end, recording snapshots and conserved ledgers.

    Raises StepSizeError when the CFL guard trips and BlowUpError (carrying
    the partial trajectory) when field values become non-finite or exceed
    the blow-up factor times the initial amplitude.
    """
    basis._check_spectral(omega0)
    if config.basis is not None and config.basis != basis.spec:
        raise ValueError("config.basis disagrees with the provided basis")
    coeffs = omega0.coeffs.copy()
    cfl0 = _cfl_number(basis, coeffs, config.dt)
    if cfl0 > config.cfl_limit:
        raise StepSizeError(
            f"initial CFL number {cfl0:.3g} exceeds limit {config.cfl_limit}")

    traj = Trajectory()
    traj.times.append(0.0)
    traj.snapshots.append(SpectralField(coeffs.copy()))
    traj.ledgers.append(make_ledger(basis, traj.snapshots[0], 0.0))
    amp0 = max(np.abs(basis.synthesize(omega0).values).max(), 1e-12)

    filt = _mode_filter(basis) if config.high_mode_filter else None
    n_steps = int(round(config.t_end / config.dt))
    for s in range(1, n_steps + 1):
        coeffs = _rk4(basis, coeffs, config.dt)
        if filt is not None:
            coeffs = coeffs * filt
        if s % config.save_every == 0 or s == n_steps:
            t = s * config.dt
            if not np.all(np.isfinite(coeffs)):
                raise BlowUpError(f"non-finite field at t = {t:.6g}",
                                  traj.times[-1], traj)
            snap = SpectralField(coeffs.copy())
            amp = np.abs(basis.synthesize(snap).values).max()
            if amp > config.blowup_factor * amp0:
                raise BlowUpError(
                    f"amplitude {amp:.3g} exceeds {config.blowup_factor} x initial "
                    f"at t = {t:.6g}", traj.times[-1], traj)
            cfl = _cfl_number(basis, coeffs, config.dt)
            if cfl > config.cfl_limit:
                raise StepSizeError(
                    f"CFL number {cfl:.3g} exceeds limit {config.cfl_limit} "
                    f"at t = {t:.6g}; reduce dt")
            traj.times.append(t)
            traj.snapshots.append(snap)
            traj.ledgers.append(make_ledger(basis, snap, t))
    return traj


def rotate_field(omega: SpectralField, beta: float) -> SpectralField:
    """Compose with the clockwise rotation by beta: (r, t) -> omega(r, t - beta).

    Exact phase shift of the Fourier coefficients; no interpolation.
    """
    coeffs = omega.coeffs
    n = np.arange(coeffs.shape[0])
    c, s = np.cos(n * beta)[:, None], np.sin(n * beta)[:, None]
    out = np.empty_like(coeffs)
    out[:, 0, :] = c * coeffs[:, 0, :] - s * coeffs[:, 1, :]
    out[:, 1, :] = s * coeffs[:, 0, :] + c * coeffs[:, 1, :]
    return SpectralField(out)


def rotate_and_lift(basis: DiskBasis, omega0: SpectralField) -> tuple[SpectralField, float]:
    """Shift to the frame rotating at Omega = -mean(omega0)/2.

    Returns (w0, Omega) where w0 = omega0 + 2 Omega is mean-zero. Distances
    in the original frame are recovered by undoing the rotation and
    subtracting the constant 2 Omega.
    """
    basis._check_spectral(omega0)
    rotation_rate = -0.5 * basis.mean(basis.synthesize(omega0))
    lifted = omega0.copy()
    lifted.coeffs[0, 0, 0] += 2.0 * rotation_rate
    return lifted, rotation_rate
