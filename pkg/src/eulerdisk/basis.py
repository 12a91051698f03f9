"""Discretization of the unit disk: Fourier collocation in the angle,
Chebyshev collocation in the radius, quadrature with the polar Jacobian,
the inverse Dirichlet Laplacian per angular mode, and velocity recovery.

The radial nodes are the Chebyshev-Lobatto points of [0, 1] with the r = 0
endpoint dropped, so the coordinate singularity never appears in any 1/r
factor. Radial quadrature weights are solved from the shifted-Chebyshev
moment conditions and integrate p(r) r dr exactly for polynomial degree
below the node count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as ncheb
from scipy.linalg import lu_factor, lu_solve

from .bessel import bessel_j, bessel_zero, mode_norm_sq

__all__ = [
    "ConfigurationError",
    "ShapeError",
    "BasisSpec",
    "GridField",
    "SpectralField",
    "DiskBasis",
    "build_basis",
    "evaluate_spectral",
]

TWO_PI = 2.0 * math.pi


class ConfigurationError(ValueError):
    """Requested resolution or padding outside the supported range."""


class ShapeError(ValueError):
    """Field dimensions do not match the owning basis."""


@dataclass(frozen=True)
class BasisSpec:
    """Resolution parameters: angular points, radial points, product padding."""

    n_theta: int = 32
    k_radial: int = 32
    dealias_pad: float = 1.5

    def __post_init__(self):
        if self.n_theta < 8 or self.n_theta % 2 != 0:
            raise ConfigurationError(
                f"n_theta must be even and at least 8, got {self.n_theta}")
        if self.k_radial < 8:
            raise ConfigurationError(
                f"k_radial must be at least 8, got {self.k_radial}")
        if not 1.0 <= self.dealias_pad <= 2.0:
            raise ConfigurationError(
                f"dealias_pad must lie in [1, 2], got {self.dealias_pad}")


@dataclass
class GridField:
    """Point values on the (radial node, angular node) collocation grid."""

    values: np.ndarray

    def copy(self) -> "GridField":
        return GridField(self.values.copy())


@dataclass
class SpectralField:
    """Coefficients indexed (angular order n, parity, radial Chebyshev index).

    Parity slot 0 holds cos(n theta) coefficients and slot 1 holds
    sin(n theta); the (0, sin) row is identically zero. The radial axis may
    exceed k_radial: stream functions carry two extra Chebyshev modes of
    headroom for the boundary and regularity rows of the Poisson solve.
    """

    coeffs: np.ndarray

    def copy(self) -> "SpectralField":
        return SpectralField(self.coeffs.copy())

    def __add__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(-self.coeffs)


def _chebyshev_line_integrals(count: int) -> np.ndarray:
    """int_{-1}^{1} T_m(u) du for m < count."""
    m = np.arange(count)
    out = np.zeros(count)
    even = m % 2 == 0
    out[even] = 2.0 / (1.0 - m[even] ** 2)
    return out


def _radial_nodes(k: int) -> np.ndarray:
    return (1.0 + np.cos(np.pi * np.arange(k) / k)) / 2.0


def _radial_weights(k: int) -> np.ndarray:
    """Weights with sum_i w_i p(r_i) = int_0^1 p(r) r dr for deg p < k."""
    line = _chebyshev_line_integrals(k + 2)
    moments = np.empty(k)
    for m in range(k):
        moments[m] = (line[m] + 0.5 * (line[m + 1] + line[abs(m - 1)])) / 4.0
    modes = np.cos(np.outer(np.arange(k), np.arange(k) * np.pi / k))
    return np.linalg.solve(modes, moments)


def _cheb_eval_matrices(u: np.ndarray, n_cols: int):
    """Value, first- and second-derivative matrices of T_m at the points u."""
    m0 = ncheb.chebvander(u, n_cols - 1)
    m1 = np.zeros((u.size, n_cols))
    m2 = np.zeros((u.size, n_cols))
    for m in range(1, n_cols):
        e = np.zeros(m + 1)
        e[m] = 1.0
        m1[:, m] = ncheb.chebval(u, ncheb.chebder(e))
        if m >= 2:
            m2[:, m] = ncheb.chebval(u, ncheb.chebder(e, 2))
    return m0, m1, m2


class DiskBasis:
    """Immutable precomputed grid, quadrature, transforms, and Poisson data.

    All factorizations are computed once at construction; afterwards every
    method is read-only and safe for concurrent use.
    """

    def __init__(self, spec: BasisSpec):
        self.spec = spec
        k = spec.k_radial
        nt = spec.n_theta
        self.n_max = nt // 2 - 1
        self.n_orders = self.n_max + 1
        self.theta = TWO_PI * np.arange(nt) / nt
        self.r = _radial_nodes(k)
        self.w_r = _radial_weights(k)

        # dealiased product grid
        self.k_pad = int(math.ceil(spec.dealias_pad * k))
        n_pad = int(math.ceil(spec.dealias_pad * nt))
        self.n_theta_pad = n_pad + (n_pad % 2)
        self.r_pad = _radial_nodes(self.k_pad)
        self.w_r_pad = _radial_weights(self.k_pad)

        # radial synthesis with psi headroom, and its padded counterpart
        u = 2.0 * self.r - 1.0
        self._synth = np.cos(np.outer(np.arange(k) * np.pi / k,
                                      np.arange(k + 2)))
        self._analyze_lu = lu_factor(self._synth[:, :k])
        self._synth_pad = np.cos(np.outer(np.arange(self.k_pad) * np.pi / self.k_pad,
                                          np.arange(k + 2)))
        self._ls_pad = np.linalg.pinv(self._synth_pad[:, :k])

        # derivative operator in coefficient space, chain factor 2 for [0,1]
        deriv = np.zeros((k + 2, k + 2))
        for m in range(1, k + 2):
            e = np.zeros(m + 1)
            e[m] = 1.0
            deriv[:m, m] = 2.0 * ncheb.chebder(e)
        self._deriv = deriv

        # per-mode Poisson systems: collocation rows at every node plus a
        # Dirichlet row at r = 1 and a regularity row at r = 0, row-scaled
        # before inversion because the 1/r^2 entries dominate near the
        # center; applications do one step of iterative refinement, which
        # pushes the collocation residual to rounding level
        m0, m1, m2 = _cheb_eval_matrices(u, k + 2)
        cols = np.arange(k + 2)
        dirichlet = np.ones(k + 2)
        self._green_system = np.empty((self.n_orders, k + 2, k + 2))
        self._green_inverse = np.empty((self.n_orders, k + 2, k + 2))
        self._green_scale = np.empty((self.n_orders, k + 2))
        for n in range(self.n_orders):
            operator = -(4.0 * m2
                         + (2.0 / self.r)[:, None] * m1
                         - (n ** 2 / self.r ** 2)[:, None] * m0)
            if n == 0:
                regularity = ((-1.0) ** (cols + 1)) * cols ** 2
            else:
                regularity = (-1.0) ** cols
            system = np.vstack([operator, dirichlet, regularity])
            scale = np.abs(system).max(axis=1)
            scaled = system / scale[:, None]
            self._green_system[n] = scaled
            self._green_inverse[n] = np.linalg.inv(scaled)
            self._green_scale[n] = scale

        # imported special-function constants for the steady mode family
        self.bessel_j11 = bessel_zero(1, 1)
        self.norm_v0 = mode_norm_sq(0)
        self.norm_v1 = mode_norm_sq(1)
        self.j0_r = bessel_j(0, self.bessel_j11 * self.r)
        self.j1_r = bessel_j(1, self.bessel_j11 * self.r)
        self.j0_radial_coeffs = lu_solve(self._analyze_lu, self.j0_r)
        self.j1_radial_coeffs = lu_solve(self._analyze_lu, self.j1_r)

    # -- shape helpers ----------------------------------------------------

    def zero_spectral(self) -> SpectralField:
        return SpectralField(np.zeros((self.n_orders, 2, self.spec.k_radial)))

    def zero_grid(self) -> GridField:
        return GridField(np.zeros((self.spec.k_radial, self.spec.n_theta)))

    def _check_grid(self, f: GridField):
        want = (self.spec.k_radial, self.spec.n_theta)
        if f.values.shape != want:
            raise ShapeError(f"grid field has shape {f.values.shape}, expected {want}")

    def _check_spectral(self, c: SpectralField):
        shape = c.coeffs.shape
        if (len(shape) != 3 or shape[0] != self.n_orders or shape[1] != 2
                or not self.spec.k_radial <= shape[2] <= self.spec.k_radial + 2):
            raise ShapeError(f"spectral field has shape {shape}, expected "
                             f"({self.n_orders}, 2, {self.spec.k_radial}..+2)")

    # -- transforms --------------------------------------------------------

    def _radial_values(self, coeffs: np.ndarray, padded: bool = False) -> np.ndarray:
        """Synthesize the radial direction only: (n, 2, m) -> (k, n, 2)."""
        n1, _, m = coeffs.shape
        synth = self._synth_pad if padded else self._synth
        vals = synth[:, :m] @ coeffs.reshape(n1 * 2, m).T
        return vals.reshape(-1, n1, 2)

    def _angular_synthesis(self, vals: np.ndarray, n_points: int) -> np.ndarray:
        """Inverse transform (..., n, 2) cos/sin amplitudes to grid values."""
        lead = vals.shape[:-2]
        spectrum = np.zeros(lead + (n_points // 2 + 1,), dtype=complex)
        spectrum[..., 0] = vals[..., 0, 0] * n_points
        upper = self.n_orders
        spectrum[..., 1:upper] = ((vals[..., 1:, 0] - 1j * vals[..., 1:, 1])
                                  * (n_points / 2))
        return np.fft.irfft(spectrum, n=n_points, axis=-1)

    def _angular_analysis(self, grid: np.ndarray) -> np.ndarray:
        """Forward transform grid values to (k, n, 2) cos/sin amplitudes."""
        n_points = grid.shape[1]
        spectrum = np.fft.rfft(grid, axis=1)
        vals = np.empty((grid.shape[0], self.n_orders, 2))
        vals[:, 0, 0] = spectrum[:, 0].real / n_points
        vals[:, 0, 1] = 0.0
        vals[:, 1:, 0] = 2.0 * spectrum[:, 1:self.n_orders].real / n_points
        vals[:, 1:, 1] = -2.0 * spectrum[:, 1:self.n_orders].imag / n_points
        return vals

    def synthesize(self, c: SpectralField) -> GridField:
        """Evaluate a spectral field on the collocation grid."""
        self._check_spectral(c)
        vals = self._radial_values(c.coeffs)
        return GridField(self._angular_synthesis(vals, self.spec.n_theta))

    def analyze(self, f: GridField) -> SpectralField:
        """Interpolate grid values into Fourier x Chebyshev coefficients."""
        self._check_grid(f)
        vals = self._angular_analysis(f.values)
        k = self.spec.k_radial
        coeffs = lu_solve(self._analyze_lu, vals.reshape(k, self.n_orders * 2))
        out = np.ascontiguousarray(coeffs.T.reshape(self.n_orders, 2, k))
        out[0, 1, :] = 0.0
        return SpectralField(out)

    def _synth_pad_grid(self, coeffs: np.ndarray) -> np.ndarray:
        vals = self._radial_values(coeffs, padded=True)
        return self._angular_synthesis(vals, self.n_theta_pad)

    def _analyze_pad_grid(self, grid: np.ndarray) -> np.ndarray:
        vals = self._angular_analysis(grid)
        k = self.spec.k_radial
        coeffs = self._ls_pad @ vals.reshape(self.k_pad, self.n_orders * 2)
        out = np.ascontiguousarray(coeffs.T.reshape(self.n_orders, 2, k))
        out[0, 1, :] = 0.0
        return out

    # -- quadrature ----------------------------------------------------------

    def integrate(self, f: GridField) -> float:
        """Quadrature approximation of the integral over the unit disk."""
        self._check_grid(f)
        return float(TWO_PI / self.spec.n_theta * (self.w_r @ f.values).sum())

    def integrate_pad(self, grid: np.ndarray) -> float:
        """Disk integral of values living on the dealiased product grid."""
        return float(TWO_PI / self.n_theta_pad * (self.w_r_pad @ grid).sum())

    def mean(self, f: GridField) -> float:
        """Average value over the disk (area pi)."""
        return self.integrate(f) / math.pi

    # -- Poisson solve and velocity -------------------------------------------

    def apply_green(self, omega: SpectralField) -> SpectralField:
        """Stream function of a vorticity field: -lap(psi) = omega, psi(1) = 0.

        Solved mode by mode against the precomputed bordered collocation
        inverses; the result carries k_radial + 2 radial coefficients.
        """
        self._check_spectral(omega)
        psi = self._green_apply(omega.coeffs)
        return SpectralField(psi)

    def _green_apply(self, coeffs: np.ndarray) -> np.ndarray:
        k = self.spec.k_radial
        vals = self._radial_values(coeffs)
        rhs = np.zeros((self.n_orders, k + 2, 2))
        rhs[:, :k, :] = vals.transpose(1, 0, 2) / self._green_scale[:, :k, None]
        sol = self._green_inverse @ rhs
        resid = rhs - self._green_system @ sol
        sol += self._green_inverse @ resid
        psi = np.ascontiguousarray(sol.transpose(0, 2, 1))
        psi[0, 1, :] = 0.0
        return psi

    def _dr_coeffs(self, coeffs: np.ndarray) -> np.ndarray:
        m = coeffs.shape[2]
        return coeffs @ self._deriv[:m, :m].T

    @staticmethod
    def _dtheta_coeffs(coeffs: np.ndarray) -> np.ndarray:
        n = np.arange(coeffs.shape[0])[:, None]
        out = np.empty_like(coeffs)
        out[:, 0, :] = n * coeffs[:, 1, :]
        out[:, 1, :] = -n * coeffs[:, 0, :]
        return out

    def velocity(self, omega: SpectralField) -> tuple[GridField, GridField]:
        """Velocity components (v_r, v_theta) of the flow induced by omega.

        v_r = (1/r) d(psi)/d(theta) and v_theta = -d(psi)/dr with
        psi = apply_green(omega); v_r vanishes on the boundary ring.
        """
        psi = self.apply_green(omega)
        v_r = self.synthesize(SpectralField(self._dtheta_coeffs(psi.coeffs)))
        v_r.values /= self.r[:, None]
        v_t = self.synthesize(SpectralField(self._dr_coeffs(psi.coeffs)))
        v_t.values *= -1.0
        return v_r, v_t


def build_basis(spec: BasisSpec) -> DiskBasis:
    """Construct the immutable disk basis for the given resolution."""
    return DiskBasis(spec)


def evaluate_spectral(field: SpectralField, r, theta):
    """Evaluate a spectral field at arbitrary points (r, theta).

    Used for cross-checks against reference grids; r and theta must
    broadcast against each other.
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    coeffs = field.coeffs
    n1 = coeffs.shape[0]
    radial = ncheb.chebval(2.0 * r - 1.0, coeffs.transpose(2, 0, 1))
    out = np.zeros(np.broadcast(r, theta).shape)
    for n in range(n1):
        out = out + radial[n, 0] * np.cos(n * theta) + radial[n, 1] * np.sin(n * theta)
    return out
