"""Pseudospectral laboratory for the 2D incompressible Euler equation in the
unit disk: Bessel-mode steady states, conserved functionals, and
quantitative orbital-stability experiments.
"""

from .basis import (BasisSpec, ConfigurationError, DiskBasis, GridField,
                    ShapeError, SpectralField, build_basis, evaluate_spectral)
from .bessel import (BesselZeroTable, UnsupportedModeError, bessel_j,
                     bessel_j_prime, bessel_zero, mode_norm_sq)
from .functionals import (ConservedLedger, EvaluationError, casimir, energy,
                          energy_casimir, enstrophy, impulse, make_ledger)
from .snapshot import SnapshotError, read_snapshot, write_snapshot
from .solver import (BlowUpError, SolverConfig, StepSizeError, Trajectory,
                     nonlinear_term, rotate_and_lift, rotate_field, simulate,
                     step)
from .stability import (Orbit, PERTURBATION_NAMES, StabilityReport,
                        SteadyCoordinates, dist_to_orbit, dist_to_steady,
                        distance_growth_factor, first_eigenvalue,
                        make_perturbation, orbit_point, project_steady,
                        run_stability_experiment, second_eigenvalue,
                        stability_bound, write_report_csv)

__version__ = "0.1.0"

__all__ = [
    "BasisSpec", "BesselZeroTable", "BlowUpError", "ConfigurationError",
    "ConservedLedger", "DiskBasis", "EvaluationError", "GridField", "Orbit",
    "PERTURBATION_NAMES", "ShapeError", "SnapshotError", "SolverConfig",
    "SpectralField", "StabilityReport", "SteadyCoordinates", "StepSizeError",
    "Trajectory", "UnsupportedModeError", "bessel_j", "bessel_j_prime",
    "bessel_zero", "build_basis", "casimir", "dist_to_orbit",
    "dist_to_steady", "distance_growth_factor", "energy", "energy_casimir",
    "enstrophy", "evaluate_spectral", "first_eigenvalue", "impulse",
    "make_ledger", "make_perturbation", "mode_norm_sq", "nonlinear_term",
    "orbit_point", "project_steady", "read_snapshot", "rotate_and_lift",
    "rotate_field", "run_stability_experiment", "second_eigenvalue",
    "simulate", "stability_bound", "step", "write_report_csv",
    "write_snapshot",
]
