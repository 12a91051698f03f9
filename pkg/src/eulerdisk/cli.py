"""Command-line entry point: Bessel zero listings, trajectory runs,
stability experiment sweeps, and snapshot projection reports.

Config files are flat ``key = value`` text with dotted section prefixes.
All outputs are written to a temporary file and renamed into place, so a
failed run leaves no partial files.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from .basis import BasisSpec, ConfigurationError, build_basis
from .bessel import bessel_zero
from .snapshot import SnapshotError, read_snapshot, snapshot_text
from .solver import BlowUpError, SolverConfig, StepSizeError, simulate
from .stability import (Orbit, dist_to_orbit, dist_to_steady, make_perturbation,
                        orbit_point, project_steady, report_csv_text,
                        run_stability_experiment)

__all__ = ["main", "entrypoint", "ConfigFileError", "RunConfig", "parse_config"]


class ConfigFileError(ValueError):
    """Unreadable or malformed run configuration."""


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


_SCHEMA = {
    "basis.n_theta": int,
    "basis.k_radial": int,
    "basis.dealias_pad": float,
    "solver.dt": float,
    "solver.t_end": float,
    "solver.save_every": int,
    "initial.A": float,
    "initial.B": float,
    "initial.eps": float,
    "initial.perturbation": str,
    "initial.seed": int,
    "initial.constant": float,
    "experiment.A": float,
    "experiment.B": float,
    "experiment.eps": _float_list,
    "experiment.perturbation": str,
    "experiment.seed": int,
    "experiment.trials": int,
    "output.dir": str,
}


def parse_config(path) -> dict:
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except OSError as err:
        raise ConfigFileError(f"cannot read config {path}: {err}") from err
    out = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigFileError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigFileError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _SCHEMA[key](value)
        except ValueError as err:
            raise ConfigFileError(f"{path}:{lineno}: bad value for {key}: {err}") from err
    return out


class RunConfig:
    """Typed view over a parsed config with defaults filled in."""

    def __init__(self, raw: dict):
        self.raw = raw
        try:
            self.basis_spec = BasisSpec(
                n_theta=raw.get("basis.n_theta", 32),
                k_radial=raw.get("basis.k_radial", 32),
                dealias_pad=raw.get("basis.dealias_pad", 1.5),
            )
        except ConfigurationError as err:
            raise ConfigFileError(str(err)) from err
        missing = [k for k in ("solver.dt", "solver.t_end") if k not in raw]
        if missing:
            raise ConfigFileError(f"missing required keys: {missing}")
        self.solver = SolverConfig(
            dt=raw["solver.dt"],
            t_end=raw["solver.t_end"],
            save_every=raw.get("solver.save_every", 10),
            basis=self.basis_spec,
        )
        self.eps_list = raw.get("experiment.eps", [0.0])
        if any(e < 0 for e in self.eps_list):
            raise ConfigFileError("experiment.eps entries must be nonnegative")
        self.trials = raw.get("experiment.trials", 1)
        if self.trials < 1:
            raise ConfigFileError("experiment.trials must be at least 1")


def _write_atomic(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-eulerdisk-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _initial_field(basis, raw: dict):
    point = orbit_point(basis, Orbit(raw.get("initial.A", 0.0),
                                     raw.get("initial.B", 0.0)))
    eps = raw.get("initial.eps", 0.0)
    if eps:
        pert = make_perturbation(basis, raw.get("initial.perturbation", "j2_cos2"),
                                 raw.get("initial.seed", 0))
        point = point + eps * pert
    constant = raw.get("initial.constant", 0.0)
    if constant:
        point.coeffs[0, 0, 0] += constant
    return point


def cmd_zeros(args) -> int:
    for k in range(1, args.count + 1):
        print(f"{bessel_zero(args.n, k):.12f}")
    return 0


def cmd_simulate(args) -> int:
    cfg = RunConfig(parse_config(args.config))
    basis = build_basis(cfg.basis_spec)
    omega0 = _initial_field(basis, cfg.raw)
    os.makedirs(args.out, exist_ok=True)
    try:
        traj = simulate(basis, omega0, cfg.solver)
    except BlowUpError as err:
        print(f"blow-up detected; last valid time t = {err.last_time:.17g}",
              file=sys.stderr)
        return 3
    rows = ["t,E,I,J,EC,mean_omega"]
    for t, led in zip(traj.times, traj.ledgers):
        rows.append(",".join(f"{v:.17g}" for v in
                             (t, led.energy, led.impulse, led.enstrophy,
                              led.energy_casimir, led.mean_vorticity)))
    _write_atomic(os.path.join(args.out, "trajectory.csv"), "\n".join(rows) + "\n")
    _write_atomic(os.path.join(args.out, "final.snap"),
                  snapshot_text(traj.snapshots[-1], cfg.basis_spec.n_theta,
                                cfg.basis_spec.k_radial))
    return 0


def cmd_stability(args) -> int:
    cfg = RunConfig(parse_config(args.config))
    basis = build_basis(cfg.basis_spec)
    orbit = Orbit(cfg.raw.get("experiment.A", 0.0), cfg.raw.get("experiment.B", 1.0))
    name = cfg.raw.get("experiment.perturbation", "j2_cos2")
    seed = cfg.raw.get("experiment.seed", 0)
    os.makedirs(args.out, exist_ok=True)
    summary = ["trial,eps,perturbation,sup_dist_orbit,empirical_constant,growth_ratio"]
    for trial in range(cfg.trials):
        pert = make_perturbation(basis, name, seed + trial)
        for eps in cfg.eps_list:
            try:
                report = run_stability_experiment(basis, orbit, pert, eps,
                                                  cfg.solver, perturbation_name=name)
            except BlowUpError as err:
                print(f"blow-up detected; last valid time t = {err.last_time:.17g}",
                      file=sys.stderr)
                return 3
            if report.truncated:
                print(f"blow-up detected; last valid time t = "
                      f"{report.times[-1]:.17g}", file=sys.stderr)
                return 3
            stem = f"trial{trial}_eps{eps:g}.csv"
            _write_atomic(os.path.join(args.out, stem), report_csv_text(report))
            summary.append(
                f"{trial},{eps:.17g},{name},{report.sup_dist_orbit:.17g},"
                f"{report.empirical_constant:.17g},{report.growth_ratio:.17g}")
    _write_atomic(os.path.join(args.out, "summary.csv"), "\n".join(summary) + "\n")
    return 0


def cmd_project(args) -> int:
    n_theta, k_radial, field = read_snapshot(args.snapshot)
    basis = build_basis(BasisSpec(n_theta=n_theta, k_radial=k_radial))
    from .basis import GridField

    if isinstance(field, GridField):
        field = basis.analyze(field)
    coords = project_steady(basis, field)
    orbit = Orbit(args.A, args.B)
    print(f"A_prime = {coords.a:.12g}")
    print(f"B_prime = {coords.b_mag:.12g}")
    print(f"alpha_prime = {coords.phase:.12g}")
    print(f"dist_V = {dist_to_steady(basis, field):.12g}")
    print(f"dist_orbit = {dist_to_orbit(basis, field, orbit):.12g}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="eulerdisk",
        description="Disk Euler flow laboratory: zeros, runs, stability sweeps")
    sub = parser.add_subparsers(dest="command", required=True)

    p_zeros = sub.add_parser("zeros", help="print positive Bessel zeros")
    p_zeros.add_argument("--n", type=int, required=True)
    p_zeros.add_argument("--count", type=int, required=True)

    p_sim = sub.add_parser("simulate", help="advance a vorticity field")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", default=".")

    p_stab = sub.add_parser("stability", help="run perturbation experiments")
    p_stab.add_argument("--config", required=True)
    p_stab.add_argument("--out", default=".")

    p_proj = sub.add_parser("project", help="report orbit coordinates of a snapshot")
    p_proj.add_argument("--snapshot", required=True)
    p_proj.add_argument("--A", type=float, required=True)
    p_proj.add_argument("--B", type=float, required=True)

    args = parser.parse_args(argv)
    if args.command == "zeros":
        if args.n < 0 or args.count < 1:
            parser.error("zeros requires --n >= 0 and --count >= 1")
        return cmd_zeros(args)
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "stability":
            return cmd_stability(args)
        if args.command == "project":
            return cmd_project(args)
    except (ConfigFileError, SnapshotError, ConfigurationError, StepSizeError,
            OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
