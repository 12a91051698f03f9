"""Text snapshot format for grid and spectral fields.

Header lines fix the resolution and the kind, then one record per entry:
grid records are ``i,j,value`` and spectral records are ``n,<c|s>,m,value``
with values printed to 17 significant digits.
"""

from __future__ import annotations

import numpy as np

from .basis import GridField, SpectralField

__all__ = ["SnapshotError", "write_snapshot", "read_snapshot"]


class SnapshotError(ValueError):
    """Malformed snapshot file."""


def write_snapshot(path, field, n_theta: int, k_radial: int) -> None:
    with open(path, "w") as handle:
        handle.write(snapshot_text(field, n_theta, k_radial))


def snapshot_text(field, n_theta: int, k_radial: int) -> str:
    lines = [f"n_theta={n_theta}", f"k_radial={k_radial}"]
    if isinstance(field, GridField):
        lines.append("kind=grid")
        vals = field.values
        for i in range(vals.shape[0]):
            for j in range(vals.shape[1]):
                lines.append(f"{i},{j},{vals[i, j]:.17g}")
    elif isinstance(field, SpectralField):
        lines.append("kind=spectral")
        coeffs = field.coeffs
        for n in range(coeffs.shape[0]):
            for p, tag in enumerate("cs"):
                for m in range(coeffs.shape[2]):
                    lines.append(f"{n},{tag},{m},{coeffs[n, p, m]:.17g}")
    else:
        raise TypeError(f"cannot snapshot a {type(field).__name__}")
    return "\n".join(lines) + "\n"


def read_snapshot(path):
    """Parse a snapshot file into (n_theta, k_radial, field)."""
    with open(path) as handle:
        lines = [ln.strip() for ln in handle if ln.strip()]
    try:
        header = dict(ln.split("=", 1) for ln in lines[:3])
        n_theta = int(header["n_theta"])
        k_radial = int(header["k_radial"])
        kind = header["kind"]
    except (ValueError, KeyError, IndexError) as err:
        raise SnapshotError(f"bad snapshot header: {err}") from err

    records = lines[3:]
    try:
        if kind == "grid":
            vals = np.zeros((k_radial, n_theta))
            for ln in records:
                i, j, v = ln.split(",")
                vals[int(i), int(j)] = float(v)
            return n_theta, k_radial, GridField(vals)
        if kind == "spectral":
            n_orders = n_theta // 2
            m_max = -1
            entries = []
            for ln in records:
                n, tag, m, v = ln.split(",")
                entries.append((int(n), 0 if tag == "c" else 1, int(m), float(v)))
                m_max = max(m_max, int(m))
            coeffs = np.zeros((n_orders, 2, m_max + 1))
            for n, p, m, v in entries:
                coeffs[n, p, m] = v
            return n_theta, k_radial, SpectralField(coeffs)
    except (ValueError, IndexError) as err:
        raise SnapshotError(f"bad snapshot record: {err}") from err
    raise SnapshotError(f"unknown snapshot kind {kind!r}")
