"""Standard trace probe and the CSV contract for recorded runs.

Column order is fixed: t, E, calE, calF, hardy_ratio, lyap_combo, u_l2,
damped_mass_accum, weighted_budget_lhs, weighted_budget_rhs.  Values are
written with 17 significant digits so identical runs produce identical
bytes.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import functionals as fn
from .multipliers import MultiplierParams, PhiSpec
from .profiles import DampingProfile

TRACE_COLUMNS = [
    "t",
    "E",
    "calE",
    "calF",
    "hardy_ratio",
    "lyap_combo",
    "u_l2",
    "damped_mass_accum",
    "weighted_budget_lhs",
    "weighted_budget_rhs",
]

__all__ = ["TRACE_COLUMNS", "StandardProbe", "write_trace_csv", "read_trace_csv"]


@dataclass
class StandardProbe:
    """Computes every per-sample functional of the trace contract."""

    params: MultiplierParams
    profile: DampingProfile
    spec: PhiSpec
    budget_rhs: float

    columns = tuple(TRACE_COLUMNS[1:])

    def sample(self, snap: fn.FieldSnapshot):
        hi = snap.hi
        u = snap.u[:hi]
        return (
            fn.energy(snap),
            fn.lyapunov_E(snap, self.params, self.profile, self.spec),
            fn.dissipation_F(snap, self.params, self.profile, self.spec),
            fn.hardy_ratio(snap),
            fn.lyapunov_combo(snap, self.params, self.spec),
            snap.integrate(u * u),
            snap.damped_mass,
            fn.budget_lhs(snap),
            self.budget_rhs,
        )


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_trace_csv(path: str | Path, columns: list[str], rows: np.ndarray) -> None:
    if list(columns) != TRACE_COLUMNS:
        raise ValueError(f"trace columns must be exactly {TRACE_COLUMNS}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in np.asarray(rows):
        writer.writerow([f"{v:.17g}" for v in row])
    _atomic_write_text(Path(path), buf.getvalue())


def read_trace_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = np.array([[float(v) for v in row] for row in reader])
    if header != TRACE_COLUMNS:
        raise ValueError(f"unexpected trace columns {header}")
    return header, rows
