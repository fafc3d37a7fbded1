"""CSV ingestion with strict schema validation.

The column schemas below are the published file interface of the simulation
CLI; they are restated here (rather than imported) so this package depends
only on the files themselves.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

TRAJECTORY_COLUMNS = [
    "t", "t_over_tauLZ", "rho_ee_re", "rho_gg_re", "rho_eg_re", "rho_eg_im",
    "P_up", "P_down", "P_e", "P_g", "alpha_abs", "Gamma_p", "Gamma_m",
    "Gamma_z", "S_p", "S_m", "U", "W", "Q", "S_vn", "dS", "dS_e", "dS_irr",
    "T_eff",
]
SWEEP_COLUMNS = [
    "v", "v_over_eps2", "T", "T_over_eps", "P_v", "P_lz_exact", "dS", "dS_e",
    "dS_irr", "T_eff_final", "error",
]
RATES_COLUMNS = [
    "t", "t_over_tauLZ", "alpha_abs", "Gamma_p", "Gamma_m", "Gamma_z",
    "S_p", "S_m",
]

_TEXT_COLUMNS = {"error"}


class SchemaError(ValueError):
    """A CSV input does not carry the expected schema."""


def read_csv(path: str | Path, expected_columns: list[str]) -> dict[str, np.ndarray]:
    """Load one CSV into named columns, failing loudly on schema violations.

    Numeric columns become float arrays (nan/inf parse naturally); the error
    column stays as strings.  Raises SchemaError naming any missing column,
    and on empty files.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: file is empty")
    header, data = rows[0], rows[1:]
    missing = [c for c in expected_columns if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {missing}")
    extra = [c for c in header if c not in expected_columns]
    if extra:
        raise SchemaError(f"{path}: unexpected column(s) {extra}")
    if header != expected_columns:
        raise SchemaError(f"{path}: columns out of order: {header}")
    if not data:
        raise SchemaError(f"{path}: no data rows")

    out: dict[str, np.ndarray] = {}
    for i, name in enumerate(header):
        cells = [row[i] for row in data]
        if name in _TEXT_COLUMNS:
            out[name] = np.array(cells, dtype=object)
        else:
            try:
                out[name] = np.array([float(x) for x in cells])
            except ValueError as exc:
                raise SchemaError(f"{path}: non-numeric value in column {name!r}: {exc}") \
                    from exc
    return out


def read_group(csv_dir: str | Path, figure: str,
               expected_columns: list[str]) -> dict[str, dict[str, np.ndarray]]:
    """Read every <csv_dir>/<figure>/<label>.csv, keyed and ordered by label."""
    base = Path(csv_dir) / figure
    paths = sorted(base.glob("*.csv"))
    if not paths:
        raise SchemaError(f"no CSV inputs found under {base}")
    return {p.stem: read_csv(p, expected_columns) for p in paths}
