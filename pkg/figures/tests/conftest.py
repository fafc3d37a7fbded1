"""Shared fixtures for the renderer tests."""

from __future__ import annotations

import pytest

from _csvgen import rates_rows, sweep_rows, trajectory_rows, write_csv
from lzfigures.reader import RATES_COLUMNS, SWEEP_COLUMNS, TRAJECTORY_COLUMNS


@pytest.fixture()
def csv_tree(tmp_path):
    """A full synthetic data directory covering all six figures."""
    root = tmp_path / "data"
    for v in ("0.1", "1.0"):
        for temperature in ("1.0", "25.0"):
            write_csv(root / "fig2" / f"v{v}_T{temperature}.csv", RATES_COLUMNS,
                      rates_rows())
            for mode in ("full", "no_nonadiabatic", "no_dissipation"):
                write_csv(root / "fig3" / f"v{v}_T{temperature}_{mode}.csv",
                          TRAJECTORY_COLUMNS, trajectory_rows())
    for i, temperature in enumerate(("0.1", "5.0", "25.0")):
        write_csv(root / "fig4" / f"T{temperature}.csv", SWEEP_COLUMNS,
                  sweep_rows(shift=0.01 * i))
        write_csv(root / "fig7" / f"T{temperature}.csv", SWEEP_COLUMNS,
                  sweep_rows(shift=0.005 * i))
    for fig in ("fig5", "fig6"):
        for temperature in ("1.0", "100.0"):
            write_csv(root / fig / f"vsweep_T{temperature}.csv", SWEEP_COLUMNS,
                      sweep_rows())
        for v in ("0.1", "10.0"):
            write_csv(root / fig / f"Tsweep_v{v}.csv", SWEEP_COLUMNS, sweep_rows())
    return root
