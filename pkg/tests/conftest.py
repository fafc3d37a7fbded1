"""Shared fixtures: JIT warm-up and common bath parameter sets."""

from __future__ import annotations

import numpy as np
import pytest

import lzbath as lz


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the hot kernels once so timed tests measure physics, not JIT."""
    bp = lz.BathParams(gamma=0.001, omega_c=10.0, temperature=25.0)
    mp = lz.ModelParams(v=1.0, eps=1.0, bath=bp, t0=-4.0, tf=4.0)
    lz.rate_set(0.0, mp)
    lz.evolve(mp, lz.EvolutionMode.full(), lz.DensityMatrix.diabatic_up(),
              output_grid=np.array([mp.t0, 0.0, mp.tf]), rate_points_per_tau=2.0)
    mp0 = lz.ModelParams(v=1.0, eps=1.0,
                         bath=lz.BathParams(gamma=0.0, omega_c=10.0, temperature=25.0),
                         t0=-4.0, tf=4.0)
    lz.evolve(mp0, lz.EvolutionMode.full(), lz.DensityMatrix.diabatic_up(),
              output_grid=np.array([mp0.t0, mp0.tf]))
    lz.unitary_solver(mp0, np.array([1.0, 0.0]))


@pytest.fixture()
def bath25():
    return lz.BathParams(gamma=0.001, omega_c=10.0, temperature=25.0)


@pytest.fixture()
def bath1():
    return lz.BathParams(gamma=0.001, omega_c=10.0, temperature=1.0)
