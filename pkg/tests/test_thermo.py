"""Thermodynamic bookkeeping: entropy, work quadrature, entropy balance."""

from __future__ import annotations

import math

import numpy as np
import pytest

import lzbath as lz
from lzbath.errors import InvalidStateError
from lzbath.propagator import Frame
from lzbath.rates import build_rate_table

from _cases import model


class TestVonNeumannEntropy:
    def test_pure_state(self):
        assert lz.von_neumann_entropy(np.diag([1.0, 0.0]).astype(complex)) == 0.0

    def test_maximally_mixed(self):
        s = lz.von_neumann_entropy(np.eye(2, dtype=complex) / 2.0)
        assert s == pytest.approx(math.log(2.0), rel=1e-14)

    def test_thermal_state_closed_form(self):
        # gap 2*eps at temperature eps: populations 1/(1+e^2) and e^2/(1+e^2),
        # so S = ln(1+e^-2) + 2/(1+e^2) = 0.365334 nats by direct eigenvalue
        # arithmetic
        lam = 1.0 / (1.0 + math.e**2)
        rho = np.diag([lam, 1.0 - lam]).astype(complex)
        expected = math.log(1.0 + math.e**-2) + 2.0 / (1.0 + math.e**2)
        got = lz.von_neumann_entropy(rho)
        assert got == pytest.approx(expected, rel=1e-13)
        assert got == pytest.approx(0.365334, abs=5e-6)

    def test_small_negativity_clamped(self):
        rho = np.diag([1.0 + 1e-7, -1e-7]).astype(complex)
        assert lz.von_neumann_entropy(rho) >= 0.0

    def test_large_negativity_rejected(self):
        rho = np.diag([1.0 + 1e-4, -1e-4]).astype(complex)
        with pytest.raises(InvalidStateError):
            lz.von_neumann_entropy(rho)

    def test_accepts_density_matrix_wrapper(self):
        dm = lz.DensityMatrix(np.eye(2, dtype=complex) / 2.0, Frame.LAB)
        assert lz.von_neumann_entropy(dm) == pytest.approx(math.log(2.0), rel=1e-14)


class TestAccumulate:
    def test_closed_system_heat_and_entropy(self):
        # slow sweep so the work integrand is smooth and the quadrature is
        # genuinely converged; heat must then vanish identically
        mp = model(v=0.1, gamma=0.0)
        recs = lz.evolve(mp, lz.EvolutionMode.full(), lz.DensityMatrix.diabatic_up())
        th = lz.accumulate(recs, mp)
        assert max(abs(t.q) for t in th) <= 1e-5
        assert max(abs(t.s_vn - th[0].s_vn) for t in th) <= 1e-8
        assert abs(th[-1].ds_irr) <= 1e-6

    def test_adiabatic_closed_cycle_work(self):
        mp = model(v=0.01, gamma=0.0)
        frame = lz.eigenframe(mp.t0, mp)
        rho0 = lz.DensityMatrix(np.outer(frame.vec_g, frame.vec_g).astype(complex),
                                Frame.LAB)
        recs = lz.evolve(mp, lz.EvolutionMode.full(), rho0)
        th = lz.accumulate(recs, mp)
        assert abs(th[-1].w) <= 1e-4 * mp.eps

    def test_first_law_closure_dissipative(self):
        mp = model(v=1.0, temperature=25.0)
        recs = lz.evolve(mp, lz.EvolutionMode.full(), lz.thermal_state(mp, mp.t0))
        th = lz.accumulate(recs, mp)
        worst = max(abs((t.u - th[0].u) - t.w - t.q) for t in th)
        assert worst <= 1e-8 * mp.eps

    def test_gibbs_start_produces_nonnegative_entropy_production(self):
        mp = model(v=1.0, temperature=10.0)
        recs = lz.evolve(mp, lz.EvolutionMode.full(), lz.thermal_state(mp, mp.t0))
        th = lz.accumulate(recs, mp)
        assert th[-1].ds_irr >= -1e-6

    def test_work_grid_convergence(self):
        # tight integrator tolerances isolate the quadrature error from the
        # trajectory's own tolerance noise
        mp = model(v=1.0, temperature=10.0)
        table = build_rate_table(mp, 8.0)
        w_final = []
        for ppt in (16.0, 32.0):
            recs = lz.evolve(mp, lz.EvolutionMode.full(), lz.thermal_state(mp, mp.t0),
                             rates=table, output_points_per_tau=ppt,
                             rtol=1e-10, atol=1e-12)
            w_final.append(lz.accumulate(recs, mp)[-1].w)
        assert abs(w_final[1] - w_final[0]) <= 1e-6 * mp.eps

    def test_entropy_production_nonmonotone_in_velocity(self):
        # reduced log grid; the hump at intermediate velocity survives it
        from lzbath.harness import RunConfig, run_sweep
        cfg = RunConfig.from_dict({
            "temperature": 10.0,
            "sweep": {"axis": "v", "scale": "log", "start": 0.05, "stop": 50.0,
                      "points": 9},
            "workers": 2}, command="thermo")
        rows = run_sweep(cfg)
        ds = [r.ds_irr for r in rows]
        assert any(ds[i] > ds[i - 1] and ds[i] > ds[i + 1]
                   for i in range(1, len(ds) - 1))

    def test_entropy_bounds(self):
        mp = model(v=1.0, temperature=25.0)
        recs = lz.evolve(mp, lz.EvolutionMode.full(), lz.thermal_state(mp, mp.t0))
        th = lz.accumulate(recs, mp)
        for t in th:
            assert -1e-12 <= t.s_vn <= math.log(2.0) + 1e-12

    def test_nonuniform_grid_accepted(self):
        # the work accumulator rides on the integrator, so uneven sampling is fine
        mp = model(v=1.0, gamma=0.0)
        grid = np.concatenate([np.linspace(mp.t0, 0.0, 200),
                               np.linspace(0.0, mp.tf, 100)[1:]])
        recs = lz.evolve(mp, lz.EvolutionMode.full(), lz.DensityMatrix.diabatic_up(),
                         output_grid=grid)
        th = lz.accumulate(recs, mp)
        assert math.isfinite(th[-1].w)

    def test_non_monotone_grid_rejected(self):
        mp = model(v=1.0, gamma=0.0)
        recs = lz.evolve(mp, lz.EvolutionMode.full(), lz.DensityMatrix.diabatic_up(),
                         output_grid=np.linspace(mp.t0, mp.tf, 33))
        with pytest.raises(ValueError):
            lz.accumulate(list(reversed(recs)), mp)

    def test_short_trajectory_rejected(self):
        mp = model(v=1.0, gamma=0.0)
        recs = lz.evolve(mp, lz.EvolutionMode.full(), lz.DensityMatrix.diabatic_up(),
                         output_grid=np.array([mp.t0, mp.tf]))
        with pytest.raises(ValueError):
            lz.accumulate(recs[:1], mp)
