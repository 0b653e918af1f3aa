import math

import numpy as np
import pytest

from resonant_disk.continuation import (SCAN_COLUMNS, TRACE_COLUMNS, ContinuationConfig,
                                        Verdict, diagnose, run_continuation, scan_threshold,
                                        write_scan_csv, write_trace_csv)
from resonant_disk.errors import AdmissionError
from resonant_disk.forcing import ForcingSpec, build_forcing
from resonant_disk.grid import norm
from resonant_disk.nonlinear import residual

# frozen regression values at n = 512, f = -mu phi1
REGRESSION = {
    1.0: dict(sup=0.6802258240649288, T=-0.5950227828791184, omega=0.02635135274666679),
    4.0: dict(sup=1.4906649006821322, T=1.3780449224983893, omega=0.011599096012767976),
    8.0: dict(sup=2.5366425044649588, T=2.2196829563661615, omega=0.0636069650135404),
    12.0: dict(sup=3.220178135501915, T=2.6379231916877743, omega=0.1785512196899173),
}


@pytest.fixture(scope="module")
def traces(problem512):
    out = {}
    for mu in REGRESSION:
        f = build_forcing(ForcingSpec(amplitude=mu), problem512.eig, problem512.grid)
        p = problem512.with_forcing(f)
        out[mu] = (p, run_continuation(p))
    return out


@pytest.mark.parametrize("mu", sorted(REGRESSION))
def test_reaches_t1(traces, mu):
    p, trace = traces[mu]
    last = trace.final
    assert trace.verdict is Verdict.REACHED_T1
    assert last.t == 1.0
    assert last.residual_norm <= 1e-10
    assert float(norm(p.grid, residual(p, 1.0, last.u))) <= 1e-10
    assert last.sup_norm > 1e-3
    assert last.identity_residual <= 1e-8


@pytest.mark.parametrize("mu", sorted(REGRESSION))
def test_regression_values(traces, mu):
    last = traces[mu][1].final
    ref = REGRESSION[mu]
    assert last.sup_norm == pytest.approx(ref["sup"], abs=1e-9)
    assert last.T == pytest.approx(ref["T"], abs=1e-9)
    assert last.omega_norm == pytest.approx(ref["omega"], abs=1e-9)


@pytest.mark.parametrize("mu", sorted(REGRESSION))
def test_trace_invariants(traces, mu):
    p, trace = traces[mu]
    ts = [s.t for s in trace.states]
    assert ts[0] == 0.0 and all(b > a for a, b in zip(ts, ts[1:]))
    cfg = ContinuationConfig()
    for s in trace.states[1:]:
        assert cfg.min_step <= s.step <= cfg.max_step + 1e-15
        assert s.residual_norm <= cfg.newton_tol
        assert s.exp_mass >= 0
        assert 0.0 <= s.peak_radius < 1.0


def test_exp_mass_matches_forcing_mass_at_t1(traces):
    for mu, (_, trace) in traces.items():
        assert trace.final.exp_mass == pytest.approx(mu, abs=1e-8)


def test_states_solve_their_own_problem(traces):
    p, trace = traces[8.0]
    for s in trace.states[1:]:
        assert float(norm(p.grid, residual(p, s.t, s.u))) <= 1e-10


def test_diagnose_at_origin(problem512):
    s = diagnose(problem512, 0.0, np.zeros(problem512.grid.size))
    assert s.T == 0 and s.omega_norm == 0 and s.sup_norm == 0 and s.exp_mass == 0
    assert s.peak_radius == 0.0


def test_step_collapse_far_above_threshold(problem512):
    f = build_forcing(ForcingSpec(amplitude=40.0), problem512.eig, problem512.grid)
    with pytest.warns(UserWarning):
        trace = run_continuation(problem512.with_forcing(f))
    assert trace.verdict is Verdict.STEP_COLLAPSE
    assert trace.final.t < 1.0
    assert trace.rejections > 0
    assert "step fell below" in trace.message


def test_blow_up_cap(problem512):
    f = build_forcing(ForcingSpec(amplitude=8.0), problem512.eig, problem512.grid)
    trace = run_continuation(problem512.with_forcing(f), ContinuationConfig(blowup_cap=1.0))
    assert trace.verdict is Verdict.BLOW_UP
    assert trace.final.sup_norm <= 1.0


def test_admission_refused(problem512):
    f = build_forcing(ForcingSpec(amplitude=-1.0), problem512.eig, problem512.grid)
    with pytest.raises(AdmissionError):
        run_continuation(problem512.with_forcing(f))


def test_zero_forcing_mass_refused(problem512):
    with pytest.raises(AdmissionError):
        run_continuation(problem512)


@pytest.mark.parametrize("cfg", [
    ContinuationConfig(initial_step=0.0),
    ContinuationConfig(min_step=0.2),
    ContinuationConfig(newton_tol=-1.0),
    ContinuationConfig(grow=0.5),
    ContinuationConfig(shrink=1.0),
    ContinuationConfig(blowup_cap=0.0),
])
def test_config_problems(cfg):
    assert cfg.problems()


def test_default_config_valid():
    assert ContinuationConfig().problems() == []


def test_trace_csv(tmp_path, traces):
    path = tmp_path / "trace.csv"
    write_trace_csv(path, traces[4.0][1])
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(TRACE_COLUMNS)
    assert len(lines) == len(traces[4.0][1].states) + 1


def test_scan_rows_and_order(problem512, tmp_path):
    masses = [12.4, 1.0, -2.0, 8.0]
    rows = scan_threshold(ForcingSpec(), masses, problem512)
    assert [r.mass for r in rows] == masses
    assert rows[2].verdict == "refused"
    assert math.isnan(rows[2].sup_norm)
    assert all(r.verdict == "reached_t1" for i, r in enumerate(rows) if i != 2)
    par = scan_threshold(ForcingSpec(), masses, problem512, workers=2)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_scan_csv(a, rows)
    write_scan_csv(b, par)
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == ",".join(SCAN_COLUMNS)


def test_scan_gaussian_family(problem512):
    rows = scan_threshold(ForcingSpec("gaussian-bump", width=0.4), [2.0, 6.0], problem512)
    assert all(r.verdict == "reached_t1" for r in rows)
    assert rows[1].sup_norm > rows[0].sup_norm
    for r in rows:
        assert r.exp_mass == pytest.approx(r.mass, abs=1e-8)
