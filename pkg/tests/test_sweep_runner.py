"""Tests for the cached coupler-flux sweep."""

import math

import pytest

from fluxguide.constants import TWO_PI
from fluxguide.exceptions import BracketError, ConfigurationError
from fluxguide.models import MatrixElements, SymmetryPoint
from fluxguide.schemas import RunConfig
from fluxguide.workers import sweep_runner
from fluxguide.workers.sweep_runner import COUPLING_COLUMNS, SweepRunner, sweep_values


@pytest.fixture
def fake_physics(monkeypatch):
    """Replace the circuit solves with closed forms; f_beta above 0.45 has no minimum."""
    calls = []

    def fake_symmetry_point(params, f_beta, solver=None, bracket=None, xtol=None):
        calls.append(f_beta)
        if f_beta > 0.45:
            raise BracketError(f"no interior minimum at f_beta={f_beta}")
        return SymmetryPoint(f_beta=f_beta, f_eps_sym=0.433, delta=TWO_PI * 5e9 * (1 + f_beta))

    def fake_matrix_elements(params, bias, solver=None, grid_points=None):
        return MatrixElements(
            gamma5_01=0.01 * bias.f_beta,
            gamma5_diag_diff=0.02,
            sin_half_01=None,
            dh_dfeps_01=1e-24,
            dh_dfbeta_01=1e-25,
            omega10=TWO_PI * 5e9,
        )

    monkeypatch.setattr(sweep_runner, "symmetry_point", fake_symmetry_point)
    monkeypatch.setattr(sweep_runner, "matrix_elements", fake_matrix_elements)
    return calls


def test_sweep_values_inclusive():
    assert sweep_values(0.36, 0.38, 0.005) == [0.36, 0.365, 0.37, 0.375, 0.38]
    assert sweep_values(0.4, 0.4, 0.01) == [0.4]


def test_inverted_range_is_empty():
    assert sweep_values(0.44, 0.36, 0.01) == []


@pytest.mark.parametrize("start,stop,step", [(0.3, 0.4, 0.0), (0.3, 0.4, -0.01), (0.0, 1.5, 0.1)])
def test_sweep_values_rejects(start, stop, step):
    with pytest.raises(ConfigurationError):
        sweep_values(start, stop, step)


def test_rows_follow_input_order(fake_physics):
    runner = SweepRunner(RunConfig())
    f_values = [0.40, 0.36, 0.38]
    rows, stats = runner.run_once(f_values)

    assert [r["f_beta"] for r in rows] == f_values
    assert stats == {"processed": 3, "cached": 0, "computed": 3, "failed": 0}
    assert set(rows[0]) == set(COUPLING_COLUMNS)
    assert rows[1]["delta_Hz"] == pytest.approx(5e9 * 1.36)
    assert rows[1]["gamma5_01_abs"] == pytest.approx(0.0036)
    assert rows[0]["error"] == ""


def test_cache_reused_on_rerun(fake_physics, tmp_path):
    f_values = sweep_values(0.36, 0.40, 0.01)
    first, stats = SweepRunner(RunConfig(), tmp_path).run_once(f_values)
    assert stats["computed"] == 5
    calls_after_first = len(fake_physics)

    second, stats = SweepRunner(RunConfig(), tmp_path).run_once(f_values)
    assert stats == {"processed": 5, "cached": 5, "computed": 0, "failed": 0}
    assert len(fake_physics) == calls_after_first
    assert second == first


def test_cache_keyed_by_config(fake_physics, tmp_path):
    SweepRunner(RunConfig(), tmp_path).run_once([0.4])
    other = RunConfig.model_validate({"line": {"z0_ohm": 75.0}})
    _, stats = SweepRunner(other, tmp_path).run_once([0.4])
    assert stats["cached"] == 0


def test_corrupt_cache_entry_recomputed(fake_physics, tmp_path):
    runner = SweepRunner(RunConfig(), tmp_path)
    runner.run_once([0.4])
    for path in tmp_path.glob("coupling-*.json"):
        path.write_text("{not json")
    _, stats = runner.run_once([0.4])
    assert stats["computed"] == 1


def test_failures_recorded_and_sweep_continues(fake_physics, tmp_path):
    rows, stats = SweepRunner(RunConfig(), tmp_path, max_workers=2).run_once([0.44, 0.46, 0.40])

    assert stats == {"processed": 3, "cached": 0, "computed": 2, "failed": 1}
    failed = rows[1]
    assert failed["f_beta"] == 0.46
    assert failed["error"].startswith("BracketError: no interior minimum")
    assert math.isnan(failed["gamma1_Hz"])
    assert len(list(tmp_path.glob("coupling-*.json"))) == 2


def test_unknown_kind():
    with pytest.raises(ConfigurationError):
        SweepRunner(RunConfig()).run_once([0.4], kind="spectrum")
