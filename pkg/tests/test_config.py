"""Tests for run-configuration loading and conversion."""

import pytest

from fluxguide.constants import DESIGN_AREAS_UM2, E_CHARGE, FITTED_IC, TWO_PI
from fluxguide.exceptions import ConfigurationError
from fluxguide.models import ChargeBasisConfig, PhaseGridConfig
from fluxguide.schemas import RunConfig
from fluxguide.utils import (
    circuit_params,
    config_hash,
    config_to_text,
    device_params,
    load_run_config,
    noise_model,
    parse_config_text,
    solver_config,
    write_config,
)


def test_empty_config_gives_fitted_device():
    cfg = parse_config_text("")
    params = circuit_params(cfg)
    assert params.ic == pytest.approx(FITTED_IC)
    assert isinstance(solver_config(cfg), ChargeBasisConfig)
    assert cfg.io.output_dir is None
    assert load_run_config(None) == cfg


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("[plotting]\ndpi = 300\n", "unknown section"),
        ("[solver]\nn_charges = 5\n", "solver.n_charges"),
        ("[circuit]\nic_uA = 0.1, 0.2\n", "circuit.ic_uA"),
        ("[solver]\ngrid_points = 4\n", "solver.grid_points"),
        ("[solver]\nbracket_low = 0.8\n", "solver"),
        ("[solver]\nbackend = spline\n", "solver.backend"),
        ("no section header\n", "<string>"),
    ],
)
def test_invalid_configs_name_the_problem(text, fragment):
    with pytest.raises(ConfigurationError) as exc:
        parse_config_text(text)
    assert fragment in str(exc.value)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_run_config(tmp_path / "absent.ini")


def test_blank_values_fall_back_to_defaults():
    cfg = parse_config_text("[circuit]\nc_fF =\n[solver]\nmax_iterations = none\n")
    assert cfg.circuit.c_fF is None
    assert cfg.solver.max_iterations is None


def test_unit_conversions():
    text = "\n".join(
        [
            "[circuit]",
            "ic_uA = 0.2, 0.1, 0.2, 0.4, 0.5, 0.2",
            "c_fF = 5, 3, 5, 8, 8, 4",
            "renormalization = true",
            "renormalization_delta_Hz = 6e9",
            "[noise]",
            "sqrt_a_eps_uphi0 = 2.0",
            "m_beta_pH = 0.5",
            "delta_al_ueV = 200",
            "[solver]",
            "backend = grid",
            "grid_points = 16",
        ]
    )
    cfg = parse_config_text(text)
    params = circuit_params(cfg)
    assert params.ic[3] == pytest.approx(0.4e-6)
    assert params.c_branch[0] == pytest.approx(5e-15)
    assert params.renormalization
    assert params.renormalization_omega10 == pytest.approx(TWO_PI * 6e9)

    noise = noise_model(cfg)
    assert noise.a_eps == pytest.approx(4e-12)
    assert noise.m_beta == pytest.approx(0.5e-12)
    assert noise.delta_al == pytest.approx(200e-6 * E_CHARGE)

    solver = solver_config(cfg)
    assert isinstance(solver, PhaseGridConfig)
    assert solver.grid_points == 16


def test_area_scaled_capacitances():
    cfg = parse_config_text("[circuit]\ncapacitance_scale_fF_per_um2 = 50\narea_um2 = 1, 2, 1, 3, 3, 1\n")
    params = circuit_params(cfg)
    assert params.c_branch == pytest.approx((50e-15, 100e-15, 50e-15, 150e-15, 150e-15, 50e-15))


def test_extra_capacitance_is_reshaped():
    values = ", ".join(["0"] * 15 + ["2"])
    params = circuit_params(parse_config_text(f"[circuit]\nc_extra_fF = {values}\n"))
    assert params.c_extra[3][3] == pytest.approx(2e-15)
    assert params.c_extra[0][0] == 0.0


def test_text_round_trip_and_hash(tmp_path):
    cfg = parse_config_text("[solver]\nn_charge = 3\n[line]\nt_tl_K = 0.042\n")
    again = parse_config_text(config_to_text(cfg))
    assert again == cfg
    assert config_hash(again) == config_hash(cfg)
    assert config_hash(cfg) != config_hash(RunConfig())

    path = write_config(cfg, tmp_path / "nested" / "run.ini")
    assert load_run_config(path) == cfg
    assert [p.name for p in path.parent.iterdir()] == ["run.ini"]


def test_ampere_currents_round_trip_exactly(rng):
    currents = [float(0.02 * i * (1 + 0.1 * rng.standard_normal())) for i in FITTED_IC]
    cfg = RunConfig.model_validate({"circuit": {"ic_A": currents, "ic_uA": [v * 1e6 for v in currents]}})
    again = parse_config_text(config_to_text(cfg))
    assert circuit_params(again).ic == tuple(currents)

    stale = parse_config_text(f"[circuit]\nic_A = {', '.join(map(repr, currents))}\nic_uA = 1, 1, 1, 1, 1, 1\n")
    assert circuit_params(stale).ic == tuple(currents)


def test_calibrated_device_scale(monkeypatch):
    from fluxguide.circuit import spectrum as spectrum_module

    area = DESIGN_AREAS_UM2[0]
    target = TWO_PI * 5.7e9
    monkeypatch.setattr(
        spectrum_module, "transition_frequency", lambda p, b, s=None: target * 70e-15 * area / p.c_branch[0]
    )
    plain = parse_config_text("")
    assert device_params(plain) == circuit_params(plain)

    cfg = parse_config_text("[circuit]\ncalibrate_scale = true\n")
    params = device_params(cfg)
    assert params.c_branch[0] == pytest.approx(70e-15 * area, rel=2e-6, abs=0)
    assert params.ic == circuit_params(cfg).ic


def test_calibration_gap_must_be_positive():
    with pytest.raises(ConfigurationError, match="circuit.calibration_delta_Hz"):
        parse_config_text("[circuit]\ncalibration_delta_Hz = 0\n")
