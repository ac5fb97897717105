"""
Run configuration loading.

Reads the sectioned key/value file, validates it against RunConfig and
builds the domain objects the physics modules take.
"""

import configparser
import hashlib
import json
import logging
from pathlib import Path
from typing import Optional, Union

from pydantic import ValidationError

from ..constants import E_CHARGE, TWO_PI
from ..exceptions import ConfigurationError
from ..models import (
    ChargeBasisConfig,
    CircuitParams,
    FluxBias,
    NoiseModel,
    PhaseGridConfig,
    TransmissionLineParams,
)
from ..schemas import RunConfig
from .io import atomic_write_text

logger = logging.getLogger(__name__)

SECTIONS = ("circuit", "line", "solver", "noise", "io")


def parse_config_text(text: str, source: str = "<string>") -> RunConfig:
    """
    Validate INI text into a RunConfig.

    Raises:
        ConfigurationError: Unknown section or key, or an invalid value
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as e:
        raise ConfigurationError(f"{source}: {e}") from e

    unknown = [s for s in parser.sections() if s not in SECTIONS]
    if unknown:
        raise ConfigurationError(f"{source}: unknown section(s) {unknown}")

    raw = {section: dict(parser.items(section)) for section in parser.sections()}
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(p) for p in first["loc"])
        raise ConfigurationError(f"{source}: invalid config key '{key}': {first['msg']}") from e


def load_run_config(path: Optional[Union[str, Path]] = None) -> RunConfig:
    """Load a config file; None gives the defaults."""
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file not found: {path}")
    cfg = parse_config_text(path.read_text(), source=str(path))
    logger.debug(f"Loaded config {path} (hash {config_hash(cfg)[:12]})")
    return cfg


def config_hash(cfg: RunConfig) -> str:
    """SHA-256 of the canonical JSON dump."""
    canonical = json.dumps(cfg.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def circuit_params(cfg: RunConfig) -> CircuitParams:
    """Device parameters as written; ic_A takes precedence over ic_uA."""
    c = cfg.circuit
    ic = tuple(c.ic_A) if c.ic_A is not None else tuple(v * 1e-6 for v in c.ic_uA)
    if c.c_fF is not None:
        c_branch = tuple(v * 1e-15 for v in c.c_fF)
    else:
        scale = c.capacitance_scale_fF_per_um2 * 1e-15
        c_branch = tuple(scale * a for a in c.area_um2)
    c_extra = None
    if c.c_extra_fF is not None:
        flat = [v * 1e-15 for v in c.c_extra_fF]
        c_extra = tuple(tuple(flat[4 * i:4 * i + 4]) for i in range(4))
    return CircuitParams(
        ic=ic,
        c_branch=c_branch,
        c_extra=c_extra,
        z0=cfg.line.z0_ohm,
        l0=cfg.line.l0_per_m,
        c0=cfg.line.c0_per_m,
        renormalization=c.renormalization,
        renormalization_omega10=TWO_PI * c.renormalization_delta_Hz,
    )


def device_params(cfg: RunConfig) -> CircuitParams:
    """
    circuit_params, with every capacitance rescaled when calibrate_scale is set.

    The calibration solves for the capacitance scale that puts ω10 at the
    configured bias on calibration_delta_Hz. Explicit c_fF values are scaled
    by the same ratio to capacitance_scale_fF_per_um2.

    Raises:
        BracketError: If the target is not reachable inside the scale bracket
    """
    params = circuit_params(cfg)
    c = cfg.circuit
    if not c.calibrate_scale:
        return params
    from ..circuit import calibrate_capacitance_scale, with_scale

    nominal = c.capacitance_scale_fF_per_um2 * 1e-15
    scale = calibrate_capacitance_scale(
        lambda s: with_scale(params, nominal, s),
        target_omega=TWO_PI * c.calibration_delta_Hz,
        bias=FluxBias(c.calibration_f_beta, c.calibration_f_eps),
        solver=solver_config(cfg),
    )
    return with_scale(params, nominal, scale)


def line_params(cfg: RunConfig) -> TransmissionLineParams:
    return circuit_params(cfg).line


def solver_config(cfg: RunConfig) -> Union[ChargeBasisConfig, PhaseGridConfig]:
    s = cfg.solver
    common = {
        "k_levels": s.k_levels,
        "tol": s.tol,
        "max_iterations": s.max_iterations,
        "residual_tol": s.residual_tol,
        "memory_budget_mb": s.memory_budget_mb,
    }
    if s.backend == "grid":
        return PhaseGridConfig(grid_points=s.grid_points, **common)
    return ChargeBasisConfig(n_charge=s.n_charge, **common)


def noise_model(cfg: RunConfig) -> NoiseModel:
    n = cfg.noise
    return NoiseModel(
        a_eps=(n.sqrt_a_eps_uphi0 * 1e-6) ** 2,
        a_beta=(n.sqrt_a_beta_uphi0 * 1e-6) ** 2,
        t_line=n.t_line_K,
        m_eps=n.m_eps_pH * 1e-12,
        m_beta=n.m_beta_pH * 1e-12,
        x_qp=n.x_qp,
        delta_al=n.delta_al_ueV * 1e-6 * E_CHARGE,
        f_ir=n.f_ir_Hz,
        f_uv=n.f_uv_Hz,
        johnson_convention=n.johnson_convention,
        z0_line=n.z0_line_ohm,
    )


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    if isinstance(value, (list, tuple)):
        return ", ".join(_format(v) for v in value)
    if value is None:
        return ""
    return str(value)


def config_to_text(cfg: RunConfig) -> str:
    """INI text whose floats round-trip bit-exactly."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    for section, values in cfg.model_dump().items():
        parser[section] = {k: _format(v) for k, v in values.items()}
    lines = []
    for section in parser.sections():
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {v}" for k, v in parser[section].items())
        lines.append("")
    return "\n".join(lines)


def write_config(cfg: RunConfig, path: Union[str, Path]) -> Path:
    return atomic_write_text(path, config_to_text(cfg))
