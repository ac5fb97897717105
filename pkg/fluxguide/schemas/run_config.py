"""Run configuration Pydantic schemas.

One model per INI section. Every field has a default describing the
fitted device, so an empty file validates. Unknown keys are rejected.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..constants import (
    CALIBRATION_BIAS,
    DEFAULT_CAPACITANCE_SCALE_F_PER_UM2,
    DEFAULT_GRID_POINTS,
    DEFAULT_K_LEVELS,
    DEFAULT_MEMORY_BUDGET_MB,
    DEFAULT_N_CHARGE,
    DEFAULT_RESIDUAL_TOL,
    DEFAULT_T_TL_K,
    DEFAULT_Z0_OHM,
    DELTA_AL_J,
    DESIGN_AREAS_UM2,
    E_CHARGE,
    F_IR_HZ,
    F_UV_HZ,
    M_BETA_H,
    M_EPS_H,
    FITTED_IC,
    SQRT_A_BETA,
    SQRT_A_EPS,
    X_QP,
)


def _split_floats(value):
    if isinstance(value, str):
        return [float(v) for v in value.replace(";", ",").split(",") if v.strip()]
    return value


class Section(BaseModel):
    """Base for config sections: strict keys, blank INI values fall back to the default."""

    model_config = ConfigDict(extra="forbid", validate_default=True)

    @model_validator(mode="before")
    @classmethod
    def drop_blanks(cls, data):
        if isinstance(data, dict):
            return {k: v for k, v in data.items() if not (isinstance(v, str) and v.strip().lower() in ("", "none"))}
        return data


class CircuitSection(Section):
    ic_uA: List[float] = Field(default_factory=lambda: [i * 1e6 for i in FITTED_IC])
    ic_A: Optional[List[float]] = None
    c_fF: Optional[List[float]] = None
    area_um2: List[float] = Field(default_factory=lambda: list(DESIGN_AREAS_UM2))
    capacitance_scale_fF_per_um2: float = DEFAULT_CAPACITANCE_SCALE_F_PER_UM2 * 1e15
    c_extra_fF: Optional[List[float]] = None
    renormalization: bool = False
    renormalization_delta_Hz: float = 5.7e9
    calibrate_scale: bool = False
    calibration_delta_Hz: float = Field(default=5.7e9, gt=0)
    calibration_f_beta: float = CALIBRATION_BIAS[0]
    calibration_f_eps: float = CALIBRATION_BIAS[1]

    @field_validator("ic_uA", "ic_A", "c_fF", "area_um2", "c_extra_fF", mode="before")
    @classmethod
    def comma_separated(cls, v):
        return _split_floats(v)

    @field_validator("ic_uA", "area_um2")
    @classmethod
    def six_values(cls, v):
        if len(v) != 6:
            raise ValueError(f"expected 6 values, got {len(v)}")
        return v

    @field_validator("ic_A", "c_fF")
    @classmethod
    def six_or_none(cls, v):
        if v is not None and len(v) != 6:
            raise ValueError(f"expected 6 values, got {len(v)}")
        return v

    @field_validator("c_extra_fF")
    @classmethod
    def sixteen_or_none(cls, v):
        if v is not None and len(v) != 16:
            raise ValueError(f"expected 16 values (4x4 row-major), got {len(v)}")
        return v


class LineSection(Section):
    z0_ohm: float = Field(default=DEFAULT_Z0_OHM, gt=0)
    l0_per_m: Optional[float] = Field(default=None, gt=0)
    c0_per_m: Optional[float] = Field(default=None, gt=0)
    t_tl_K: float = Field(default=DEFAULT_T_TL_K, gt=0)


class SolverSection(Section):
    backend: Literal["charge", "grid"] = "charge"
    n_charge: int = Field(default=DEFAULT_N_CHARGE, ge=1)
    grid_points: int = Field(default=DEFAULT_GRID_POINTS, ge=8)
    k_levels: int = Field(default=DEFAULT_K_LEVELS, ge=2)
    tol: float = Field(default=0.0, ge=0)
    max_iterations: Optional[int] = Field(default=None, gt=0)
    residual_tol: float = Field(default=DEFAULT_RESIDUAL_TOL, gt=0)
    memory_budget_mb: float = Field(default=DEFAULT_MEMORY_BUDGET_MB, gt=0)
    bracket_low: float = 0.3
    bracket_high: float = 0.7
    sym_xtol: float = Field(default=1e-7, gt=0)
    pc_window: float = Field(default=0.003, gt=0)
    derivative_step: float = Field(default=1e-4, gt=0)

    @model_validator(mode="after")
    def ordered_bracket(self):
        if not self.bracket_low < self.bracket_high:
            raise ValueError("bracket_low must be below bracket_high")
        return self


class NoiseSection(Section):
    sqrt_a_eps_uphi0: float = Field(default=SQRT_A_EPS * 1e6, ge=0)
    sqrt_a_beta_uphi0: float = Field(default=SQRT_A_BETA * 1e6, ge=0)
    t_line_K: float = Field(default=0.3, gt=0)
    m_eps_pH: float = M_EPS_H * 1e12
    m_beta_pH: float = M_BETA_H * 1e12
    x_qp: float = Field(default=X_QP, ge=0)
    delta_al_ueV: float = Field(default=DELTA_AL_J / E_CHARGE * 1e6, gt=0)
    f_ir_Hz: float = Field(default=F_IR_HZ, gt=0)
    f_uv_Hz: float = Field(default=F_UV_HZ, gt=0)
    johnson_convention: Literal["quantum", "classical_one_sided", "classical_two_sided"] = "quantum"
    z0_line_ohm: float = Field(default=50.0, gt=0)


class IOSection(Section):
    output_dir: Optional[str] = None
    cache_dir: str = ".fluxguide_cache"


class RunConfig(BaseModel):
    """Validated run configuration."""

    model_config = ConfigDict(extra="forbid")

    circuit: CircuitSection = Field(default_factory=CircuitSection)
    line: LineSection = Field(default_factory=LineSection)
    solver: SolverSection = Field(default_factory=SolverSection)
    noise: NoiseSection = Field(default_factory=NoiseSection)
    io: IOSection = Field(default_factory=IOSection)
