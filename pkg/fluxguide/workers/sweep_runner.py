"""
Sweep Runner Worker

Walks a range of coupler fluxes and, for each point:
1. Finds the qubit symmetry point
2. Evaluates coupling (or the decoherence budget) there
3. Caches the row on disk keyed by (config hash, kind, f_beta)
4. Records failures but keeps the sweep going

Usage:
    python -m fluxguide.workers.sweep_runner --start 0.36 --stop 0.44 --step 0.005
"""

import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..circuit import matrix_elements, symmetry_point
from ..constants import TWO_PI
from ..coupling import alpha_quoted_convention, coupling_result
from ..decoherence import BUDGET_COLUMNS, budget, budget_row
from ..exceptions import ConfigurationError, FluxguideError
from ..models import FluxBias
from ..schemas import RunConfig
from ..utils.config_loader import config_hash, device_params, line_params, noise_model, solver_config
from ..utils.io import atomic_write_text, sha256_bytes
from ..utils.parallel import parallel_map_collect

logger = logging.getLogger(__name__)

COUPLING_COLUMNS = (
    "f_beta",
    "f_eps_sym",
    "delta_Hz",
    "gamma1_Hz",
    "alpha",
    "alpha_quoted",
    "gamma5_01_abs",
    "ratio_xz",
    "error",
)
DECOHERENCE_COLUMNS = ("f_beta", "f_eps_sym") + BUDGET_COLUMNS[1:] + ("error",)
SWEEP_KINDS = ("coupling", "decoherence")
MAX_SPAN = 1.0


def sweep_values(start: float, stop: float, step: float) -> List[float]:
    """
    Inclusive grid start, start+step, ... <= stop, rounded to 12 decimals.

    An inverted range gives an empty sweep.

    Raises:
        ConfigurationError: Non-positive step or a span beyond one flux period
    """
    if not step > 0:
        raise ConfigurationError(f"step must be positive, got {step}")
    if stop < start:
        return []
    if stop - start > MAX_SPAN:
        raise ConfigurationError(f"sweep span {stop - start} exceeds one flux period")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(n)]


class SweepRunner:
    """Worker that evaluates sweep points with an on-disk cache."""

    def __init__(self, cfg: RunConfig, cache_dir: Optional[Path] = None, max_workers: int = 1):
        self.cfg = cfg
        self.config_hash = config_hash(cfg)
        self.cache_dir = Path(cache_dir) if cache_dir is not None else None
        self.max_workers = max_workers

        self.params = device_params(cfg)
        self.solver = solver_config(cfg)
        self.tl = line_params(cfg)
        self.noise = noise_model(cfg)
        self.bracket = (cfg.solver.bracket_low, cfg.solver.bracket_high)

    def _cache_path(self, kind: str, f_beta: float) -> Optional[Path]:
        if self.cache_dir is None:
            return None
        key = sha256_bytes(f"{self.config_hash}:{kind}:{f_beta!r}".encode())
        return self.cache_dir / f"{kind}-{key[:32]}.json"

    def _cached(self, kind: str, f_beta: float) -> Optional[Dict]:
        path = self._cache_path(kind, f_beta)
        if path is None or not path.exists():
            return None
        try:
            return json.loads(path.read_text())
        except json.JSONDecodeError:
            logger.warning(f"Ignoring corrupt cache entry {path}")
            return None

    def _store(self, kind: str, f_beta: float, row: Dict) -> None:
        path = self._cache_path(kind, f_beta)
        if path is not None:
            atomic_write_text(path, json.dumps(row, sort_keys=True))

    def coupling_point(self, f_beta: float) -> Dict:
        sym = symmetry_point(self.params, f_beta, self.solver, self.bracket, self.cfg.solver.sym_xtol)
        me = matrix_elements(
            self.params, FluxBias(f_beta, sym.f_eps_sym), self.solver, grid_points=self.cfg.solver.grid_points
        )
        result = coupling_result(me, sym.delta, self.tl)
        return {
            "f_beta": f_beta,
            "f_eps_sym": sym.f_eps_sym,
            "delta_Hz": sym.delta / TWO_PI,
            "gamma1_Hz": result.gamma1 / TWO_PI,
            "alpha": result.alpha,
            "alpha_quoted": alpha_quoted_convention(result.gamma1, sym.delta),
            "gamma5_01_abs": abs(me.gamma5_01),
            "ratio_xz": result.ratio_xz,
            "error": "",
        }

    def decoherence_point(self, f_beta: float) -> Dict:
        sym = symmetry_point(self.params, f_beta, self.solver, self.bracket, self.cfg.solver.sym_xtol)
        bias = FluxBias(f_beta, sym.f_eps_sym)
        me = matrix_elements(self.params, bias, self.solver, grid_points=self.cfg.solver.grid_points)
        result = budget(self.params, bias, self.noise, self.tl, self.cfg.line.t_tl_K, self.solver, me)
        row = budget_row(f_beta, result)
        row["f_eps_sym"] = sym.f_eps_sym
        row["error"] = ""
        return row

    def _evaluate(self, kind: str, f_beta: float) -> Dict:
        point = self.coupling_point if kind == "coupling" else self.decoherence_point
        row = point(f_beta)
        self._store(kind, f_beta, row)
        return row

    def run_once(self, f_values: Sequence[float], kind: str = "coupling") -> Tuple[List[Dict], dict]:
        """
        Evaluate every point, reusing cached rows.

        Returns:
            (rows in input order, stats with processed/cached/computed/failed)
        """
        if kind not in SWEEP_KINDS:
            raise ConfigurationError(f"unknown sweep kind '{kind}'")
        columns = COUPLING_COLUMNS if kind == "coupling" else DECOHERENCE_COLUMNS
        stats = {"processed": 0, "cached": 0, "computed": 0, "failed": 0}

        rows: Dict[float, Dict] = {}
        pending = []
        for f_beta in f_values:
            stats["processed"] += 1
            hit = self._cached(kind, f_beta)
            if hit is not None:
                rows[f_beta] = hit
                stats["cached"] += 1
            else:
                pending.append(f_beta)

        if pending:
            logger.info(f"Computing {len(pending)} {kind} points ({stats['cached']} cached)")
        outcomes = parallel_map_collect(
            lambda fb: self._evaluate(kind, fb), pending, self.max_workers, catch=(FluxguideError,)
        )
        for f_beta, row, error in outcomes:
            if error is None:
                rows[f_beta] = row
                stats["computed"] += 1
                continue
            stats["failed"] += 1
            failed = {c: float("nan") for c in columns}
            failed["f_beta"] = f_beta
            failed["error"] = f"{type(error).__name__}: {error}"
            rows[f_beta] = failed
            logger.warning(f"Sweep point f_beta={f_beta} failed: {error}")

        ordered = [rows[f] for f in f_values]
        logger.info(
            f"Sweep complete: processed={stats['processed']}, cached={stats['cached']}, "
            f"computed={stats['computed']}, failed={stats['failed']}"
        )
        return ordered, stats


def main():
    """Entry point for a standalone coupling sweep."""
    import argparse

    from .. import fluxguide_config
    from ..utils.config_loader import load_run_config
    from ..utils.io import emit, rows_to_csv

    parser = argparse.ArgumentParser(description="Coupler flux sweep")
    parser.add_argument("--config", default=None, help="Run config file (defaults to the fitted device)")
    parser.add_argument("--start", type=float, required=True)
    parser.add_argument("--stop", type=float, required=True)
    parser.add_argument("--step", type=float, required=True)
    parser.add_argument("--kind", choices=SWEEP_KINDS, default="coupling")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    cfg = load_run_config(args.config)
    runner = SweepRunner(cfg, Path(fluxguide_config.CACHE_DIR or cfg.io.cache_dir), max_workers=args.jobs)
    rows, _ = runner.run_once(sweep_values(args.start, args.stop, args.step), args.kind)
    emit(rows_to_csv(rows, COUPLING_COLUMNS if args.kind == "coupling" else DECOHERENCE_COLUMNS))


if __name__ == "__main__":
    main()
