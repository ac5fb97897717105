"""
Command-line interface.

Usage:
    python -m fluxguide [--config run.ini] <command> [options]

Commands:
    spectrum          Levels, matrix elements and coupling at one bias point
    sweep             Symmetry-point coupling over a coupler flux range
    fit-spectroscopy  Two-level or full-circuit fit to measured transitions
    fit-transmission  Shared-parameter fit to multi-power transmission data
    calibrate         Flux crosstalk map from a two-current |S21| scan
    synthesize-scan   Predicted |S21| scan for a given crosstalk map
    decoherence       Decoherence budget over a coupler flux range
    reflections       Radiative rate in front of a reflecting component
    convergence       Lowest levels versus truncation

Results go to stdout unless an output directory is set, in which case each
command writes <command>.<format> there. Logs go to stderr. Frequencies in
every output are ordinary (Hz).
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from . import fluxguide_config
from .calibration import ASSIGNMENTS, crosstalk_map, synthesize_scan
from .circuit import convergence_sweep, elements_from_spectrum, solve
from .circuit.spectrum import omega10_of
from .constants import CALIBRATION_BIAS, DEFAULT_VSWR_SET, DEFAULT_ZQ_M, H_PLANCK, TWO_PI
from .coupling import alpha_quoted_convention, coupling_result
from .estimation import fit_circuit, fit_report, fit_transmission, fit_two_level, samples_at
from .exceptions import ConfigurationError, FluxguideError
from .models import CrosstalkMap, FluxBias, TransmissionModel
from .reflections import reflection_rates
from .schemas import RunConfig
from .utils.config_loader import (
    config_hash,
    device_params,
    line_params,
    load_run_config,
    solver_config,
    write_config,
)
from .utils.io import (
    emit,
    read_scan_csv,
    read_spectroscopy_csv,
    read_transmission_csv,
    rows_to_csv,
    scan_rows,
    sha256_file,
    to_json,
)
from .workers.sweep_runner import COUPLING_COLUMNS, DECOHERENCE_COLUMNS, SweepRunner, sweep_values

logger = logging.getLogger(__name__)

ANGULAR_PARAMETERS = ("delta", "gamma1", "gamma10_nr", "gamma_phi")
SPECTRUM_COLUMNS = (
    "f_beta",
    "f_eps",
    "delta_Hz",
    "e1_Hz",
    "e2_Hz",
    "e3_Hz",
    "gamma5_01_abs",
    "gamma5_diag_diff",
    "gamma1_Hz",
    "alpha",
    "alpha_quoted",
    "ratio_xz",
)
SCAN_COLUMNS = ("i_beta_A", "i_eps_A", "s21_mag")
DEFAULT_INITIAL_ATTENUATION_DB = 120.0


class Context:
    """Validated config plus the global flags, shared by every command."""

    def __init__(self, args: argparse.Namespace, cfg: RunConfig):
        self.args = args
        self.cfg = cfg
        self.config_hash = config_hash(cfg)
        self.params = device_params(cfg)
        self.solver = solver_config(cfg)
        self.tl = line_params(cfg)
        self.jobs = max(1, args.jobs)
        self.fmt = args.format

        output_dir = args.output_dir or fluxguide_config.OUTPUT_DIR or cfg.io.output_dir
        self.output_dir = Path(output_dir) if output_dir else None
        self.cache_dir = Path(fluxguide_config.CACHE_DIR or cfg.io.cache_dir)

    def provenance(self, input_hash: Optional[str] = None) -> Dict:
        doc = {"config_sha256": self.config_hash, "version": __version__}
        if input_hash is not None:
            doc["input_sha256"] = input_hash
        return doc

    def write(self, command: str, document: Dict, rows: Optional[List[Dict]] = None, columns: Sequence[str] = ()) -> None:
        """Emit rows as CSV or the document as JSON, per --format."""
        if self.fmt == "csv" and rows is not None:
            text, suffix = rows_to_csv(rows, columns), "csv"
        else:
            text, suffix = to_json(document), "json"
        path = self.output_dir / f"{command}.{suffix}" if self.output_dir else None
        emit(text, path)
        if path is not None:
            logger.info(f"Wrote {path}")


def _in_hz(values: Dict[str, float]) -> Dict[str, float]:
    return {(f"{k}_Hz" if k in ANGULAR_PARAMETERS else k): (v / TWO_PI if k in ANGULAR_PARAMETERS else v) for k, v in values.items()}


def _finite_or_none(value):
    if value is None:
        return None
    return float(value) if np.isfinite(value) else str(value)


def cmd_spectrum(ctx: Context) -> None:
    args = ctx.args
    bias = FluxBias(args.f_beta, args.f_eps)
    spectrum = solve(ctx.params, bias, ctx.solver)
    delta = omega10_of(spectrum)
    me = elements_from_spectrum(spectrum, ctx.cfg.solver.grid_points, True)
    result = coupling_result(me, delta, ctx.tl)
    levels_hz = ((spectrum.energies - spectrum.energies[0]) / H_PLANCK).tolist()

    row = {
        "f_beta": bias.f_beta,
        "f_eps": bias.f_epsilon,
        "delta_Hz": delta / TWO_PI,
        "gamma5_01_abs": abs(me.gamma5_01),
        "gamma5_diag_diff": me.gamma5_diag_diff,
        "gamma1_Hz": result.gamma1 / TWO_PI,
        "alpha": result.alpha,
        "alpha_quoted": alpha_quoted_convention(result.gamma1, delta),
        "ratio_xz": result.ratio_xz,
    }
    for i, level in enumerate(levels_hz[1:4], start=1):
        row[f"e{i}_Hz"] = level

    document = {
        "bias": {"f_beta": bias.f_beta, "f_eps": bias.f_epsilon},
        "backend": spectrum.backend,
        "truncation": spectrum.truncation,
        "levels_Hz": levels_hz,
        "energies_J": spectrum.energies.tolist(),
        "delta_Hz": row["delta_Hz"],
        "matrix_elements": {
            "gamma5_01": complex(me.gamma5_01),
            "gamma5_diag_diff": me.gamma5_diag_diff,
            "sin_half_01": None if me.sin_half_01 is None else [complex(v) for v in me.sin_half_01],
            "dh_dfeps_01_J": complex(me.dh_dfeps_01),
            "dh_dfbeta_01_J": complex(me.dh_dfbeta_01),
        },
        "gamma1_Hz": row["gamma1_Hz"],
        "alpha": result.alpha,
        "alpha_quoted": row["alpha_quoted"],
        "ratio_xz": _finite_or_none(result.ratio_xz),
        "provenance": ctx.provenance(),
    }
    ctx.write("spectrum", document, [row], SPECTRUM_COLUMNS)


def _sweep(ctx: Context, kind: str) -> None:
    args = ctx.args
    f_values = sweep_values(args.start, args.stop, args.step)
    runner = SweepRunner(ctx.cfg, ctx.cache_dir, max_workers=ctx.jobs)
    rows, stats = runner.run_once(f_values, kind)
    columns = COUPLING_COLUMNS if kind == "coupling" else DECOHERENCE_COLUMNS
    document = {"kind": kind, "rows": rows, "stats": stats, "provenance": ctx.provenance()}
    ctx.write("sweep" if kind == "coupling" else "decoherence", document, rows, columns)


def cmd_sweep(ctx: Context) -> None:
    _sweep(ctx, "coupling")


def cmd_decoherence(ctx: Context) -> None:
    _sweep(ctx, "decoherence")


def cmd_fit_spectroscopy(ctx: Context) -> None:
    args = ctx.args
    samples = read_spectroscopy_csv(args.samples)
    input_hash = sha256_file(args.samples)

    if args.mode == "two-level":
        f_betas = sorted({s.f_beta for s in samples})
        if args.f_beta is None and len(f_betas) != 1:
            raise ConfigurationError(f"samples cover {len(f_betas)} f_beta values; pick one with --f-beta")
        f_beta = args.f_beta if args.f_beta is not None else f_betas[0]
        fit = fit_two_level(samples_at(samples, f_beta))
        report = fit_report(fit, input_hash, ctx.config_hash, __version__, "two_level")
        report["f_beta"] = f_beta
    else:
        free = None
        if args.free:
            free = [int(c) in args.free for c in range(1, 7)]
        fit = fit_circuit(samples, ctx.params, ctx.solver, free=free, max_workers=ctx.jobs)
        report = fit_report(fit, input_hash, ctx.config_hash, __version__, "circuit")
        if args.write_config:
            # ic_A carries the exact fitted floats; ic_uA is for reading only
            fitted = [float(fit.parameters[f"ic{i}"]) for i in range(1, 7)]
            update = {"ic_A": fitted, "ic_uA": [v * 1e6 for v in fitted]}
            circuit = ctx.cfg.circuit.model_copy(update=update)
            write_config(ctx.cfg.model_copy(update={"circuit": circuit}), args.write_config)
            logger.info(f"Wrote fitted config {args.write_config}")

    report["parameters"] = _in_hz(report["parameters"])
    report["uncertainties"] = _in_hz(report["uncertainties"])
    ctx.write("fit-spectroscopy", report)


def _initial_model(curves, args) -> TransmissionModel:
    """Gap at the deepest dip of the lowest power; Γ₁ from that dip's half width."""
    low = curves[0]
    depth = np.abs(low.t) ** 2
    k = int(np.argmin(depth))
    delta = args.delta_Hz * TWO_PI if args.delta_Hz else float(low.omega_p[k])
    inside = low.omega_p[depth <= (1.0 + depth[k]) / 2.0]
    width = float(inside.max() - inside.min()) if inside.size > 1 else float(np.ptp(low.omega_p)) / 20
    gamma1 = args.gamma1_Hz * TWO_PI if args.gamma1_Hz else max(width, 1e-6 * delta)
    return TransmissionModel(
        gamma1=gamma1,
        gamma10_nr=0.05 * gamma1,
        gamma_phi=0.05 * gamma1,
        temperature=args.temperature,
        attenuation_db=args.attenuation_db,
        delta=delta,
    )


def cmd_fit_transmission(ctx: Context) -> None:
    args = ctx.args
    bias, curves = read_transmission_csv(args.data)
    initial = _initial_model(curves, args)
    fit = fit_transmission(curves, initial, amplitude_only=args.amplitude_only, fix_delta=args.fix_delta)
    report = fit_report(fit, sha256_file(args.data), ctx.config_hash, __version__, "transmission")
    report["bias"] = {"f_beta": bias[0], "f_eps": bias[1]}
    report["parameters"] = _in_hz(report["parameters"])
    report["uncertainties"] = _in_hz(report["uncertainties"])
    ctx.write("fit-transmission", report)


def cmd_calibrate(ctx: Context) -> None:
    args = ctx.args
    scan = read_scan_csv(args.scan, probe_omega=TWO_PI * args.probe_Hz)
    cmap, lattice, offset = crosstalk_map(
        scan, args.assignment, model=ctx.params, solver=ctx.solver, max_workers=ctx.jobs
    )
    document = {
        "w_A": cmap.w.tolist(),
        "i0_A": cmap.i0.tolist(),
        "lattice": {"w1_A": lattice.w1.tolist(), "w2_A": lattice.w2.tolist(), "peak_heights": list(lattice.peak_heights)},
        "offsets": {
            "candidates_A": [c.tolist() for c in offset.candidates],
            "scores": offset.scores,
            "ambiguous": offset.ambiguous,
        },
        "assignment": args.assignment,
        "provenance": ctx.provenance(sha256_file(args.scan)),
    }
    ctx.write("calibrate", document)


def cmd_synthesize_scan(ctx: Context) -> None:
    args = ctx.args
    w = np.asarray(args.w, dtype=float).reshape(2, 2) * 1e-3
    cmap = CrosstalkMap(w=w, i0=np.asarray(args.i0, dtype=float) * 1e-3)
    i_beta = np.linspace(args.i_beta[0], args.i_beta[1], args.points) * 1e-3
    i_eps = np.linspace(args.i_eps[0], args.i_eps[1], args.points) * 1e-3
    scan = synthesize_scan(
        ctx.params,
        cmap,
        TWO_PI * args.probe_Hz,
        i_beta,
        i_eps,
        TWO_PI * args.linewidth_Hz,
        noise=args.noise,
        seed=args.seed,
        solver=ctx.solver,
        max_workers=ctx.jobs,
    )
    rows = scan_rows(scan)
    ctx.write("synthesize-scan", {"rows": rows, "provenance": ctx.provenance()}, rows, SCAN_COLUMNS)


def cmd_reflections(ctx: Context) -> None:
    args = ctx.args
    bias = FluxBias(args.f_beta, args.f_eps)
    spectrum = solve(ctx.params, bias, ctx.solver)
    omega10_of(spectrum)
    me = elements_from_spectrum(spectrum, None, False)
    freq = np.linspace(args.freq_start_Hz, args.freq_stop_Hz, args.freq_points)
    v = args.v or ctx.tl.v
    rates = reflection_rates(me, TWO_PI * freq, args.vswr, args.zq, v, ctx.tl.z0, tuple(args.phases))

    rows = []
    for k, f in enumerate(freq):
        row = {"freq_Hz": float(f)}
        for vswr, gamma in rates.items():
            row[f"gamma_vswr_{vswr:g}_Hz"] = float(gamma[k]) / TWO_PI
        rows.append(row)
    columns = ["freq_Hz"] + [f"gamma_vswr_{vswr:g}_Hz" for vswr in rates]
    document = {
        "bias": {"f_beta": bias.f_beta, "f_eps": bias.f_epsilon},
        "z_q_m": args.zq,
        "v_m_per_s": v,
        "phases": list(args.phases),
        "freq_Hz": freq.tolist(),
        "gamma_Hz": {f"{vswr:g}": (np.asarray(g) / TWO_PI).tolist() for vswr, g in rates.items()},
        "provenance": ctx.provenance(),
    }
    ctx.write("reflections", document, rows, columns)


def cmd_convergence(ctx: Context) -> None:
    args = ctx.args
    bias = FluxBias(args.f_beta, args.f_eps)
    rows = convergence_sweep(
        ctx.params,
        bias,
        args.n_values,
        args.grid_values,
        k_levels=ctx.cfg.solver.k_levels,
        memory_budget_mb=ctx.cfg.solver.memory_budget_mb,
    )
    columns = ["backend", "truncation", "e10_rel_change"] + [f"e{i}_J" for i in range(ctx.cfg.solver.k_levels)]
    ctx.write("convergence", {"rows": rows, "provenance": ctx.provenance()}, rows, columns)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "fit-spectroscopy": cmd_fit_spectroscopy,
    "fit-transmission": cmd_fit_transmission,
    "calibrate": cmd_calibrate,
    "synthesize-scan": cmd_synthesize_scan,
    "decoherence": cmd_decoherence,
    "reflections": cmd_reflections,
    "convergence": cmd_convergence,
}


def _add_range(p: argparse.ArgumentParser) -> None:
    p.add_argument("--start", type=float, required=True, help="First f_beta")
    p.add_argument("--stop", type=float, required=True, help="Last f_beta (inclusive)")
    p.add_argument("--step", type=float, required=True, help="f_beta step")


def _add_bias(p: argparse.ArgumentParser) -> None:
    p.add_argument("--f-beta", type=float, default=CALIBRATION_BIAS[0])
    p.add_argument("--f-eps", type=float, default=CALIBRATION_BIAS[1])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fluxguide", description="Flux qubit and tunable coupler toolkit")
    parser.add_argument("--config", default=None, help="Run config file (defaults to the fitted device)")
    parser.add_argument("--output-dir", default=None, help="Write <command>.<format> here instead of stdout")
    parser.add_argument("--jobs", type=int, default=fluxguide_config.JOBS, help="Worker threads (default: 1)")
    parser.add_argument("--seed", type=int, default=0,
                        help="Noise seed for synthesize-scan; other commands are deterministic (default: 0)")
    parser.add_argument("--log-level", default=fluxguide_config.LOG_LEVEL, help="Logging level (default: INFO)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="Levels and coupling at one bias point")
    _add_bias(p)

    p = sub.add_parser("sweep", help="Coupling at symmetry points over f_beta")
    _add_range(p)

    p = sub.add_parser("fit-spectroscopy", help="Fit measured qubit transitions")
    p.add_argument("samples", help="CSV with f_beta, f_eps, freq_Hz[, sigma_Hz]")
    p.add_argument("--mode", choices=("two-level", "circuit"), default="two-level")
    p.add_argument("--f-beta", type=float, default=None, help="Coupler flux for the two-level fit")
    p.add_argument("--free", type=int, nargs="+", default=None, help="Junction indices (1-6) to fit")
    p.add_argument("--write-config", default=None, help="Write a config with the fitted currents")

    p = sub.add_parser("fit-transmission", help="Fit multi-power transmission at one bias point")
    p.add_argument("data", help="CSV with f_beta, f_eps, power_dbm, freq_Hz, re_t, im_t")
    p.add_argument("--amplitude-only", action="store_true")
    p.add_argument("--fix-delta", action="store_true")
    p.add_argument("--delta-Hz", type=float, default=None, help="Initial gap (default: deepest dip)")
    p.add_argument("--gamma1-Hz", type=float, default=None, help="Initial radiative rate (default: dip width)")
    p.add_argument("--temperature", type=float, default=0.05, help="Initial qubit temperature in K")
    p.add_argument("--attenuation-db", type=float, default=DEFAULT_INITIAL_ATTENUATION_DB)

    p = sub.add_parser("calibrate", help="Crosstalk map from a two-current scan")
    p.add_argument("scan", help="CSV with i_beta_A, i_eps_A, s21_mag")
    p.add_argument("--assignment", choices=ASSIGNMENTS, default="sensitivity",
                   help="Which lattice vector belongs to which loop (default: sensitivity)")
    p.add_argument("--probe-Hz", type=float, default=0.0)

    p = sub.add_parser("synthesize-scan", help="Predicted |S21| scan for a crosstalk map")
    p.add_argument("--w", type=float, nargs=4, required=True, metavar=("W11", "W12", "W21", "W22"),
                   help="Crosstalk matrix in mA, row-major; columns are the steps per flux quantum")
    p.add_argument("--i0", type=float, nargs=2, required=True, help="Offset currents in mA")
    p.add_argument("--i-beta", type=float, nargs=2, required=True, help="I_beta range in mA")
    p.add_argument("--i-eps", type=float, nargs=2, required=True, help="I_eps range in mA")
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--probe-Hz", type=float, required=True)
    p.add_argument("--linewidth-Hz", type=float, default=50e6)
    p.add_argument("--noise", type=float, default=0.0, help="Relative multiplicative noise")

    p = sub.add_parser("decoherence", help="Decoherence budget over f_beta")
    _add_range(p)

    p = sub.add_parser("reflections", help="Radiative rate with a reflecting termination")
    _add_bias(p)
    p.add_argument("--vswr", type=float, nargs="+", default=list(DEFAULT_VSWR_SET))
    p.add_argument("--zq", type=float, default=DEFAULT_ZQ_M, help="Qubit to component distance in m")
    p.add_argument("--v", type=float, default=None, help="Phase velocity in m/s (default: from the line)")
    p.add_argument("--phases", type=float, nargs=2, default=[0.0, 0.0], help="Parity reflection phases")
    p.add_argument("--freq-start-Hz", type=float, default=4e9)
    p.add_argument("--freq-stop-Hz", type=float, default=8e9)
    p.add_argument("--freq-points", type=int, default=401)

    p = sub.add_parser("convergence", help="Levels versus truncation")
    _add_bias(p)
    p.add_argument("--n-values", type=int, nargs="+", default=[4, 5, 6, 7])
    p.add_argument("--grid-values", type=int, nargs="*", default=[])

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the exit code (0 ok, 2 on a handled error)."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    try:
        cfg = load_run_config(args.config)
        ctx = Context(args, cfg)
        logger.info(f"Running {args.command} (config {ctx.config_hash[:12]})")
        COMMANDS[args.command](ctx)
    except FluxguideError as e:
        logger.error(f"{args.command} failed: {e}")
        sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e)}) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
