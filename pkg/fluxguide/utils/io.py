"""
File input and output.

Outputs are written to a temporary file in the target directory and renamed
into place, so a failed command never leaves a partial file behind.
"""

import csv
import hashlib
import io
import json
import logging
import os
import sys
import tempfile
from collections import defaultdict
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..constants import TWO_PI
from ..exceptions import ConfigurationError
from ..models import Scan2D, SpectroscopySample, TransmissionCurve

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SPECTROSCOPY_COLUMNS = ("f_beta", "f_eps", "freq_Hz")
TRANSMISSION_COLUMNS = ("f_beta", "f_eps", "power_dbm", "freq_Hz", "re_t", "im_t")
SCAN_COLUMNS = ("i_beta_A", "i_eps_A", "s21_mag")


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: PathLike) -> str:
    """SHA-256 of a file's bytes."""
    return sha256_bytes(Path(path).read_bytes())


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write text next to path and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug(f"Wrote {path}")
    return path


def _clean(value):
    if isinstance(value, np.generic):
        return _clean(value.item())
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def to_json(document: Dict) -> str:
    """Deterministic JSON (sorted keys, repr floats)."""
    return json.dumps(_clean(document), indent=2, sort_keys=True) + "\n"


def rows_to_csv(rows: Iterable[Dict], columns: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buffer.getvalue()


def emit(text: str, path: Optional[PathLike] = None) -> None:
    """Write to path atomically, or to stdout when path is None."""
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        atomic_write_text(path, text)


def _read_rows(path: PathLike, required: Sequence[str]) -> List[Dict[str, str]]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        missing = [c for c in required if c not in (reader.fieldnames or [])]
        if missing:
            raise ConfigurationError(f"{path}: missing columns {missing}")
        rows = list(reader)
    if not rows:
        logger.warning(f"{path}: no data rows")
    return rows


def read_spectroscopy_csv(path: PathLike) -> List[SpectroscopySample]:
    """Rows of f_beta, f_eps, freq_Hz[, sigma_Hz] as samples in rad/s."""
    samples = []
    for row in _read_rows(path, SPECTROSCOPY_COLUMNS):
        sigma = row.get("sigma_Hz")
        samples.append(
            SpectroscopySample(
                f_beta=float(row["f_beta"]),
                f_epsilon=float(row["f_eps"]),
                omega10_measured=TWO_PI * float(row["freq_Hz"]),
                uncertainty=TWO_PI * float(sigma) if sigma not in (None, "") else None,
            )
        )
    return samples


def read_transmission_csv(path: PathLike) -> Tuple[Tuple[float, float], List[TransmissionCurve]]:
    """
    One bias point of transmission data, grouped into curves by power.

    Returns:
        ((f_beta, f_eps), curves sorted by power)

    Raises:
        ConfigurationError: If the file mixes bias points
    """
    rows = _read_rows(path, TRANSMISSION_COLUMNS)
    biases = {(float(r["f_beta"]), float(r["f_eps"])) for r in rows}
    if len(biases) != 1:
        raise ConfigurationError(f"{path}: expected a single bias point, found {len(biases)}")

    grouped = defaultdict(list)
    for r in rows:
        grouped[float(r["power_dbm"])].append((float(r["freq_Hz"]), complex(float(r["re_t"]), float(r["im_t"]))))
    curves = []
    for power in sorted(grouped):
        points = sorted(grouped[power])
        curves.append(
            TransmissionCurve(
                power_dbm=power,
                omega_p=TWO_PI * np.array([p[0] for p in points]),
                t=np.array([p[1] for p in points]),
            )
        )
    return biases.pop(), curves


def read_scan_csv(path: PathLike, probe_omega: float = 0.0) -> Scan2D:
    """Pivot a long i_beta_A, i_eps_A, s21_mag table into a rectangular scan."""
    rows = _read_rows(path, SCAN_COLUMNS)
    i_beta = sorted({float(r["i_beta_A"]) for r in rows})
    i_eps = sorted({float(r["i_eps_A"]) for r in rows})
    index_b = {v: k for k, v in enumerate(i_beta)}
    index_e = {v: k for k, v in enumerate(i_eps)}
    values = np.full((len(i_beta), len(i_eps)), np.nan)
    for r in rows:
        values[index_b[float(r["i_beta_A"])], index_e[float(r["i_eps_A"])]] = float(r["s21_mag"])
    if np.isnan(values).any():
        raise ConfigurationError(f"{path}: scan is not a complete rectangular grid")
    return Scan2D(i_beta=np.array(i_beta), i_epsilon=np.array(i_eps), values=values, probe_omega=probe_omega)


def scan_rows(scan: Scan2D) -> List[Dict[str, float]]:
    """Long-format rows of a scan."""
    return [
        {"i_beta_A": float(ib), "i_eps_A": float(ie), "s21_mag": float(scan.values[i, j])}
        for i, ib in enumerate(scan.i_beta)
        for j, ie in enumerate(scan.i_epsilon)
    ]
