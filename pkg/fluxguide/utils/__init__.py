"""
Shared helpers: config loading, file IO and process-pool mapping.
"""

from .config_loader import (
    circuit_params,
    config_hash,
    config_to_text,
    device_params,
    line_params,
    load_run_config,
    noise_model,
    parse_config_text,
    solver_config,
    write_config,
)
from .io import (
    atomic_write_text,
    emit,
    read_scan_csv,
    read_spectroscopy_csv,
    read_transmission_csv,
    rows_to_csv,
    scan_rows,
    sha256_bytes,
    sha256_file,
    to_json,
)
from .parallel import parallel_map, parallel_map_collect

__all__ = [
    "load_run_config",
    "parse_config_text",
    "config_hash",
    "config_to_text",
    "write_config",
    "circuit_params",
    "device_params",
    "line_params",
    "solver_config",
    "noise_model",
    "atomic_write_text",
    "emit",
    "to_json",
    "rows_to_csv",
    "sha256_bytes",
    "sha256_file",
    "read_spectroscopy_csv",
    "read_transmission_csv",
    "read_scan_csv",
    "scan_rows",
    "parallel_map",
    "parallel_map_collect",
]
