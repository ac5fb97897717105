"""
Configuration module for fluxguide.

Loads environment variables from a .env file and exposes process settings as
module-level constants. Only paths and process settings come from the
environment; device physics always comes from the run config file.
"""

import os

from dotenv import load_dotenv

load_dotenv()

# Paths
OUTPUT_DIR = os.getenv("FLUXGUIDE_OUTPUT_DIR", "").strip() or None
CACHE_DIR = os.getenv("FLUXGUIDE_CACHE_DIR", "").strip() or None

# Process
LOG_LEVEL = os.getenv("FLUXGUIDE_LOG_LEVEL", "INFO").strip().upper()
JOBS = int(os.getenv("FLUXGUIDE_JOBS", "1").strip() or 1)
