# app_config.py
import json
import os

from dotenv import load_dotenv

from errors import ConfigError

load_dotenv()


def _optional_int(name):
    value = os.getenv(name)
    if value in (None, ''):
        return None
    return int(value)


class Config:
    VERSION = os.getenv('RABI_VERSION', 'rabi-crwa 0.3.0')
    LOG_LEVEL = os.getenv('RABI_LOG_LEVEL', 'INFO').upper()
    TAIL_TOL = float(os.getenv('RABI_TAIL_TOL', 1e-12))
    TAU_MAX = float(os.getenv('RABI_TAU_MAX', 40.0))
    N_POINTS = int(os.getenv('RABI_N_POINTS', 4001))
    N_CUT = _optional_int('RABI_N_CUT')
    # Extra Fock levels kept in the exact Hamiltonian above the field truncation
    EXACT_N_CUT_PAD = int(os.getenv('RABI_EXACT_N_CUT_PAD', 30))
    OUTPUT_DIR = os.getenv('RABI_OUTPUT_DIR', 'output')
    PEAK_PROMINENCE = float(os.getenv('RABI_PEAK_PROMINENCE', 0.02))
    # Frequencies below are in units of 2g
    SPECTRUM_BIN = float(os.getenv('RABI_SPECTRUM_BIN', 0.1))
    SPECTRUM_FREQ_MAX = float(os.getenv('RABI_SPECTRUM_FREQ_MAX', 25.0))
    LEVELS_N_MAX = int(os.getenv('RABI_LEVELS_N_MAX', 10))
    # Time points per chunk when evaluating oscillation sums
    CHUNK_SIZE = int(os.getenv('RABI_CHUNK_SIZE', 2048))


def load_json_config(path):
    """
    Read an optional JSON run configuration.

    Keys must be RunConfig field names; unknown keys are rejected later by RunConfig.
    """
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            payload = json.load(handle)
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}") from e

    if not isinstance(payload, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    return payload
