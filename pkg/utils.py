# utils.py
import csv
import json
import logging
import os

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from app_config import Config  # noqa: E402

_LOGGER_NAMES = set()


# Setup logger
def setup_logger(name):
    logger = logging.getLogger(name)
    logger.setLevel(Config.LOG_LEVEL)
    _LOGGER_NAMES.add(name)

    if not logger.handlers:
        console_handler = logging.StreamHandler()
        console_formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        console_handler.setFormatter(console_formatter)
        logger.addHandler(console_handler)

    return logger


def set_log_level(level):
    """Apply a level to every logger created through setup_logger."""
    for name in _LOGGER_NAMES:
        logging.getLogger(name).setLevel(level)


logger = setup_logger(__name__)


def format_float(value):
    # 17 significant digits round-trip any double
    return format(float(value), '.17g')


def _format_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if value is None:
        return ''
    return str(value)


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (tuple, set, frozenset)):
        return sorted(value) if isinstance(value, (set, frozenset)) else list(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def metadata_lines(metadata):
    lines = [f"# version: {Config.VERSION}"]
    for key in sorted(metadata):
        lines.append(f"# {key}: {json.dumps(metadata[key], sort_keys=True, default=_json_default)}")
    return lines


def _ensure_parent(path):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_csv(path, header, rows, metadata):
    """
    Write a table with '#'-prefixed metadata lines ahead of the header row.

    Parameters:
    - path: target file
    - header: column names
    - rows: iterable of sequences, one per line
    - metadata: dict echoed into the comment block

    Returns:
    - path
    """
    _ensure_parent(path)
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        for line in metadata_lines(metadata):
            handle.write(line + '\n')
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])
    logger.info(f"Wrote {path}")
    return path


def write_columns_csv(path, columns, metadata):
    """Write equally long numeric columns given as an ordered dict name -> array."""
    header = list(columns)
    arrays = [np.asarray(columns[name]) for name in header]
    lengths = {len(a) for a in arrays}
    if len(lengths) > 1:
        raise ValueError(f"Columns have different lengths: {sorted(lengths)}")
    return write_csv(path, header, zip(*arrays), metadata)


def write_json(path, payload, metadata):
    _ensure_parent(path)
    document = {'metadata': dict(metadata, version=Config.VERSION), **payload}
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(document, handle, sort_keys=True, indent=2, default=_json_default)
        handle.write('\n')
    logger.info(f"Wrote {path}")
    return path


def write_svg(path, x, series, xlabel, ylabel, title=None):
    """
    Render one or more curves sharing an x axis as an SVG line plot.

    series maps a legend label to a y array.
    """
    _ensure_parent(path)
    plt.rcParams['svg.hashsalt'] = 'rabi-crwa'
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for label, values in series.items():
        ax.plot(x, values, linewidth=0.8, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(loc='best', fontsize='small')
    fig.tight_layout()
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    logger.info(f"Wrote {path}")
    return path


def remove_partial(paths):
    for path in paths:
        try:
            if os.path.exists(path):
                os.remove(path)
                logger.debug(f"Removed partial output {path}")
        except OSError as e:
            logger.error(f"Could not remove partial output {path}: {e}")
