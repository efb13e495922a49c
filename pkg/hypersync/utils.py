"""Utility functions for the application."""
import csv
import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Sequence

import numpy as np

from hypersync.exceptions import OutputError
from hypersync.settings import settings

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

logger = logging.getLogger(__name__)


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance."""
    return logging.getLogger(name)


def ensure_dir(path: Path) -> None:
    """Ensure directory exists."""
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"Cannot create output directory {path}: {e}") from e


def derive_seed(base_seed: int, *indices: int) -> int:
    """Counter-based 64-bit seed for (base_seed, indices...).

    The value depends only on its arguments, so serial and parallel
    executions draw identical random streams.
    """
    entropy = [int(base_seed) & 0xFFFFFFFFFFFFFFFF] + [int(i) for i in indices]
    words = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint32)
    return (int(words[0]) << 32) | int(words[1])


def format_header(config: dict, seed: int) -> List[str]:
    """Comment lines echoing the resolved config and seed."""
    return [
        f"seed={seed}",
        f"config={json.dumps(config, sort_keys=True, default=str)}",
    ]


def write_csv(
    file_path: Path,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    header_lines: Sequence[str] = (),
) -> Path:
    """Write a comma-separated file with `#`-prefixed header comments."""
    ensure_dir(file_path.parent)
    try:
        with open(file_path, 'w', encoding='utf-8', newline='') as f:
            for line in header_lines:
                f.write(f"# {line}\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_format_cell(v) for v in row])
    except OSError as e:
        raise OutputError(f"Error writing CSV file {file_path}: {e}") from e
    logger.info(f"Wrote {file_path}")
    return file_path


def _format_cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)
