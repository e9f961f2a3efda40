"""CSV and JSON writers for experiment results."""

from __future__ import annotations

import abc
import csv
import io
import json
import logging
from pathlib import Path
from typing import IO, TYPE_CHECKING, Any, Dict, Iterable, List, Optional, Type

import numpy as np

from rough_harmonics.helpers._util import format_float

if TYPE_CHECKING:
    from rough_harmonics.experiment_base import ExperimentResult

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """Convert numpy scalars and arrays to plain Python values."""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def format_cell(value: Any) -> str:
    """One CSV cell: 17 significant digits for floats, lower-case booleans."""
    value = _plain(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if value is None:
        return ""
    if isinstance(value, (list, dict)):
        return json.dumps(value, separators=(",", ":"))
    return str(value)


class RecordWriter(metaclass=abc.ABCMeta):
    """Base class for result writers."""

    format_name: str

    @abc.abstractmethod
    def render(self, result: ExperimentResult) -> str:
        """Render the result as text."""

    def write(self, result: ExperimentResult, stream: IO[str]) -> None:
        """Write the rendered result to an open text stream."""
        stream.write(self.render(result))

    def write_path(self, result: ExperimentResult, path: Path) -> None:
        """Write to a file, creating parent directories.

        Raises:
            OSError: If the path cannot be written.
        """
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            self.write(result, handle)
        logger.info("Wrote %s output to %s", self.format_name, path)


class CSVWriter(RecordWriter):
    """Comma-separated rows with a header taken from the first row's keys."""

    format_name = "csv"

    def render(self, result: ExperimentResult) -> str:
        """Render the rows; an empty table renders as an empty string."""
        rows: List[Dict[str, Any]] = result.rows
        if not rows:
            return ""
        header = list(rows[0].keys())
        for row in rows[1:]:
            header.extend(k for k in row if k not in header)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(row.get(key)) for key in header])
        return buffer.getvalue()


class JSONWriter(RecordWriter):
    """Indented JSON document."""

    format_name = "json"

    def render(self, result: ExperimentResult) -> str:
        """Render the document with non-finite floats as Infinity/NaN."""
        return json.dumps(_plain(result.as_document()), indent=2, allow_nan=True) + "\n"


WRITERS: Dict[str, Type[RecordWriter]] = {"csv": CSVWriter, "json": JSONWriter}


def get_writer(format_name: str) -> RecordWriter:
    """Instantiate the writer for ``csv`` or ``json``.

    Raises:
        ValueError: For any other format.
    """
    try:
        return WRITERS[format_name.lower()]()
    except KeyError:
        raise ValueError(f"Unknown output format '{format_name}'.") from None


def resolve_output_path(
    name: str, format_name: str, output: Optional[str], output_dir: Optional[str]
) -> Optional[Path]:
    """The output file: ``output``, else ``<output_dir>/<name>.<format>``, else None (stdout)."""
    if output:
        return Path(output)
    if output_dir:
        return Path(output_dir) / f"{name}.{format_name}"
    return None


def witnesses_path(path: Path) -> Path:
    """``<stem>.witnesses.json`` next to an output file."""
    return path.with_name(f"{path.stem}.witnesses.json")


def write_witnesses(witnesses: Iterable[Any], path: Optional[Path], stream: IO[str]) -> None:
    """Write verification witnesses next to the output, or to ``stream``."""
    text = json.dumps({"witnesses": _plain(list(witnesses))}, indent=2, allow_nan=True) + "\n"
    if path is None:
        stream.write(text)
        return
    target = witnesses_path(path)
    target.write_text(text, encoding="utf-8")
    logger.warning("Verification failed; witnesses written to %s", target)

