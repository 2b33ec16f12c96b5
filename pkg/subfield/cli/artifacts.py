"""CSV and manifest output for experiment runs."""

import csv
import hashlib
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from subfield import __version__

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def format_cell(value: Any) -> str:
    """Floats with 17 significant digits; everything else via ``str``."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return ""
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def sha256_of_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for block in iter(lambda: handle.read(1024 * 1024), b""):
            digest.update(block)
    return digest.hexdigest()


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class ArtifactWriter:
    """Writes the artifacts of one run into ``out_dir`` and removes them again on failure.

    Use as a context manager: an exception leaving the block deletes every
    file written so far.
    """

    def __init__(self, out_dir: Path, experiment: str):
        self.out_dir = Path(out_dir)
        self.experiment = experiment
        self.written: List[Path] = []
        self.started = _utc_now()
        self._created_dir = False

    def __enter__(self) -> "ArtifactWriter":
        if not self.out_dir.exists():
            self.out_dir.mkdir(parents=True)
            self._created_dir = True
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        if exc_type is not None:
            self.cleanup()
        return False

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = self.out_dir / name
        self.written.append(path)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            count = 0
            for row in rows:
                writer.writerow([format_cell(v) for v in row])
                count += 1
        logger.info(f"Wrote {count} rows to {path}")
        return path

    def write_manifest(
        self,
        config: Dict[str, Any],
        seed: int,
        threads: int,
        summary: Optional[Dict[str, Any]] = None,
    ) -> Path:
        """Writes ``manifest.json`` echoing the resolved config and a sha256 per artifact."""
        manifest = {
            "experiment": self.experiment,
            "version": __version__,
            "seed": seed,
            "threads": threads,
            "started": self.started,
            "finished": _utc_now(),
            "config": config,
            "summary": summary or {},
            "artifacts": {p.name: sha256_of_file(p) for p in self.written},
        }
        path = self.out_dir / MANIFEST_NAME
        self.written.append(path)
        with path.open("w", encoding="utf-8") as handle:
            json.dump(manifest, handle, indent=2, sort_keys=True, default=format_cell)
            handle.write("\n")
        return path

    def cleanup(self) -> None:
        """Removes every artifact written by this writer (and the directory if it created it)."""
        for path in self.written:
            path.unlink(missing_ok=True)
        logger.warning(f"Removed {len(self.written)} partial artifacts from {self.out_dir}")
        self.written.clear()
        if self._created_dir and self.out_dir.exists() and not any(self.out_dir.iterdir()):
            self.out_dir.rmdir()
