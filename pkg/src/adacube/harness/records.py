"""Result persistence: CSV traces and JSON summaries with a fixed layout so reruns are byte-identical."""

import csv
import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """Convert numpy scalars and containers to JSON types; non-finite floats become strings."""
    if hasattr(value, "tolist"):
        value = value.tolist()
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def canonical_json(payload: Any) -> str:
    return json.dumps(_plain(payload), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def config_hash(config: Dict[str, Any]) -> str:
    return hashlib.sha256(json.dumps(_plain(config), sort_keys=True, separators=(",", ":")).encode("utf-8")).hexdigest()


def write_json(path: Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(payload), encoding="utf-8")
    logger.info(f"wrote {path}")
    return path


def read_json(path: Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _cell(value: Any) -> str:
    value = _plain(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def write_csv(path: Path, rows: Sequence[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> Path:
    """
    Write rows under a header line.

    Args:
        path: Output file
        rows: One dict per row
        columns: Column order; defaults to the keys of the first row

    Returns:
        The path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = list(columns) if columns is not None else (list(rows[0]) if rows else [])
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\r\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])
    logger.info(f"wrote {path} ({len(rows)} rows)")
    return path


def read_csv(path: Path) -> List[Dict[str, str]]:
    with Path(path).open("r", encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


@dataclass
class RunRecord:
    name: str
    config_hash: str
    rows: List[Dict[str, Any]]
    summary: Dict[str, Any]
    timing: Dict[str, float] = field(default_factory=dict)

    def to_dict(self, include_timing: bool = False) -> dict:
        payload = {"name": self.name, "config_hash": self.config_hash, "summary": self.summary}
        if include_timing:
            payload["timing"] = self.timing
        return payload

    def save(self, out_dir: Path, columns: Optional[Sequence[str]] = None, include_timing: bool = False) -> List[Path]:
        out_dir = Path(out_dir)
        return [
            write_csv(out_dir / f"{self.name}.csv", self.rows, columns),
            write_json(out_dir / f"{self.name}.json", self.to_dict(include_timing)),
        ]
