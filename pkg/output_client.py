"""
Output Client for Spectralab
Writes sweep tables, region files and JSON summaries into a run directory
"""

import hashlib
import json
import time
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np
import pandas as pd

import config
from errors import OutputError


def config_signature(run_config: Dict) -> str:
    """sha256 over the canonical JSON form of a run config"""
    message = json.dumps(run_config, sort_keys=True, separators=(",", ":"), default=_jsonable)
    return hashlib.sha256(message.encode()).hexdigest()


def _jsonable(value: Any):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "value"):
        return value.value
    return str(value)


class OutputClient:
    """Result sink: CSV with '#' metadata lines, JSON summaries"""

    def __init__(self, output_dir: Union[str, Path], run_config: Optional[Dict] = None,
                 seed: Optional[int] = None):
        self.output_dir = Path(output_dir)
        self.run_config = run_config or {}
        self.signature = config_signature(self.run_config)
        self.seed = config.SEED if seed is None else seed
        self.started = time.time()
        self.written: List[Path] = []

    def _ensure_dir(self):
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OutputError(f"cannot create output directory {self.output_dir}: {exc}") from exc

    def _header(self, meta: Optional[Dict]) -> List[str]:
        lines = [f"# config_sha256={self.signature}", f"# seed={self.seed}"]
        for key, value in (meta or {}).items():
            lines.append(f"# {key}={json.dumps(value, sort_keys=True, default=_jsonable)}")
        return lines

    # ==================== WRITERS ====================

    def write_csv(self, name: str, frame: pd.DataFrame, meta: Optional[Dict] = None) -> Path:
        """Metadata comment lines, then a strict header row"""
        self._ensure_dir()
        path = self.output_dir / f"{name}.csv"
        try:
            with open(path, "w", newline="") as fh:
                fh.write("\n".join(self._header(meta)) + "\n")
                frame.to_csv(fh, index=False, float_format="%.17g", lineterminator="\n")
        except OSError as exc:
            raise OutputError(f"cannot write {path}: {exc}") from exc
        self.written.append(path)
        return path

    def write_rows(self, name: str, rows: Iterable[Dict], meta: Optional[Dict] = None) -> Path:
        return self.write_csv(name, pd.DataFrame(list(rows)), meta)

    def write_json(self, name: str, payload: Dict, include_run: bool = True) -> Path:
        """JSON document; wall time is kept out of CSVs so tables stay byte-identical"""
        self._ensure_dir()
        path = self.output_dir / f"{name}.json"
        body = dict(payload)
        if include_run:
            body.setdefault("config_sha256", self.signature)
            body.setdefault("seed", self.seed)
            body.setdefault("wall_time_s", round(time.time() - self.started, 3))
        try:
            path.write_text(json.dumps(body, indent=2, sort_keys=True, default=_jsonable) + "\n")
        except OSError as exc:
            raise OutputError(f"cannot write {path}: {exc}") from exc
        self.written.append(path)
        return path


def read_csv(path: Union[str, Path]) -> pd.DataFrame:
    """Load a table written by OutputClient, skipping the metadata lines"""
    return pd.read_csv(path, comment="#")


def create_client(output_dir: Optional[Union[str, Path]] = None, run_config: Optional[Dict] = None,
                  seed: Optional[int] = None) -> OutputClient:
    """Create output client from config"""
    return OutputClient(output_dir or config.OUTPUT_DIR, run_config, seed)
