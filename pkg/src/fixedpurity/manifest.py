"""Run manifests and atomic file output.

Every CLI command writes its outputs via a temp file + atomic rename and
records them in a manifest with content digests, so runs are auditable and
reruns with identical flags produce identical artifacts.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__


def fmt_float(x) -> str:
    return f"{float(x):.17g}"


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_csv(header: list[str], rows: list[list]) -> str:
    """RFC-4180 CSV text: CRLF lines, '.' decimal, 17-significant-digit floats."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    library_version: str = __version__
    wall_clock_s: float = 0.0
    outputs: list[dict] = field(default_factory=list)
    _t0: float = field(default_factory=time.monotonic, repr=False)

    def add_output(self, path: Path) -> None:
        self.outputs.append({"path": str(path), "sha256": sha256_file(path)})

    def write(self, path: Path) -> None:
        self.wall_clock_s = time.monotonic() - self._t0
        doc = {
            "command": self.command,
            "config": self.config,
            "library_version": self.library_version,
            "wall_clock_s": self.wall_clock_s,
            "outputs": self.outputs,
        }
        atomic_write_text(path, json.dumps(doc, indent=1, sort_keys=True) + "\n")


def cache_dir() -> Path:
    env = os.environ.get("FIXEDPURITY_CACHE_DIR")
    if env:
        return Path(env)
    return Path(".cache") / "fixedpurity"
