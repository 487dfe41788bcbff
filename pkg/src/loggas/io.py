"""CSV/JSON persistence and run manifests."""
from __future__ import annotations

import csv
import hashlib
import json
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "fmt", "write_samples", "write_trajectory", "write_rows", "sha256", "Manifest", "read_manifest",
    "read_samples_csv",
]


def fmt(v) -> str:
    """Round-trippable, platform-independent number formatting."""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serialisable: {type(o)}")


def dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _point_columns(complex_: bool) -> list[str]:
    return ["x", "y"] if complex_ else ["x"]


def write_samples(path: Path, samples: Sequence[np.ndarray], meta: dict, format: str = "csv") -> list[Path]:
    """Samples as rows ``replica, index, x[, y]`` (CSV) or nested lists (JSON), plus a sidecar."""
    complex_ = any(np.iscomplexobj(s) for s in samples)
    written = []
    if format == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["replica", "index"] + _point_columns(complex_))
            for r, s in enumerate(samples):
                for i, p in enumerate(np.asarray(s)):
                    w.writerow([r, i, fmt(np.real(p))] + ([fmt(np.imag(p))] if complex_ else []))
    else:
        data = [[[float(np.real(p)), float(np.imag(p))] if complex_ else float(p) for p in s] for s in samples]
        dump_json({"columns": ["replica", "index"] + _point_columns(complex_), "samples": data}, path)
    written.append(path)
    side = path.with_suffix(path.suffix + ".meta.json")
    dump_json(meta, side)
    written.append(side)
    return written


def read_samples_csv(path: Path) -> list[np.ndarray]:
    rows = list(csv.DictReader(open(path)))
    reps: dict[int, list] = {}
    for row in rows:
        v = float(row["x"]) + (1j * float(row["y"]) if "y" in row else 0)
        reps.setdefault(int(row["replica"]), []).append(v)
    return [np.array(reps[k]) for k in sorted(reps)]


def write_trajectory(path: Path, times, states, meta: dict, format: str = "csv") -> list[Path]:
    states = np.asarray(states)
    complex_ = np.iscomplexobj(states)
    if format == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "particle_index"] + _point_columns(complex_))
            for t, frame in zip(times, states):
                for i, p in enumerate(frame):
                    w.writerow([fmt(t), i, fmt(np.real(p))] + ([fmt(np.imag(p))] if complex_ else []))
    else:
        dump_json({"times": np.asarray(times), "states": np.stack([states.real, states.imag], -1) if complex_
                   else states}, path)
    side = path.with_suffix(path.suffix + ".meta.json")
    dump_json(meta, side)
    return [path, side]


def write_rows(path: Path, rows: Iterable[dict], columns: Sequence[str], format: str = "csv") -> list[Path]:
    rows = list(rows)
    if format == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([fmt(r.get(c, "")) for c in columns])
    else:
        dump_json({"columns": list(columns), "rows": [[r.get(c) for c in columns] for r in rows]}, path)
    return [path]


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


class Manifest:
    """Run record: command, config echo, seed, version, timestamps and output digests."""

    def __init__(self, command: str, config: dict, seed, version: str):
        self.data = {
            "command": command, "config": config, "seed": seed, "version": version,
            "started": datetime.now(timezone.utc).isoformat(), "finished": None, "files": [],
        }

    def add(self, paths: Iterable[Path], root: Path) -> None:
        for p in paths:
            self.data["files"].append({"path": os.path.relpath(p, root), "sha256": sha256(p)})

    def write(self, root: Path, status: str = "ok") -> Path:
        self.data["finished"] = datetime.now(timezone.utc).isoformat()
        self.data["status"] = status
        path = root / "manifest.json"
        dump_json(self.data, path)
        return path


def read_manifest(path: Path) -> dict:
    return json.loads(Path(path).read_text())
