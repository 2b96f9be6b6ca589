"""Deterministic CSV/JSON artifact writers.

Every artifact opens with '#'-prefixed header lines recording the tool
version, config hash, seed and grid definitions.  Wall-clock timing is
deliberately kept out of the data artifacts (it goes into the run
manifest sidecar) so two runs with identical configuration produce
byte-identical outputs.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

from . import __version__


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(float(v))  # normalizes numpy scalars to the plain repr
    return str(v)


def write_csv(path: Path, fieldnames: list[str], rows: list[dict], meta: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {key}={format_value(meta[key])}" for key in sorted(meta)]
    lines.append(",".join(fieldnames))
    for row in rows:
        lines.append(",".join(format_value(row.get(name, "")) for name in fieldnames))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(path: Path, rows: list[dict], meta: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"meta": meta, "rows": rows}
    path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def standard_meta(command: str, cfg_hash: str, seed: int, **extra) -> dict:
    meta = {
        "tool_version": __version__,
        "config_hash": cfg_hash,
        "seed": seed,
        "command": command,
    }
    meta.update(extra)
    return meta


def write_manifest(out_dir: Path, command: str, cfg_hash: str, wall_s: float, workers: int) -> None:
    """Run sidecar; the only artifact allowed to differ between runs."""
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "config_hash": cfg_hash,
        "tool_version": __version__,
        "wall_clock_s": wall_s,
        "workers": workers,
        "finished_unix": time.time(),
    }
    (out_dir / f"run_{command}_manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )
