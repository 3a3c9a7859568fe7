"""Checksummed on-disk tables of partition data.

Level files are JSON lines, one partition per line in canonical order, with
dimensions and multiplicities as decimal strings.  A manifest records a
sha256 per file; re-running the builder revalidates each file against the
manifest and recomputes nothing that checks out.  A file that is missing,
unlisted or fails its checksum is rebuilt with a warning, never silently
trusted.

The cache directory defaults to ``SUD_ESTIMATE_CACHE`` from the environment;
an explicit argument (or CLI flag) wins over the environment.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .partitions import partition_records
from .weights import WeightVector

__all__ = [
    "CACHE_ENV_VAR",
    "TABLE_VERSION",
    "resolve_cache_dir",
    "level_filename",
    "cache_tables",
    "load_level",
    "CacheReport",
]

log = logging.getLogger(__name__)

CACHE_ENV_VAR = "SUD_ESTIMATE_CACHE"
TABLE_VERSION = 1
MANIFEST_NAME = "manifest.json"


def resolve_cache_dir(explicit=None) -> Path:
    """Explicit argument beats the environment beats a local default."""
    if explicit:
        return Path(explicit)
    env = os.environ.get(CACHE_ENV_VAR)
    if env:
        return Path(env)
    return Path.cwd() / ".sud-estimate-cache"


def level_filename(d: int, n: int) -> str:
    return f"d{d}_level{n:04d}.jsonl"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _render_level(d: int, n: int) -> str:
    lines = [json.dumps(rec, separators=(",", ":")) for rec in partition_records(d, n)]
    return "\n".join(lines) + "\n"


def _load_manifest(directory: Path) -> dict:
    path = directory / MANIFEST_NAME
    if not path.exists():
        return {"version": TABLE_VERSION, "entries": []}
    try:
        manifest = json.loads(path.read_text())
    except (json.JSONDecodeError, OSError) as exc:
        log.warning("unreadable manifest %s (%s); starting fresh", path, exc)
        return {"version": TABLE_VERSION, "entries": []}
    if manifest.get("version") != TABLE_VERSION:
        log.warning(
            "manifest %s has version %r, expected %r; starting fresh",
            path, manifest.get("version"), TABLE_VERSION,
        )
        return {"version": TABLE_VERSION, "entries": []}
    return manifest


@dataclass(frozen=True)
class CacheReport:
    """Outcome of one builder run: the manifest plus what was (re)built."""

    directory: Path
    manifest: dict
    reused: tuple[int, ...]
    rebuilt: tuple[int, ...]
    warnings: tuple[str, ...] = field(default_factory=tuple)


def cache_tables(d: int, n_max: int, directory=None) -> CacheReport:
    """Ensure level files 0..n_max exist and are intact; write the manifest.

    Intact levels (present, listed, checksum matches) are reused without
    recomputation, so a second run over an untouched cache does no table
    work and leaves every byte identical.
    """
    directory = resolve_cache_dir(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = _load_manifest(directory)
    known = {
        (entry["d"], entry["level"]): entry
        for entry in manifest.get("entries", [])
    }
    reused = []
    rebuilt = []
    warnings = []
    entries = [entry for key, entry in known.items() if key[0] != d]
    for n in range(n_max + 1):
        name = level_filename(d, n)
        path = directory / name
        entry = known.get((d, n))
        if entry is not None and entry.get("path") == name and path.exists():
            if _sha256(path) == entry.get("sha256"):
                reused.append(n)
                entries.append(entry)
                continue
            message = f"checksum mismatch for {name}; rebuilding"
            warnings.append(message)
            log.warning(message)
        elif path.exists() and entry is None:
            message = f"{name} exists but is not in the manifest; rebuilding"
            warnings.append(message)
            log.warning(message)
        path.write_text(_render_level(d, n))
        entries.append(
            {"d": d, "level": n, "path": name, "sha256": _sha256(path)}
        )
        rebuilt.append(n)
    entries.sort(key=lambda e: (e["d"], e["level"]))
    manifest = {"version": TABLE_VERSION, "entries": entries}
    (directory / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n")
    return CacheReport(directory, manifest, tuple(reused), tuple(rebuilt), tuple(warnings))


def load_level(d: int, n: int, directory=None) -> list[dict]:
    """Read one level table, rebuilding it first if it fails validation.

    Returns the parsed records with ``parts`` as tuples and exact integer
    ``dim`` / ``mult`` fields.
    """
    directory = resolve_cache_dir(directory)
    manifest = _load_manifest(directory)
    known = {
        (entry["d"], entry["level"]): entry
        for entry in manifest.get("entries", [])
    }
    entry = known.get((d, n))
    path = directory / level_filename(d, n)
    stale = (
        entry is None
        or not path.exists()
        or _sha256(path) != entry.get("sha256")
    )
    if stale:
        log.warning(
            "cache level d=%d N=%d missing or invalid under %s; rebuilding",
            d, n, directory,
        )
        cache_tables(d, n, directory)
    records = []
    with path.open() as fh:
        for line in fh:
            raw = json.loads(line)
            records.append(
                {
                    "d": raw["d"],
                    "parts": tuple(raw["parts"]),
                    "dim": int(raw["dim"]),
                    "mult": int(raw["mult"]),
                }
            )
    return records


def multiplicity_weights(d: int, n: int, directory=None) -> WeightVector:
    """Weight vector proportional to the multiplicities, read from the cache.

    Mostly a convenience for experiments; exercises the cached tables.
    """
    entries = {
        rec["parts"]: Fraction(rec["mult"])
        for rec in load_level(d, n, directory)
    }
    return WeightVector(d, n, entries)
