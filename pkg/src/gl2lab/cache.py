"""On-disk cache of subgroup enumerations.

One JSON file per (family, p, budget).  Entries store generators and the
serialized element list; on load every entry is rebuilt from its generators
and compared, so a corrupt or stale file is regenerated rather than trusted.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Callable

from .groups import (
    ABELIAN_MAX_P,
    CYCLIC_MAX_P,
    Subgroup,
    closure,
    enumerate_abelian_subgroups,
    enumerate_cyclic_subgroups,
)
from .mat2 import Mat2

log = logging.getLogger(__name__)

ENV_VAR = "GL2LAB_CACHE_DIR"
FORMAT_VERSION = 1

FAMILIES: dict[str, tuple[int, Callable[[int, int], list[Subgroup]]]] = {
    "cyclic": (CYCLIC_MAX_P, enumerate_cyclic_subgroups),
    "abelian": (ABELIAN_MAX_P, enumerate_abelian_subgroups),
}


class CacheError(OSError):
    pass


def default_dir() -> Path | None:
    val = os.environ.get(ENV_VAR)
    return Path(val) if val else None


def _digest(entries: list[dict]) -> str:
    blob = json.dumps(entries, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


class EnumerationCache:
    def __init__(self, directory: str | os.PathLike):
        self.dir = Path(directory)
        self.last_status: str | None = None

    def path(self, family: str, p: int, budget: int) -> Path:
        return self.dir / f"{family}-p{p}-b{budget}.json"

    def _ensure_dir(self):
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CacheError(f"cannot create cache directory {self.dir}: {exc}") from exc
        if not os.access(self.dir, os.W_OK):
            raise CacheError(f"cache directory {self.dir} is not writable")

    # -- read / write ----------------------------------------------------------

    def _write(self, path: Path, family: str, p: int, budget: int, groups: list[Subgroup]):
        self._ensure_dir()
        entries = [
            {"generators": [g.encode() for g in G.generators], "elements": G.serialize()}
            for G in groups
        ]
        doc = {
            "format": FORMAT_VERSION,
            "family": family,
            "p": p,
            "budget": budget,
            "subgroups": entries,
            "sha256": _digest(entries),
        }
        fd, tmp = tempfile.mkstemp(dir=self.dir, prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(doc, fh)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _read(self, path: Path, family: str, p: int, budget: int) -> list[Subgroup] | None:
        """Parsed and re-derived entries, or None if anything fails to check."""
        try:
            doc = json.loads(path.read_text())
            if (doc["format"], doc["family"], doc["p"], doc["budget"]) != (FORMAT_VERSION, family, p, budget):
                return None
            entries = doc["subgroups"]
            if _digest(entries) != doc["sha256"]:
                return None
            out = []
            for e in entries:
                G = closure(p, [Mat2.parse(g, p) for g in e["generators"]])
                if G.serialize() != e["elements"]:
                    return None
                out.append(G)
            return out
        except (OSError, ValueError, KeyError, TypeError) as exc:
            log.warning("unreadable cache entry %s: %s", path, exc)
            return None

    def load_or_build(self, family: str, p: int, budget: int, builder: Callable[[], list[Subgroup]]) -> list[Subgroup]:
        path = self.path(family, p, budget)
        if path.exists():
            groups = self._read(path, family, p, budget)
            if groups is not None:
                self.last_status = "hit"
                return groups
            log.warning("cache entry %s failed verification; regenerating", path)
            self.last_status = "regenerated"
        else:
            self.last_status = "miss"
        groups = builder()
        self._write(path, family, p, budget, groups)
        return groups

    # -- management ------------------------------------------------------------

    def warm(self, ps: list[int], families: list[str] | None = None) -> dict:
        done = []
        for fam in families or list(FAMILIES):
            if fam not in FAMILIES:
                raise ValueError(f"unknown family {fam!r}; choose from {sorted(FAMILIES)}")
            budget, fn = FAMILIES[fam]
            for p in ps:
                groups = self.load_or_build(fam, p, budget, lambda: fn(p, budget))
                done.append({"family": fam, "p": p, "budget": budget, "classes": len(groups), "status": self.last_status})
        return {"action": "warm", "dir": str(self.dir), "entries": done}

    def clear(self) -> dict:
        removed = 0
        if self.dir.is_dir():
            for f in self.dir.glob("*-p*-b*.json"):
                f.unlink()
                removed += 1
        return {"action": "clear", "dir": str(self.dir), "removed": removed}

    def stat(self) -> dict:
        entries = []
        if self.dir.is_dir():
            for f in sorted(self.dir.glob("*-p*-b*.json")):
                entries.append({"key": f.stem, "bytes": f.stat().st_size})
        return {
            "action": "stat",
            "dir": str(self.dir),
            "entries": len(entries),
            "total_bytes": sum(e["bytes"] for e in entries),
            "files": entries,
        }
