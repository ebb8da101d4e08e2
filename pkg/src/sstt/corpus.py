"""The corpus manifest: which files should be accepted or rejected, in order."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

MANIFEST = "manifest.txt"
VERDICTS = ("accept", "reject")


@dataclass(frozen=True)
class ManifestEntry:
    verdict: str
    path: Path
    codes: tuple = ()


def load_manifest(directory) -> list:
    directory = Path(directory)
    entries = []
    for number, raw in enumerate((directory / MANIFEST).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        verdict, path, *codes = line.split()
        if verdict not in VERDICTS:
            raise ValueError(f"{MANIFEST}:{number}: unknown verdict {verdict!r}")
        if verdict == "reject" and not codes:
            raise ValueError(f"{MANIFEST}:{number}: a reject entry needs expected codes")
        entries.append(ManifestEntry(verdict, directory / path, tuple(codes)))
    return entries


def expand_paths(paths) -> list:
    """Directories with a manifest contribute their accepted files in manifest order."""
    out = []
    for p in map(Path, paths):
        if p.is_dir() and (p / MANIFEST).exists():
            out += [e.path for e in load_manifest(p) if e.verdict == "accept"]
        elif p.is_dir():
            out += sorted(q for q in p.rglob("*") if q.name.endswith((".rzk", ".rzk.md")))
        else:
            out.append(p)
    return out
