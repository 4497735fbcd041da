"""Transitive-group catalogs stored as a directory of ``.grp`` files.

Files are named ``deg<v>_n<i>.grp`` where ``i`` is the index of the group in
whichever library the catalog mirrors. That library ordering is declared in
a ``PROVENANCE`` text file in the directory; it is reported verbatim and
never assumed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .groups.group import PermGroup
from .groups.grpfile import read_group

_NAME = re.compile(r"^deg(\d+)_n(\d+)\.grp$")
UNDECLARED = "undeclared"


@dataclass(frozen=True)
class CatalogEntry:
    degree: int
    index: int
    group: PermGroup
    path: Path | None = None


def load_catalog(directory: str | Path, degree: int | None = None) -> list[CatalogEntry]:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"catalog directory {directory} not found")
    entries = []
    for path in directory.iterdir():
        m = _NAME.match(path.name)
        if not m:
            continue
        deg, idx = int(m.group(1)), int(m.group(2))
        if degree is not None and deg != degree:
            continue
        G = read_group(path)
        if G.degree != deg:
            raise ValueError(f"{path.name}: file declares degree {G.degree}")
        entries.append(CatalogEntry(deg, idx, G, path))
    entries.sort(key=lambda e: (e.degree, e.index))
    return entries


def provenance(directory: str | Path) -> str:
    path = Path(directory) / "PROVENANCE"
    if path.is_file():
        text = path.read_text().strip()
        return " ".join(text.split()) or UNDECLARED
    return UNDECLARED
