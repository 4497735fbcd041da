"""Reading and writing ``.grp`` group files.

Line 1 holds the degree; every further nonempty line is one generator in
cycle notation. Lines starting with ``#`` are comments.
"""

from __future__ import annotations

from pathlib import Path

from ..errors import ParseError
from .group import PermGroup
from .perm import format_cycles, parse_permutation


def parse_group_text(text: str, name: str | None = None) -> PermGroup:
    degree = None
    gens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if degree is None:
            try:
                degree = int(line)
            except ValueError:
                raise ParseError(f"expected degree, got {line!r}", lineno) from None
            if degree < 1:
                raise ParseError("degree must be positive", lineno)
            continue
        try:
            gens.append(parse_permutation(line, degree))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}", lineno) from None
    if degree is None:
        raise ParseError("missing degree line", 1)
    return PermGroup(gens, degree, name=name)


def read_group(path: str | Path) -> PermGroup:
    path = Path(path)
    return parse_group_text(path.read_text(), name=path.stem)


def format_group(G: PermGroup, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(str(G.degree))
    lines.extend(format_cycles(g) for g in G.generators)
    return "\n".join(lines) + "\n"


def write_group(G: PermGroup, path: str | Path, comment: str | None = None) -> None:
    Path(path).write_text(format_group(G, comment))
