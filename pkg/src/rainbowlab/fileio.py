"""Family-file reader/writer.

Format (UTF-8 text, 1-indexed values):

    n k
    thresholds: f1 f2 ... fs        (optional, before the first family)
    # family
    a1 a2 ... ak
    ...
    # family
    ...

Blank lines are ignored everywhere; lines starting with '#' other than the
exact separator '# family' are treated as comments.  Parse errors carry the
offending 1-based line number.  write_system followed by read_system yields
an equal system (member order is not significant).
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import TextIO

from .core import Family, FamilySystem, RainbowlabError, TupleK, Universe

FAMILY_SEPARATOR = "# family"


class ParseError(RainbowlabError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def read_system(source: str | Path | TextIO) -> FamilySystem:
    """Parse a family file from a path or an open text stream."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return _parse(fh)
    return _parse(source)


def parse_system(text: str) -> FamilySystem:
    return _parse(io.StringIO(text))


def _parse(fh: TextIO) -> FamilySystem:
    universe: Universe | None = None
    thresholds: list[int] | None = None
    families: list[list[TupleK]] = []
    current: list[TupleK] | None = None
    seen: set[TupleK] = set()

    for lineno, raw in enumerate(fh, start=1):
        line = raw.strip()
        if not line:
            continue
        if universe is None:
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(lineno, f"expected header 'n k', got {line!r}")
            try:
                n, k = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(lineno, f"non-integer header values in {line!r}") from None
            try:
                universe = Universe(n, k)
            except RainbowlabError as exc:
                raise ParseError(lineno, str(exc)) from None
            continue
        if line == FAMILY_SEPARATOR:
            current = []
            seen = set()
            families.append(current)
            continue
        if line.startswith("thresholds:"):
            if families:
                raise ParseError(lineno, "thresholds line must precede the first family")
            if thresholds is not None:
                raise ParseError(lineno, "duplicate thresholds line")
            body = line[len("thresholds:"):].split()
            try:
                thresholds = [int(v) for v in body]
            except ValueError:
                raise ParseError(lineno, f"non-integer threshold in {line!r}") from None
            if any(v < 0 for v in thresholds):
                raise ParseError(lineno, "thresholds must be nonnegative")
            continue
        if line.startswith("#"):
            continue
        if current is None:
            raise ParseError(lineno, f"member line {line!r} before any '{FAMILY_SEPARATOR}'")
        parts = line.split()
        try:
            coords = tuple(int(v) for v in parts)
        except ValueError:
            raise ParseError(lineno, f"non-integer coordinate in {line!r}") from None
        try:
            coords = universe.check_tuple(coords)
        except RainbowlabError as exc:
            raise ParseError(lineno, str(exc)) from None
        if coords in seen:
            raise ParseError(lineno, f"duplicate tuple {coords!r} within a family")
        seen.add(coords)
        current.append(coords)

    if universe is None:
        raise ParseError(1, "empty file: missing 'n k' header")
    if not families:
        raise ParseError(1, f"no '{FAMILY_SEPARATOR}' line: a system needs at least one family")
    if thresholds is not None and len(thresholds) != len(families):
        raise ParseError(1, f"{len(thresholds)} thresholds for {len(families)} families")
    return FamilySystem(
        universe, [Family(universe, members) for members in families], thresholds
    )


def write_system(system: FamilySystem, target: str | Path | TextIO) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(format_system(system))
    else:
        target.write(format_system(system))


def format_system(system: FamilySystem) -> str:
    lines = [f"{system.universe.n} {system.universe.k}"]
    if system.thresholds is not None:
        lines.append("thresholds: " + " ".join(str(v) for v in system.thresholds))
    for fam in system.families:
        lines.append(FAMILY_SEPARATOR)
        for t in fam.members:
            lines.append(" ".join(str(v) for v in t))
    return "\n".join(lines) + "\n"
