"""Plain-text formats: genome files, forbidden-cell masks, map dumps.

All three formats are line oriented ASCII with a small header; writers
end every line with a newline so serialize and parse are inverses on
canonical text. Parse failures name the offending line.
"""

from __future__ import annotations

import numpy as np

from sdamap.mapgen import EMPTY, FORBIDDEN, LevelMap, RoomKind
from sdamap.sda import SdaGenome, StateRecord

KIND_CHARS = {RoomKind.START: "S", RoomKind.ROOM: "R", RoomKind.CORRIDOR: "C"}
MAP_CHARS = frozenset(".#SRC")


class ParseError(ValueError):
    """A format violation at a specific line of the input text."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _check_bits(line_no: int, bits: str, what: str) -> str:
    if not (1 <= len(bits) <= 2) or any(c not in "01" for c in bits):
        raise ParseError(line_no, f"{what} must be 1 or 2 bits of 0/1, got {bits!r}")
    return bits


def serialize_genome(genome: SdaGenome) -> str:
    """states/init header, then one `emission next_on_0 next_on_1` line
    per state."""
    lines = [f"states {genome.num_states}", f"init {genome.initial_emission}"]
    for s in genome.states:
        lines.append(f"{s.emission} {s.next_on_0} {s.next_on_1}")
    return "\n".join(lines) + "\n"


def parse_genome(text: str) -> SdaGenome:
    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "empty genome file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "states":
        raise ParseError(1, f"expected 'states <count>', got {lines[0]!r}")
    try:
        n = int(head[1])
    except ValueError:
        raise ParseError(1, f"state count is not an integer: {head[1]!r}") from None
    if n < 1:
        raise ParseError(1, f"state count must be positive, got {n}")
    if len(lines) < 2:
        raise ParseError(2, "missing 'init <bits>' line")
    init = lines[1].split()
    if len(init) != 2 or init[0] != "init":
        raise ParseError(2, f"expected 'init <bits>', got {lines[1]!r}")
    initial_emission = _check_bits(2, init[1], "initial emission")
    states = []
    for i in range(n):
        line_no = 3 + i
        if line_no > len(lines):
            raise ParseError(line_no, f"expected {n} state lines, found {i}")
        parts = lines[line_no - 1].split()
        if len(parts) != 3:
            raise ParseError(
                line_no, f"expected 'emission next_on_0 next_on_1', got {lines[line_no - 1]!r}"
            )
        emission = _check_bits(line_no, parts[0], "emission")
        try:
            n0, n1 = int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError(line_no, f"transitions must be integers: {lines[line_no - 1]!r}") from None
        for t in (n0, n1):
            if not 0 <= t < n:
                raise ParseError(line_no, f"transition target {t} out of range 0..{n - 1}")
        states.append(StateRecord(emission, n0, n1))
    for extra in range(n + 2, len(lines)):
        if lines[extra].strip():
            raise ParseError(extra + 1, f"unexpected trailing content: {lines[extra]!r}")
    return SdaGenome(initial_emission, tuple(states))


def _parse_size_header(lines, what: str) -> tuple[int, int]:
    if not lines:
        raise ParseError(1, f"empty {what} file")
    parts = lines[0].split()
    try:
        if len(parts) != 2:
            raise ValueError
        width, height = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(1, f"expected '<width> <height>', got {lines[0]!r}") from None
    if width < 1 or height < 1:
        raise ParseError(1, f"size must be positive, got {width}x{height}")
    return width, height


def _body_rows(lines, width, height, charset, what):
    if len(lines) < height + 1:
        raise ParseError(len(lines) + 1, f"expected {height} {what} rows, found {len(lines) - 1}")
    rows = []
    for y in range(height):
        line_no = 2 + y
        row = lines[line_no - 1]
        if len(row) != width:
            raise ParseError(line_no, f"row is {len(row)} cells wide, expected {width}")
        for c in row:
            if c not in charset:
                raise ParseError(line_no, f"illegal cell character {c!r}")
        rows.append(row)
    for extra in range(height + 1, len(lines)):
        if lines[extra].strip():
            raise ParseError(extra + 1, f"unexpected trailing content: {lines[extra]!r}")
    return rows


def serialize_mask(mask: np.ndarray) -> str:
    """Size header, then '#' for forbidden cells and '.' for open ones."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    lines = [f"{w} {h}"]
    for row in mask:
        lines.append("".join("#" if v else "." for v in row))
    return "\n".join(lines) + "\n"


def parse_mask(text: str) -> np.ndarray:
    lines = text.splitlines()
    width, height = _parse_size_header(lines, "mask")
    rows = _body_rows(lines, width, height, frozenset(".#"), "mask")
    mask = np.zeros((height, width), dtype=bool)
    for y, row in enumerate(rows):
        for x, c in enumerate(row):
            mask[y, x] = c == "#"
    return mask


def render_map_text(level: LevelMap) -> str:
    """Size header, then '#' forbidden, '.' empty, and S/R/C for cells of
    start rooms, plain rooms, and corridors."""
    kind_char = [KIND_CHARS[r.kind] for r in level.rooms]
    lines = [f"{level.width} {level.height}"]
    for row in level.cells:
        lines.append(
            "".join(
                "#" if v == FORBIDDEN else "." if v == EMPTY else kind_char[v] for v in row
            )
        )
    return "\n".join(lines) + "\n"


def parse_map_text(text: str) -> tuple[int, int, list[str]]:
    """Validate a map dump and return (width, height, rows of class chars)."""
    lines = text.splitlines()
    width, height = _parse_size_header(lines, "map")
    rows = _body_rows(lines, width, height, MAP_CHARS, "map")
    return width, height, rows
