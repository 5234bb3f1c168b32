"""Grid level maps grown from an automaton bit stream.

The builder repeatedly decodes a fixed-width placement proposal from the
stream (which room to build against, which side, what shape, how far
along that side), then places it only when the whole footprint sits on
free grid cells. Rejected proposals consume exactly as many bits as
accepted ones, so the stream position depends only on the proposal
count.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from sdamap.sda import SdaGenome, SdaStream

EMPTY = -1
FORBIDDEN = -2

ROOM_DIMS = (2, 2, 3, 4)  # two-bit shape code; side length 2 is twice as likely
CORRIDOR_MAX_LEN = 16
PROPOSAL_BITS = 20
PROPOSAL_BITS_RRH = 16
SELECTOR_LIMIT = 256  # an 8-bit selector cannot address rooms past this


class Side(Enum):
    ABOVE = "above"
    BELOW = "below"
    LEFT = "left"
    RIGHT = "right"


SIDE_CODES = (Side.ABOVE, Side.BELOW, Side.LEFT, Side.RIGHT)


class RoomKind(Enum):
    START = "start"
    ROOM = "room"
    CORRIDOR = "corridor"


@dataclass(frozen=True)
class Room:
    """A placed rectangle. Coordinates are the top-left cell."""

    id: int
    x: int
    y: int
    w: int
    h: int
    kind: RoomKind

    def __post_init__(self) -> None:
        if self.kind is RoomKind.ROOM:
            if not (2 <= self.w <= 4 and 2 <= self.h <= 4):
                raise ValueError(f"room sides must be 2..4, got {self.w}x{self.h}")
        elif self.kind is RoomKind.CORRIDOR:
            ok = (self.w == 1 and 1 <= self.h <= CORRIDOR_MAX_LEN) or (
                self.h == 1 and 1 <= self.w <= CORRIDOR_MAX_LEN
            )
            if not ok:
                raise ValueError(f"corridor must be 1 wide and 1..16 long, got {self.w}x{self.h}")
        elif self.w < 1 or self.h < 1:
            raise ValueError(f"start room sides must be positive, got {self.w}x{self.h}")

    @property
    def area(self) -> int:
        return self.w * self.h


@dataclass(frozen=True)
class RoomProposal:
    """Decoded placement request, not yet checked against the grid."""

    focal_id: int
    side: Side
    kind: RoomKind
    x: int
    y: int
    w: int
    h: int
    offset_value: int


def centered_rect(width: int, height: int, w: int = 4, h: int = 4) -> tuple[int, int, int, int]:
    """Default start footprint: w x h placed at the grid's center."""
    return ((width - w) // 2, (height - h) // 2, w, h)


@dataclass(frozen=True, eq=False)
class BuilderConfig:
    """Everything build_map needs besides the genome.

    forbidden_mask is a bool array of shape (height, width); True cells
    can never be built on. initial_rooms default to a single centered
    4x4 start room.
    """

    width: int = 80
    height: int = 80
    max_rooms: int = 256
    proposal_budget: int = 5000
    rrh_enabled: bool = False
    rrh_window: int = 10
    initial_rooms: tuple[tuple[int, int, int, int], ...] | None = None
    forbidden_mask: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.width}x{self.height}")
        if self.max_rooms < 1:
            raise ValueError("max_rooms must be at least 1")
        if self.proposal_budget < 0:
            raise ValueError("proposal_budget cannot be negative")
        if self.rrh_window < 1:
            raise ValueError("rrh_window must be at least 1")
        if not self.rrh_enabled and self.max_rooms > SELECTOR_LIMIT:
            raise ValueError(
                f"max_rooms above {SELECTOR_LIMIT} needs the recent-room window "
                "(the plain selector cannot address more rooms)"
            )
        if self.initial_rooms is not None:
            if len(self.initial_rooms) == 0:
                raise ValueError("initial_rooms must list at least one room")
            for x, y, w, h in self.initial_rooms:
                if w < 1 or h < 1:
                    raise ValueError(f"initial room sides must be positive, got {w}x{h}")
        if self.forbidden_mask is not None:
            mask = np.asarray(self.forbidden_mask, dtype=bool)
            if mask.shape != (self.height, self.width):
                raise ValueError(
                    f"mask shape {mask.shape} does not match grid "
                    f"({self.height}, {self.width})"
                )
            object.__setattr__(self, "forbidden_mask", mask)

    def start_rooms(self) -> tuple[tuple[int, int, int, int], ...]:
        if self.initial_rooms is not None:
            return self.initial_rooms
        return (centered_rect(self.width, self.height),)


class LevelMap:
    """Mutable build state: cell ownership grid plus the placed rooms.

    cells[y, x] holds EMPTY, FORBIDDEN, or the id of the occupying room.
    """

    def __init__(self, config: BuilderConfig):
        self.width = config.width
        self.height = config.height
        self.cells = np.full((config.height, config.width), EMPTY, dtype=np.int32)
        if config.forbidden_mask is not None:
            self.cells[config.forbidden_mask] = FORBIDDEN
        self.rooms: list[Room] = []
        self.total_area = 0
        self.proposed = 0
        self.rejected = 0
        self.bits_consumed = 0
        self._min_x = self.width
        self._min_y = self.height
        self._max_x = -1
        self._max_y = -1
        for x, y, w, h in config.start_rooms():
            room = Room(len(self.rooms), x, y, w, h, RoomKind.START)
            if not self.admissible(room):
                raise ValueError(
                    f"initial room at {x},{y} size {w}x{h} does not fit on empty cells"
                )
            self._fill(room)

    def admissible(self, p) -> bool:
        """True when p's footprint lies inside the grid on empty cells only."""
        if p.x < 0 or p.y < 0 or p.x + p.w > self.width or p.y + p.h > self.height:
            return False
        return bool((self.cells[p.y : p.y + p.h, p.x : p.x + p.w] == EMPTY).all())

    def _fill(self, room: Room) -> None:
        self.cells[room.y : room.y + room.h, room.x : room.x + room.w] = room.id
        self.rooms.append(room)
        self.total_area += room.area
        self._min_x = min(self._min_x, room.x)
        self._min_y = min(self._min_y, room.y)
        self._max_x = max(self._max_x, room.x + room.w - 1)
        self._max_y = max(self._max_y, room.y + room.h - 1)

    def place(self, proposal: RoomProposal) -> Room:
        """Stamp an admissible proposal onto the grid and record the room."""
        if not self.admissible(proposal):
            raise ValueError("cannot place a proposal whose footprint is not free")
        room = Room(
            len(self.rooms), proposal.x, proposal.y, proposal.w, proposal.h, proposal.kind
        )
        self._fill(room)
        return room

    def bounding_box(self) -> tuple[int, int, int, int]:
        """Tightest (x, y, w, h) rectangle covering every occupied cell.

        Forbidden cells inside the rectangle are included; the box is
        purely geometric.
        """
        return (
            self._min_x,
            self._min_y,
            self._max_x - self._min_x + 1,
            self._max_y - self._min_y + 1,
        )

    def fitness(self) -> float:
        """Occupied area squared over bounding-box area.

        Filling the whole box gives exactly the occupied area; sprawl
        without density, or density without extent, scores lower.
        """
        _, _, w, h = self.bounding_box()
        return self.total_area * self.total_area / (w * h)


def resolve_offset(
    focal: Room, side: Side, w: int, h: int, offset_value: int
) -> tuple[int, int]:
    """Anchor a w x h footprint flush against one side of the focal room.

    Along the shared side there are focal_extent + new_extent - 1
    positions that keep at least one cell of wall in common; the offset
    picks one of them modulo that count, counted from the most negative
    overlapping position.
    """
    if offset_value < 0:
        raise ValueError("offset_value cannot be negative")
    if side is Side.ABOVE or side is Side.BELOW:
        span = focal.w + w - 1
        x = focal.x - w + 1 + offset_value % span
        y = focal.y - h if side is Side.ABOVE else focal.y + focal.h
    else:
        span = focal.h + h - 1
        y = focal.y - h + 1 + offset_value % span
        x = focal.x - w if side is Side.LEFT else focal.x + focal.w
    return x, y


def propose_room(stream: SdaStream, level: LevelMap, config: BuilderConfig) -> RoomProposal:
    """Decode one placement proposal from the stream.

    Field order: focal selector (8 bits modulo the room count, or 4 bits
    over the recent-room window when enabled, where value 0 picks the
    newest room), side (2 bits), corridor flag (3 bits, corridor only
    when all are zero), shape (two 2-bit side codes for a room, one
    4-bit length code giving 1..16 for a corridor, which runs away from
    the focal room), lateral offset (3 bits).
    """
    rooms = level.rooms
    if config.rrh_enabled:
        window = min(config.rrh_window, len(rooms))
        pick = stream.next_int(4) % window
        focal = rooms[len(rooms) - 1 - pick]
    else:
        focal = rooms[stream.next_int(8) % len(rooms)]
    side = SIDE_CODES[stream.next_int(2)]
    if stream.next_int(3) == 0:
        length = stream.next_int(4) + 1
        if side is Side.ABOVE or side is Side.BELOW:
            w, h = 1, length
        else:
            w, h = length, 1
        kind = RoomKind.CORRIDOR
    else:
        w = ROOM_DIMS[stream.next_int(2)]
        h = ROOM_DIMS[stream.next_int(2)]
        kind = RoomKind.ROOM
    offset_value = stream.next_int(3)
    x, y = resolve_offset(focal, side, w, h, offset_value)
    return RoomProposal(focal.id, side, kind, x, y, w, h, offset_value)


def build_map(genome: SdaGenome, config: BuilderConfig | None = None) -> LevelMap:
    """Grow a map by filtering the genome's proposal stream onto the grid.

    Stops once max_rooms stand (initial rooms included) or the proposal
    budget is spent, whichever comes first.
    """
    if config is None:
        config = BuilderConfig()
    level = LevelMap(config)
    stream = SdaStream(genome)
    while len(level.rooms) < config.max_rooms and level.proposed < config.proposal_budget:
        proposal = propose_room(stream, level, config)
        level.proposed += 1
        if level.admissible(proposal):
            level.place(proposal)
        else:
            level.rejected += 1
    level.bits_consumed = stream.consumed_count
    return level
