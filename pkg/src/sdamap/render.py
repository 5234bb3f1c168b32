"""Raster images and report figures for built maps.

render_image produces an uncompressed BMP so identical maps give
identical bytes on any platform; the figure helpers produce matplotlib
PNGs meant for reports, not for byte comparison.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from PIL import Image

from sdamap.mapgen import LevelMap
from sdamap.textio import parse_map_text, render_map_text

Color = tuple[int, int, int]


@dataclass(frozen=True)
class RenderStyle:
    """Cell scale and the fill color per cell class. Colors must be
    pairwise distinct so every class stays readable."""

    cell_size: int = 8
    empty: Color = (255, 255, 255)
    start: Color = (200, 40, 40)
    room: Color = (128, 128, 128)
    corridor: Color = (70, 100, 220)
    forbidden: Color = (173, 216, 230)
    outline: bool = False
    outline_color: Color = (40, 40, 40)

    def __post_init__(self) -> None:
        if self.cell_size < 1:
            raise ValueError(f"cell_size must be positive, got {self.cell_size}")
        fills = [self.empty, self.start, self.room, self.corridor, self.forbidden]
        if len(set(fills)) != len(fills):
            raise ValueError("cell class colors must be pairwise distinct")

    def color_of(self, class_char: str) -> Color:
        return {
            ".": self.empty,
            "#": self.forbidden,
            "S": self.start,
            "R": self.room,
            "C": self.corridor,
        }[class_char]


def class_rows_rgb(rows: list[str], style: RenderStyle) -> np.ndarray:
    """Map dump rows to an unscaled (height, width, 3) uint8 array."""
    height, width = len(rows), len(rows[0])
    rgb = np.empty((height, width, 3), dtype=np.uint8)
    for y, row in enumerate(rows):
        for x, c in enumerate(row):
            rgb[y, x] = style.color_of(c)
    return rgb


def _encode_bmp(rgb: np.ndarray, cell_size: int) -> bytes:
    scaled = np.repeat(np.repeat(rgb, cell_size, axis=0), cell_size, axis=1)
    buf = io.BytesIO()
    Image.fromarray(scaled).save(buf, format="BMP")
    return buf.getvalue()


def render_image(level: LevelMap, style: RenderStyle | None = None) -> bytes:
    """BMP bytes for a map, one cell_size square per grid cell."""
    if style is None:
        style = RenderStyle()
    rows = render_map_text(level).splitlines()[1:]
    rgb = class_rows_rgb(rows, style)
    s = style.cell_size
    scaled = np.repeat(np.repeat(rgb, s, axis=0), s, axis=1)
    if style.outline:
        for room in level.rooms:
            x0, y0 = room.x * s, room.y * s
            x1, y1 = (room.x + room.w) * s - 1, (room.y + room.h) * s - 1
            scaled[y0, x0 : x1 + 1] = style.outline_color
            scaled[y1, x0 : x1 + 1] = style.outline_color
            scaled[y0 : y1 + 1, x0] = style.outline_color
            scaled[y0 : y1 + 1, x1] = style.outline_color
    buf = io.BytesIO()
    Image.fromarray(scaled).save(buf, format="BMP")
    return buf.getvalue()


def render_image_from_text(map_text: str, style: RenderStyle | None = None) -> bytes:
    """BMP bytes straight from a map dump (no outline support: dumps do
    not keep room identity)."""
    if style is None:
        style = RenderStyle()
    _, _, rows = parse_map_text(map_text)
    return _encode_bmp(class_rows_rgb(rows, style), style.cell_size)


def _save_rgb_figure(rgb: np.ndarray, path, title: str | None) -> None:
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.imshow(rgb, interpolation="nearest")
    ax.set_xticks(())
    ax.set_yticks(())
    if title:
        ax.set_title(title)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def save_map_figure(level: LevelMap, path, style: RenderStyle | None = None, title: str | None = None) -> None:
    """Report figure of one map with its headline numbers."""
    if style is None:
        style = RenderStyle()
    rows = render_map_text(level).splitlines()[1:]
    if title is None:
        title = (
            f"rooms {len(level.rooms)}  area {level.total_area}  "
            f"fitness {level.fitness():.2f}"
        )
    _save_rgb_figure(class_rows_rgb(rows, style), path, title)


def save_text_figure(map_text: str, path, style: RenderStyle | None = None, title: str | None = None) -> None:
    """Report figure straight from a map dump."""
    if style is None:
        style = RenderStyle()
    _, _, rows = parse_map_text(map_text)
    _save_rgb_figure(class_rows_rgb(rows, style), path, title)


def save_trace_figure(runs, path, total_events: int | None = None, title: str | None = None) -> None:
    """Step plot of best-so-far fitness per run against mating events."""
    runs = list(runs)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for i, run in enumerate(runs):
        events = [e for e, _ in run.fitness_trace]
        values = [v for _, v in run.fitness_trace]
        if total_events is not None and events[-1] < total_events:
            events.append(total_events)
            values.append(values[-1])
        ax.step(events, values, where="post", linewidth=1.0, label=f"run {i}")
    ax.set_xlabel("mating events")
    ax.set_ylabel("best fitness so far")
    if title:
        ax.set_title(title)
    if len(runs) <= 10:
        ax.legend(fontsize="small")
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
