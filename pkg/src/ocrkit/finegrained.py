"""Region-guided OCR task construction.

Covers bounding-box quantization to the [0, 1000] prompt grid, colored-frame
draw instructions for color-guided tasks, reading-order serialization of
(box, text) annotations, and integer crop instructions for region slicing.
All outputs are declarative; no pixels are touched here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .tiling import ImageDims

NORM_SCALE = 1000

COLOR_RGB = {
    "red": (255, 0, 0),
    "green": (0, 255, 0),
    "blue": (0, 0, 255),
}

# Prompt templates, version 1. {box} is NormBox.prompt_text(), {color} a COLOR_RGB key.
BOX_PROMPT_TEMPLATE = "OCR the text in region {box}:"
COLOR_PROMPT_TEMPLATE = "OCR the text in the {color} box:"


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in source pixels; coordinates may be fractional."""

    x1: float
    y1: float
    x2: float
    y2: float


@dataclass(frozen=True)
class NormBox:
    """Box quantized to the [0, 1000] grid used inside prompts."""

    x1: int
    y1: int
    x2: int
    y2: int

    def __post_init__(self):
        for v in (self.x1, self.y1, self.x2, self.y2):
            if not 0 <= v <= NORM_SCALE:
                raise ValueError(f"normalized coordinate {v} outside [0, {NORM_SCALE}]")
        if self.x1 > self.x2 or self.y1 > self.y2:
            raise ValueError("normalized box is inverted")

    def prompt_text(self) -> str:
        return f"[{self.x1},{self.y1},{self.x2},{self.y2}]"


@dataclass(frozen=True)
class ColorPrompt:
    color: str
    frame_thickness: int = 3

    def __post_init__(self):
        if self.color not in COLOR_RGB:
            raise ValueError(f"color must be one of {sorted(COLOR_RGB)}, got {self.color!r}")
        if self.frame_thickness < 1:
            raise ValueError("frame_thickness must be positive")


@dataclass(frozen=True)
class FrameSpec:
    """Rectangle-outline draw instruction for an external rasterizer."""

    box: BBox
    rgb: tuple[int, int, int]
    thickness: int


@dataclass(frozen=True)
class CropSpec:
    """Integer pixel crop, min edges floored and max edges ceiled."""

    x1: int
    y1: int
    x2: int
    y2: int


def check_box(box: BBox, dims: ImageDims | None = None) -> None:
    """Raise if the box is inverted or (when dims given) out of bounds."""
    if not (box.x1 < box.x2 and box.y1 < box.y2):
        raise ValueError(f"box {box} is inverted or empty")
    if dims is not None:
        if box.x1 < 0 or box.y1 < 0 or box.x2 > dims.width or box.y2 > dims.height:
            raise ValueError(f"box {box} outside image {dims.width}x{dims.height}")


def _quantize(coord: float, dim: int) -> int:
    scaled = math.floor(coord * NORM_SCALE / dim + 0.5)  # round half up
    return min(max(scaled, 0), NORM_SCALE)


def normalize_box(box: BBox, dims: ImageDims) -> NormBox:
    """Map source-pixel coordinates onto the [0, 1000] grid (round half up)."""
    check_box(box, dims)
    return NormBox(
        _quantize(box.x1, dims.width),
        _quantize(box.y1, dims.height),
        _quantize(box.x2, dims.width),
        _quantize(box.y2, dims.height),
    )


def denormalize_box(nbox: NormBox, dims: ImageDims) -> BBox:
    """Inverse grid mapping; within dim/2000 px of the original per edge."""
    return BBox(
        nbox.x1 * dims.width / NORM_SCALE,
        nbox.y1 * dims.height / NORM_SCALE,
        nbox.x2 * dims.width / NORM_SCALE,
        nbox.y2 * dims.height / NORM_SCALE,
    )


def color_frame_spec(box: BBox, prompt: ColorPrompt) -> FrameSpec:
    check_box(box)
    return FrameSpec(box, COLOR_RGB[prompt.color], prompt.frame_thickness)


def box_guided_prompt(nbox: NormBox) -> str:
    return BOX_PROMPT_TEMPLATE.format(box=nbox.prompt_text())


def color_guided_prompt(color: str) -> str:
    if color not in COLOR_RGB:
        raise ValueError(f"color must be one of {sorted(COLOR_RGB)}, got {color!r}")
    return COLOR_PROMPT_TEMPLATE.format(color=color)


def _same_row(a: BBox, b: BBox) -> bool:
    overlap = min(a.y2, b.y2) - max(a.y1, b.y1)
    smaller = min(a.y2 - a.y1, b.y2 - b.y1)
    return overlap >= 0.5 * smaller


def reading_order_serialize(items: list[tuple[BBox, str]]) -> str:
    """Join texts top-to-bottom, left-to-right.

    Boxes whose vertical overlap covers at least half the smaller height share
    a row (closed transitively); rows are ordered by top edge, texts within a
    row by x1, joined with spaces, and rows joined with newlines. The result
    does not depend on the input order.
    """
    if not items:
        return ""
    for box, _ in items:
        check_box(box)
    n = len(items)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if _same_row(items[i][0], items[j][0]):
                parent[find(i)] = find(j)

    rows: dict[int, list[tuple[BBox, str]]] = {}
    for i in range(n):
        rows.setdefault(find(i), []).append(items[i])
    ordered_rows = sorted(
        rows.values(), key=lambda row: min((b.y1, b.x1) for b, _ in row)
    )
    lines = []
    for row in ordered_rows:
        row.sort(key=lambda item: (item[0].x1, item[0].y1, item[0].x2, item[0].y2, item[1]))
        lines.append(" ".join(text for _, text in row))
    return "\n".join(lines)


def crop_regions(dims: ImageDims, boxes: list[BBox]) -> list[CropSpec]:
    """One integer crop instruction per box, input order preserved."""
    specs = []
    for box in boxes:
        check_box(box, dims)
        specs.append(
            CropSpec(
                math.floor(box.x1), math.floor(box.y1), math.ceil(box.x2), math.ceil(box.y2)
            )
        )
    return specs
