"""Dynamic-resolution tile planning and page-stitch layout.

Oversized images are split into at most ``max_tiles`` window-sized tiles by
picking the grid whose column/row ratio best matches the image aspect ratio;
multi-page inputs are stitched edge to edge into one large canvas. Both plans
are pure geometry and serialize into corpus record meta maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

TILE_PX = 1024

Orientation = Literal["horizontal", "vertical"]


@dataclass(frozen=True)
class ImageDims:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dims must be positive, got {self.width}x{self.height}")


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    w: int
    h: int


@dataclass(frozen=True)
class TilePlan:
    grid_cols: int
    grid_rows: int
    include_thumbnail: bool
    tile_rects: tuple[Rect, ...]
    tile_px: int = TILE_PX

    @property
    def n_tiles(self) -> int:
        return self.grid_cols * self.grid_rows

    def to_meta(self) -> dict[str, str]:
        return {
            "tile_grid": f"{self.grid_cols}x{self.grid_rows}",
            "tile_px": str(self.tile_px),
            "tile_thumbnail": "1" if self.include_thumbnail else "0",
            "tile_rects": ";".join(f"{r.x},{r.y},{r.w},{r.h}" for r in self.tile_rects),
        }

    @classmethod
    def from_meta(cls, meta: dict[str, str]) -> "TilePlan":
        cols, rows = (int(v) for v in meta["tile_grid"].split("x"))
        rects = tuple(
            Rect(*(int(v) for v in part.split(",")))
            for part in meta["tile_rects"].split(";")
            if part
        )
        return cls(cols, rows, meta["tile_thumbnail"] == "1", rects, int(meta["tile_px"]))


@dataclass(frozen=True)
class Placement:
    page_index: int
    x: int
    y: int
    dims: ImageDims


@dataclass(frozen=True)
class StitchSpec:
    orientation: Orientation
    canvas: ImageDims
    placements: tuple[Placement, ...]

    def to_meta(self) -> dict[str, str]:
        parts = ";".join(
            f"{p.page_index}:{p.x},{p.y},{p.dims.width},{p.dims.height}" for p in self.placements
        )
        return {
            "stitch_orientation": self.orientation,
            "stitch_canvas": f"{self.canvas.width}x{self.canvas.height}",
            "stitch_placements": parts,
        }

    @classmethod
    def from_meta(cls, meta: dict[str, str]) -> "StitchSpec":
        cw, ch = (int(v) for v in meta["stitch_canvas"].split("x"))
        placements = []
        for part in meta["stitch_placements"].split(";"):
            idx, rest = part.split(":")
            x, y, w, h = (int(v) for v in rest.split(","))
            placements.append(Placement(int(idx), x, y, ImageDims(w, h)))
        return cls(meta["stitch_orientation"], ImageDims(cw, ch), tuple(placements))


def _cuts(total: int, parts: int) -> list[int]:
    # round-half-up of the ideal fractional cut i*total/parts, exactly in integers
    return [(2 * i * total + parts) // (2 * parts) for i in range(parts + 1)]


def plan_tiles(dims: ImageDims, max_tiles: int = 12, thumbnail: bool = True) -> TilePlan:
    """Pick the grid (cols, rows) with cols*rows <= max_tiles closest in ratio
    to the image; ties prefer fewer tiles, then fewer columns.

    Comparisons of |w/h - c/r| use exact integer cross-multiplication. Tile
    rectangles are the equal grid cells with round-half-up integer boundaries,
    so they partition the image exactly. A thumbnail accompanies every
    multi-tile plan unless disabled.
    """
    if max_tiles < 1:
        raise ValueError("max_tiles must be >= 1")
    w, h = dims.width, dims.height
    best: tuple[int, int] | None = None
    best_num = best_den = 0
    for cols in range(1, max_tiles + 1):
        for rows in range(1, max_tiles // cols + 1):
            num = abs(w * rows - cols * h)  # |w/h - c/r| == num / (h * rows)
            den = h * rows
            if best is None:
                better = True
            else:
                lhs = num * best_den
                rhs = best_num * den
                better = lhs < rhs or (
                    lhs == rhs and (cols * rows, cols) < (best[0] * best[1], best[0])
                )
            if better:
                best = (cols, rows)
                best_num, best_den = num, den
    cols, rows = best
    xs = _cuts(w, cols)
    ys = _cuts(h, rows)
    rects = tuple(
        Rect(xs[i], ys[j], xs[i + 1] - xs[i], ys[j + 1] - ys[j])
        for j in range(rows)
        for i in range(cols)
    )
    return TilePlan(cols, rows, thumbnail and cols * rows > 1, rects)


def stitch_pages(pages: list[ImageDims], orientation: Orientation) -> StitchSpec:
    """Lay pages out edge to edge; horizontal is left-to-right top-aligned,
    vertical is top-to-bottom left-aligned."""
    if len(pages) < 2:
        raise ValueError("stitching needs at least 2 pages")
    if orientation not in ("horizontal", "vertical"):
        raise ValueError(f"unknown orientation {orientation!r}")
    placements = []
    offset = 0
    if orientation == "horizontal":
        for i, page in enumerate(pages):
            placements.append(Placement(i, offset, 0, page))
            offset += page.width
        canvas = ImageDims(offset, max(p.height for p in pages))
    else:
        for i, page in enumerate(pages):
            placements.append(Placement(i, 0, offset, page))
            offset += page.height
        canvas = ImageDims(max(p.width for p in pages), offset)
    return StitchSpec(orientation, canvas, tuple(placements))
