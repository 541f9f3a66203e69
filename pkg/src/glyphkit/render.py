"""Deterministic rasterization of instruction sets into whiteboard glyph images.

The output is an 8-bit grayscale canvas: 255 everywhere except where text
ink lands. Each box is laid out in canvas pixels, rasterized monochrome at
a fixed 4x oversampling, rotated about its top-left anchor, box-averaged
down to canvas resolution (this is the antialiasing) and composited with
per-pixel min so overlapping strokes all survive. Every step is pure
integer or fixed float arithmetic over the bundled font, so identical
inputs give byte-identical images on every run.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from io import BytesIO

import numpy as np
from PIL import Image, ImageDraw

from . import fonts
from .errors import RowsExceedWords, Unrenderable
from .geometry import rotated_rect_corners
from .instructions import CanvasSpec, GlyphInstructionSet, TextBox

OVERSAMPLE = fonts.OVERSAMPLE
MAX_FONT_PX = 4096
INK_THRESHOLD = 128


@dataclass(frozen=True)
class GlyphImage:
    width: int
    height: int
    pixels: bytes  # row-major, 255 = white background, 0 = full ink

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(self.height, self.width)

    def png_bytes(self) -> bytes:
        buf = BytesIO()
        Image.frombytes("L", (self.width, self.height), self.pixels).save(buf, format="PNG")
        return buf.getvalue()

    def write_png(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.png_bytes())

    def raw_bytes(self) -> bytes:
        return struct.pack("<II", self.width, self.height) + self.pixels


def glyph_image_from_array(arr: np.ndarray) -> GlyphImage:
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    h, w = arr.shape
    return GlyphImage(width=w, height=h, pixels=arr.tobytes())


def read_raw(data: bytes) -> GlyphImage:
    w, h = struct.unpack_from("<II", data)
    pixels = data[8:]
    if len(pixels) != w * h:
        raise ValueError(f"raw buffer holds {len(pixels)} bytes, expected {w}x{h}")
    return GlyphImage(width=w, height=h, pixels=pixels)


@dataclass(frozen=True)
class PlacedLine:
    text: str
    font_size: int
    baseline_origin: tuple[float, float]  # pre-rotation, box-local pixels
    advance_width: float


@dataclass(frozen=True)
class BoxLayout:
    """Pixel-space plan for one text box on a specific canvas."""

    anchor_x: int
    anchor_y: int
    width_px: int
    height_px: int
    font_size: int
    lines: tuple[PlacedLine, ...]
    yaw_deg: float

    def polygon(self) -> list[tuple[float, float]]:
        """Rotated box corners in canvas pixel coordinates."""
        return rotated_rect_corners(
            self.anchor_x, self.anchor_y, self.width_px, self.height_px, self.yaw_deg
        )


def split_rows(text: str, rows: int) -> list[str]:
    """Split whitespace-normalized text into `rows` lines of words.

    Among all contiguous partitions of the words into `rows` non-empty
    groups, returns the one minimizing the longest line's character count;
    ties prefer earlier break points.
    """
    words = text.split()
    if rows < 1 or rows > len(words):
        raise RowsExceedWords(f"cannot split {len(words)} word(s) into {rows} row(s)")
    if rows == 1:
        return [" ".join(words)]

    lengths = [len(w) for w in words]

    def min_rows_needed(start: int, cap: int) -> int:
        """Greedy count of lines needed for words[start:] at line length <= cap."""
        count = 0
        i = start
        n = len(words)
        while i < n:
            line_len = lengths[i]
            if line_len > cap:
                return n + 1  # single word exceeds cap: infeasible
            i += 1
            while i < n and line_len + 1 + lengths[i] <= cap:
                line_len += 1 + lengths[i]
                i += 1
            count += 1
        return count

    # Binary search the minimal achievable maximum line length.
    lo = max(lengths)
    hi = sum(lengths) + len(lengths) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if min_rows_needed(0, mid) <= rows:
            hi = mid
        else:
            lo = mid + 1
    best = lo

    # Emit rows greedily short-first: each row takes the fewest words that
    # keep the remainder feasible, which yields the earliest break points.
    out: list[str] = []
    i = 0
    for row in range(rows):
        remaining_rows = rows - row - 1
        if remaining_rows == 0:
            out.append(" ".join(words[i:]))
            break
        line = words[i]
        line_len = lengths[i]
        i += 1
        while True:
            words_left = len(words) - i
            if words_left <= remaining_rows:
                break  # must leave one word per remaining row
            if line_len + 1 + lengths[i] > best:
                break
            if min_rows_needed(i, best) <= remaining_rows:
                break  # remainder already fits: break as early as possible
            line = line + " " + words[i]
            line_len += 1 + lengths[i]
            i += 1
        out.append(line)
    return out


def fit_font_size(rows: list[str], box_width_px: float, box_height_px: float | None = None) -> int:
    """Largest integer font size whose rows fit the box.

    Every row's advance must stay within the box width; when a height is
    given, the stacked line heights must fit it too. Without a height the
    box is as tall as the rows need.
    """
    if box_width_px < 1:
        raise Unrenderable(f"box width {box_width_px}px is below 1px")
    n = len(rows)

    def fits(size: int) -> bool:
        if box_height_px is not None and n * fonts.line_height(size) > box_height_px:
            return False
        return all(fonts.advance_width(r, size) <= box_width_px for r in rows)

    if not fits(1):
        raise Unrenderable(f"text does not fit a {box_width_px}px-wide box at any size")
    lo = 1
    hi = 2
    while hi <= MAX_FONT_PX and fits(hi):
        lo = hi
        hi *= 2
    if hi > MAX_FONT_PX:
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fits(mid):
            lo = mid
        else:
            hi = mid
    return lo


def layout_box(box: TextBox, canvas: CanvasSpec) -> BoxLayout:
    """Resolve a normalized box into pixels, rows, font size and baselines."""
    width_px = max(1, round(box.width * canvas.width))
    rows = split_rows(box.text, box.rows)
    if box.ratio is not None:
        height_px = max(1, round(width_px / box.ratio))
        size = fit_font_size(rows, width_px, height_px)
    else:
        size = fit_font_size(rows, width_px, None)
        height_px = max(1, math.ceil(len(rows) * fonts.line_height(size)))

    line_h = fonts.line_height(size)
    asc = fonts.ascent(size)
    slot = height_px / len(rows)
    lines = []
    for i, row in enumerate(rows):
        adv = fonts.advance_width(row, size)
        x_off = (width_px - adv) / 2.0
        top = i * slot + (slot - line_h) / 2.0
        lines.append(
            PlacedLine(
                text=row,
                font_size=size,
                baseline_origin=(x_off, top + asc),
                advance_width=adv,
            )
        )
    return BoxLayout(
        anchor_x=round(box.x * canvas.width),
        anchor_y=round(box.y * canvas.height),
        width_px=width_px,
        height_px=height_px,
        font_size=size,
        lines=tuple(lines),
        yaw_deg=_normalize_yaw(box.yaw_deg),
    )


@dataclass(frozen=True)
class RenderIssue:
    box_index: int
    code: str
    message: str


def render(instr: GlyphInstructionSet, issues: list[RenderIssue] | None = None) -> GlyphImage:
    """Rasterize an instruction set onto a fresh white canvas.

    Boxes that cannot be laid out are skipped; the failure is appended to
    `issues` when a log list is supplied. Output bytes depend only on the
    input, never on thread count or call order.
    """
    W, H = instr.canvas.width, instr.canvas.height
    canvas = np.full((H, W), 255, dtype=np.uint8)
    for idx, box in enumerate(instr.boxes):
        try:
            layout = layout_box(box, instr.canvas)
        except (RowsExceedWords, Unrenderable) as exc:
            if issues is not None:
                issues.append(RenderIssue(idx, type(exc).__name__, str(exc)))
            continue
        tile, origin = render_box_tile(layout)
        _composite_min(canvas, tile, origin)
    return glyph_image_from_array(canvas)


def render_box_tile(layout: BoxLayout) -> tuple[np.ndarray, tuple[int, int]]:
    """Rotated, antialiased raster of one box plus its canvas paste origin."""
    tile4 = _rasterize_upright(layout)
    yaw = layout.yaw_deg
    w1, h1 = layout.width_px, layout.height_px
    ax, ay = layout.anchor_x, layout.anchor_y

    if yaw == 0.0:
        return _downsample(tile4), (ax, ay)

    if yaw % 90.0 == 0.0:
        k = round(yaw / 90.0) % 4
        tile1 = np.rot90(_downsample(tile4), k)
        offset = {1: (0, -w1), 2: (-w1, -h1), 3: (-h1, 0)}[k]
        return tile1, (ax + offset[0], ay + offset[1])

    image4 = Image.fromarray(tile4, "L")
    rot4 = image4.rotate(yaw, resample=Image.BILINEAR, expand=True, fillcolor=255)
    corners = rotated_rect_corners(0.0, 0.0, float(w1), float(h1), yaw)
    min_x = min(p[0] for p in corners)
    min_y = min(p[1] for p in corners)
    origin4_x = OVERSAMPLE * ax + round(OVERSAMPLE * min_x)
    origin4_y = OVERSAMPLE * ay + round(OVERSAMPLE * min_y)

    arr4 = np.asarray(rot4, dtype=np.uint8)
    pad_left = origin4_x % OVERSAMPLE
    pad_top = origin4_y % OVERSAMPLE
    pad_right = -(arr4.shape[1] + pad_left) % OVERSAMPLE
    pad_bottom = -(arr4.shape[0] + pad_top) % OVERSAMPLE
    arr4 = np.pad(
        arr4,
        ((pad_top, pad_bottom), (pad_left, pad_right)),
        mode="constant",
        constant_values=255,
    )
    return _downsample(arr4), ((origin4_x - pad_left) // OVERSAMPLE, (origin4_y - pad_top) // OVERSAMPLE)


def measure_ink(image: GlyphImage) -> tuple[int, tuple[int, int, int, int] | None]:
    """Ink pixel count and the tight (x, y, w, h) hull of ink, if any."""
    arr = image.to_array()
    mask = arr < INK_THRESHOLD
    count = int(mask.sum())
    if count == 0:
        return 0, None
    ys, xs = np.nonzero(mask)
    x0, x1 = int(xs.min()), int(xs.max())
    y0, y1 = int(ys.min()), int(ys.max())
    return count, (x0, y0, x1 - x0 + 1, y1 - y0 + 1)


def _rasterize_upright(layout: BoxLayout) -> np.ndarray:
    """Monochrome oversampled raster of the box's rows, white background."""
    w4 = layout.width_px * OVERSAMPLE
    h4 = layout.height_px * OVERSAMPLE
    img = Image.new("1", (w4, h4), 1)
    draw = ImageDraw.Draw(img)
    for line in layout.lines:
        face = fonts.oversampled_face(line.font_size * OVERSAMPLE)
        asc = fonts.ascent(line.font_size)
        x, baseline = line.baseline_origin
        top = baseline - asc
        draw.text(
            (round(OVERSAMPLE * x), round(OVERSAMPLE * top)),
            line.text,
            font=face,
            fill=0,
        )
    return np.asarray(img.convert("L"), dtype=np.uint8)


def _downsample(arr4: np.ndarray) -> np.ndarray:
    """4x4 box average with round-half-up, the fixed antialiasing filter."""
    h4, w4 = arr4.shape
    sums = arr4.astype(np.uint16).reshape(h4 // OVERSAMPLE, OVERSAMPLE, w4 // OVERSAMPLE, OVERSAMPLE)
    total = sums.sum(axis=(1, 3), dtype=np.uint16)
    return ((total + 8) // 16).astype(np.uint8)


def _composite_min(canvas: np.ndarray, tile: np.ndarray, origin: tuple[int, int]) -> None:
    H, W = canvas.shape
    th, tw = tile.shape
    x0, y0 = origin
    cx0, cy0 = max(x0, 0), max(y0, 0)
    cx1, cy1 = min(x0 + tw, W), min(y0 + th, H)
    if cx0 >= cx1 or cy0 >= cy1:
        return
    sub = canvas[cy0:cy1, cx0:cx1]
    np.minimum(sub, tile[cy0 - y0 : cy1 - y0, cx0 - x0 : cx1 - x0], out=sub)


def _normalize_yaw(yaw: float) -> float:
    if yaw == -180.0:
        return 180.0
    return yaw
