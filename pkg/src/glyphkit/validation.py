"""Instruction-set validation.

Errors mean a box cannot be rendered at all; warnings flag layouts that
render but tend to produce bad generations downstream (overlapping boxes,
near-invisible font sizes, text swinging past the canvas edge).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import RowsExceedWords, Unrenderable
from .geometry import convex_intersection_area
from .instructions import MIN_CANVAS_SIDE, GlyphInstructionSet, TextBox
from .render import BoxLayout, layout_box

TINY_FONT_PX = 8
_AREA_EPS = 1e-6

ERROR_CODES = ("OutOfRange", "EmptyText", "RowsExceedWords", "BoxExceedsCanvas")
WARNING_CODES = ("Overlap", "TinyFont", "BorderClip")


@dataclass(frozen=True)
class Issue:
    box_index: int | None
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[Issue, ...] = ()
    warnings: tuple[Issue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "errors": [vars(i) for i in self.errors],
            "warnings": [vars(i) for i in self.warnings],
        }


@dataclass
class _Collector:
    errors: list[Issue] = field(default_factory=list)
    warnings: list[Issue] = field(default_factory=list)

    def error(self, idx: int | None, code: str, message: str) -> None:
        self.errors.append(Issue(idx, code, message))

    def warning(self, idx: int | None, code: str, message: str) -> None:
        self.warnings.append(Issue(idx, code, message))


def validate(instr: GlyphInstructionSet) -> ValidationReport:
    """Check every box; pure and deterministic for identical inputs."""
    out = _Collector()
    canvas = instr.canvas
    if canvas.width < MIN_CANVAS_SIDE or canvas.height < MIN_CANVAS_SIDE:
        out.error(None, "OutOfRange", f"canvas {canvas.width}x{canvas.height} below minimum side {MIN_CANVAS_SIDE}")

    layouts: dict[int, BoxLayout] = {}
    for idx, box in enumerate(instr.boxes):
        layout = _check_box(idx, box, instr, out)
        if layout is not None:
            layouts[idx] = layout

    for idx, layout in layouts.items():
        _check_geometry(idx, layout, instr, out)

    indices = sorted(layouts)
    for pos, i in enumerate(indices):
        for j in indices[pos + 1 :]:
            area = convex_intersection_area(layouts[i].polygon(), layouts[j].polygon())
            if area > _AREA_EPS:
                out.warning(i, "Overlap", f"rotated boxes {i} and {j} intersect with area {area:.1f}px^2")

    return ValidationReport(errors=tuple(out.errors), warnings=tuple(out.warnings))


def _check_box(idx: int, box: TextBox, instr: GlyphInstructionSet, out: _Collector) -> BoxLayout | None:
    if not isinstance(box.text, str) or not box.text.strip():
        out.error(idx, "EmptyText", f"box {idx}: text is empty or whitespace")
        return None
    field_ranges = (
        ("x", box.x, 0.0 <= box.x < 1.0, "[0,1)"),
        ("y", box.y, 0.0 <= box.y < 1.0, "[0,1)"),
        ("width", box.width, 0.0 < box.width <= 1.0, "(0,1]"),
        ("yaw_deg", box.yaw_deg, -180.0 <= box.yaw_deg <= 180.0, "[-180,180]"),
    )
    for name, value, in_range, bounds in field_ranges:
        if not (isinstance(value, (int, float)) and math.isfinite(value) and in_range):
            out.error(idx, "OutOfRange", f"box {idx}: {name}={value} outside {bounds}")
            return None
    if box.ratio is not None and not (math.isfinite(box.ratio) and box.ratio > 0):
        out.error(idx, "OutOfRange", f"box {idx}: ratio={box.ratio} must be positive")
        return None
    if not isinstance(box.rows, int) or box.rows < 1:
        out.error(idx, "OutOfRange", f"box {idx}: rows={box.rows} must be a positive integer")
        return None

    word_count = len(box.text.split())
    if box.rows > word_count:
        out.error(idx, "RowsExceedWords", f"box {idx}: {box.rows} rows exceed {word_count} word(s)")
        return None
    try:
        return layout_box(box, instr.canvas)
    except RowsExceedWords:
        out.error(idx, "RowsExceedWords", f"box {idx}: {box.rows} rows exceed {word_count} word(s)")
    except Unrenderable as exc:
        out.error(idx, "OutOfRange", f"box {idx}: width too small for its text ({exc})")
    return None


def _check_geometry(idx: int, layout: BoxLayout, instr: GlyphInstructionSet, out: _Collector) -> None:
    W, H = instr.canvas.width, instr.canvas.height
    poly = layout.polygon()
    canvas_rect = [(0.0, 0.0), (float(W), 0.0), (float(W), float(H)), (0.0, float(H))]
    if convex_intersection_area(poly, canvas_rect) <= _AREA_EPS:
        out.error(idx, "BoxExceedsCanvas", f"box {idx}: rotated box lies entirely outside the {W}x{H} canvas")
        return
    if layout.font_size < TINY_FONT_PX:
        out.warning(idx, "TinyFont", f"box {idx}: fitted font size {layout.font_size}px is below {TINY_FONT_PX}px")
    clipped = any(not (0.0 <= px <= W and 0.0 <= py <= H) for px, py in poly)
    if clipped:
        out.warning(idx, "BorderClip", f"box {idx}: rotated box corner leaves the {W}x{H} canvas")
