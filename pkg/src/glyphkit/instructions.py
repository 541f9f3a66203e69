"""Glyph instruction model: the contract every other module consumes.

An instruction set is a canvas plus an ordered list of text boxes. Box
coordinates are normalized fractions of the canvas so instructions stay
resolution-independent; `x`/`y` anchor the box top-left corner, `width`
fixes the rendered text width (and thereby the font size), `ratio`
optionally pins the width-to-height ratio, `yaw_deg` rotates the box
counterclockwise about its anchor and `rows` splits the text over lines.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

from . import geometry
from .errors import MalformedSyntax, OutOfRange, SchemaViolation
from .records import OcrRecord

logger = logging.getLogger(__name__)

DEFAULT_CANVAS_SIDE = 512
MIN_CANVAS_SIDE = 64


@dataclass(frozen=True)
class CanvasSpec:
    width: int = DEFAULT_CANVAS_SIDE
    height: int = DEFAULT_CANVAS_SIDE


@dataclass(frozen=True)
class TextBox:
    text: str
    x: float
    y: float
    width: float
    ratio: float | None = None
    yaw_deg: float = 0.0
    rows: int = 1


@dataclass(frozen=True)
class GlyphInstructionSet:
    canvas: CanvasSpec = field(default_factory=CanvasSpec)
    boxes: tuple[TextBox, ...] = ()


@dataclass(frozen=True)
class SkippedQuad:
    """A record quad that could not become a text box."""

    index: int
    reason: str
    detail: str


_TOP_KEYS = {"canvas", "boxes"}
_CANVAS_KEYS = {"width", "height"}
_BOX_KEYS = {"text", "x", "y", "width", "ratio", "yaw_deg", "rows"}


def parse_instructions(raw: bytes | str) -> GlyphInstructionSet:
    """Parse and validate an instruction file.

    Every failure raises a classified error (MalformedSyntax,
    SchemaViolation or OutOfRange) naming the offending box and field;
    no input crashes the parser.
    """
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedSyntax(f"not UTF-8: {exc}") from exc
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, RecursionError) as exc:
        raise MalformedSyntax(f"not valid JSON: {exc}") from exc

    if not isinstance(doc, dict):
        raise SchemaViolation("top level must be an object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise SchemaViolation(f"unknown key {sorted(unknown)[0]!r}", field=sorted(unknown)[0])

    canvas = _parse_canvas(doc.get("canvas"))

    if "boxes" not in doc:
        raise SchemaViolation("missing required key 'boxes'", field="boxes")
    raw_boxes = doc["boxes"]
    if not isinstance(raw_boxes, list):
        raise SchemaViolation("'boxes' must be an array", field="boxes")
    boxes = tuple(_parse_box(i, b) for i, b in enumerate(raw_boxes))
    return GlyphInstructionSet(canvas=canvas, boxes=boxes)


def _parse_canvas(raw: object) -> CanvasSpec:
    if raw is None:
        return CanvasSpec()
    if not isinstance(raw, dict):
        raise SchemaViolation("'canvas' must be an object", field="canvas")
    unknown = set(raw) - _CANVAS_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise SchemaViolation(f"unknown canvas key {key!r}", field=f"canvas.{key}")
    width = _require_int(raw.get("width", DEFAULT_CANVAS_SIDE), "canvas.width")
    height = _require_int(raw.get("height", DEFAULT_CANVAS_SIDE), "canvas.height")
    if width < MIN_CANVAS_SIDE:
        raise OutOfRange(f"canvas.width {width} below minimum {MIN_CANVAS_SIDE}", field="canvas.width")
    if height < MIN_CANVAS_SIDE:
        raise OutOfRange(f"canvas.height {height} below minimum {MIN_CANVAS_SIDE}", field="canvas.height")
    return CanvasSpec(width=width, height=height)


def _parse_box(index: int, raw: object) -> TextBox:
    if not isinstance(raw, dict):
        raise SchemaViolation(f"box {index} must be an object", box_index=index)
    unknown = set(raw) - _BOX_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise SchemaViolation(f"box {index}: unknown key {key!r}", box_index=index, field=key)
    if "text" not in raw:
        raise SchemaViolation(f"box {index}: missing required field 'text'", box_index=index, field="text")
    text = raw["text"]
    if not isinstance(text, str):
        raise SchemaViolation(f"box {index}: 'text' must be a string", box_index=index, field="text")
    if not text.strip():
        raise SchemaViolation(
            f"box {index}: 'text' needs at least one non-whitespace character",
            box_index=index,
            field="text",
        )

    x = _require_number(raw, index, "x")
    y = _require_number(raw, index, "y")
    width = _require_number(raw, index, "width")
    yaw = _require_number(raw, index, "yaw_deg") if "yaw_deg" in raw else 0.0
    ratio = None
    if raw.get("ratio") is not None:
        ratio = _require_number(raw, index, "ratio")
    rows = 1
    if "rows" in raw:
        rows = _require_int(raw["rows"], "rows", box_index=index)

    if not 0.0 <= x < 1.0:
        raise OutOfRange(f"box {index}: x={x} outside [0,1)", box_index=index, field="x")
    if not 0.0 <= y < 1.0:
        raise OutOfRange(f"box {index}: y={y} outside [0,1)", box_index=index, field="y")
    if not 0.0 < width <= 1.0:
        raise OutOfRange(f"box {index}: width={width} outside (0,1]", box_index=index, field="width")
    if ratio is not None and not ratio > 0:
        raise OutOfRange(f"box {index}: ratio={ratio} must be positive", box_index=index, field="ratio")
    if not -180.0 <= yaw <= 180.0:
        raise OutOfRange(f"box {index}: yaw_deg={yaw} outside [-180,180]", box_index=index, field="yaw_deg")
    if rows < 1:
        raise OutOfRange(f"box {index}: rows={rows} must be >= 1", box_index=index, field="rows")
    return TextBox(text=text, x=x, y=y, width=width, ratio=ratio, yaw_deg=yaw, rows=rows)


def _require_number(raw: dict, index: int, key: str) -> float:
    if key not in raw:
        raise SchemaViolation(f"box {index}: missing required field {key!r}", box_index=index, field=key)
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(f"box {index}: {key!r} must be a number", box_index=index, field=key)
    value = float(value)
    if not math.isfinite(value):
        raise OutOfRange(f"box {index}: {key!r} must be finite", box_index=index, field=key)
    return value


def _require_int(value: object, field_name: str, box_index: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaViolation(f"{field_name} must be an integer", box_index=box_index, field=field_name)
    return value


def instruction_set_to_dict(instr: GlyphInstructionSet) -> dict:
    """Plain-dict form of a set; round-trips through parse_instructions."""
    return {
        "canvas": {"width": instr.canvas.width, "height": instr.canvas.height},
        "boxes": [
            {
                "text": b.text,
                "x": b.x,
                "y": b.y,
                "width": b.width,
                "ratio": b.ratio,
                "yaw_deg": b.yaw_deg,
                "rows": b.rows,
            }
            for b in instr.boxes
        ],
    }


def serialize_instructions(instr: GlyphInstructionSet) -> str:
    return json.dumps(instruction_set_to_dict(instr), ensure_ascii=False, indent=2)


def from_ocr_record(
    record: OcrRecord,
    canvas: CanvasSpec | None = None,
    skipped: list[SkippedQuad] | None = None,
) -> GlyphInstructionSet:
    """Derive the instruction set that reproduces a record's text layout.

    One box per OCR quad: position and width come from the quad's
    axis-aligned extent normalized by the image dimensions, the ratio from
    the extent's pixel aspect, and the yaw from the orientation of the
    quad's longest side. Zero-area quads and quads with blank text cannot
    become boxes; they are skipped and logged.
    """
    width = float(record.width)
    height = float(record.height)
    boxes = []
    for i, ocr_box in enumerate(record.boxes):
        quad = list(ocr_box.quad)
        if geometry.shoelace_area(quad) <= 0.0:
            _skip(skipped, i, "DegenerateQuad", f"quad {quad} has zero area")
            continue
        if not ocr_box.text.strip():
            _skip(skipped, i, "EmptyText", "recognized text is blank")
            continue
        min_x, min_y, max_x, max_y = geometry.bounding_rect(quad)
        px_w = max_x - min_x
        px_h = max_y - min_y
        if px_w <= 0.0 or px_h <= 0.0:
            _skip(skipped, i, "DegenerateQuad", "quad collapses to a line")
            continue
        boxes.append(
            TextBox(
                text=ocr_box.text,
                x=min_x / width,
                y=min_y / height,
                width=px_w / width,
                ratio=px_w / px_h,
                yaw_deg=geometry.longest_edge_angle(quad),
                rows=1,
            )
        )
    return GlyphInstructionSet(canvas=canvas or CanvasSpec(), boxes=tuple(boxes))


def _skip(skipped: list[SkippedQuad] | None, index: int, reason: str, detail: str) -> None:
    logger.warning("skipping quad %d: %s (%s)", index, reason, detail)
    if skipped is not None:
        skipped.append(SkippedQuad(index=index, reason=reason, detail=detail))
