"""OCR record ingestion.

Records are the serialized output of an external text detector/recognizer:
one JSON object per image with the detected quadrilaterals, recognized
strings, confidences, a caption and an aesthetic score. This module only
parses and normalizes them; filtering lives in `curation`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import MalformedRecord

Quad = tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class OcrBox:
    quad: Quad
    text: str
    conf: float


@dataclass(frozen=True)
class OcrRecord:
    image_id: str
    width: int
    height: int
    caption: str
    aesthetic: float
    boxes: tuple[OcrBox, ...]


def record_from_dict(obj: dict) -> OcrRecord:
    """Build an OcrRecord, clamping quad points into the image rectangle."""
    if not isinstance(obj, dict):
        raise MalformedRecord("record is not a JSON object")
    try:
        image_id = str(obj["image_id"])
        width = int(obj["width"])
        height = int(obj["height"])
        caption = str(obj.get("caption", ""))
        aesthetic = float(obj["aesthetic"])
        raw_boxes = obj.get("boxes", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedRecord(f"bad record fields: {exc}") from exc
    if width <= 0 or height <= 0:
        raise MalformedRecord(f"record {image_id}: non-positive dimensions {width}x{height}")
    if not isinstance(raw_boxes, list):
        raise MalformedRecord(f"record {image_id}: boxes is not a list")

    boxes = []
    for i, b in enumerate(raw_boxes):
        try:
            quad_raw = b["quad"]
            text = str(b["text"])
            conf = float(b.get("conf", 1.0))
            if len(quad_raw) != 4:
                raise ValueError("quad needs 4 points")
            quad = tuple(
                (min(max(float(p[0]), 0.0), float(width)), min(max(float(p[1]), 0.0), float(height)))
                for p in quad_raw
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise MalformedRecord(f"record {image_id}: bad box {i}: {exc}") from exc
        if not 0.0 <= conf <= 1.0:
            raise MalformedRecord(f"record {image_id}: box {i} confidence {conf} outside [0,1]")
        boxes.append(OcrBox(quad=quad, text=text, conf=conf))
    return OcrRecord(
        image_id=image_id,
        width=width,
        height=height,
        caption=caption,
        aesthetic=aesthetic,
        boxes=tuple(boxes),
    )


def parse_record_line(line: str) -> OcrRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"invalid JSON: {exc}") from exc
    return record_from_dict(obj)


def iter_record_lines(lines: Iterable[str]) -> Iterator[tuple[int, str]]:
    """Yield (sequence number, stripped line), skipping blanks."""
    for seq, line in enumerate(lines):
        line = line.strip()
        if line:
            yield seq, line


def record_to_dict(record: OcrRecord) -> dict:
    return {
        "image_id": record.image_id,
        "width": record.width,
        "height": record.height,
        "caption": record.caption,
        "aesthetic": record.aesthetic,
        "boxes": [
            {"quad": [[x, y] for x, y in b.quad], "text": b.text, "conf": b.conf}
            for b in record.boxes
        ],
    }
