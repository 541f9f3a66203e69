"""Dataset curation: filter OCR-annotated records and build a manifest.

The pipeline keeps images that carry enough legible text to train on:
records must have at least one detected box, an aesthetic score above the
threshold, some text away from the image border, a minimum total text
area, and not too many boxes. Kept records get a rendered glyph image;
everything else lands in a reject log with a deterministic reason.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InsufficientRecords, MalformedRecord
from .geometry import bounding_rect, shoelace_area
from .instructions import CanvasSpec, from_ocr_record
from .records import OcrBox, OcrRecord, parse_record_line
from .render import render

REJECT_REASONS = ("NoBoxes", "LowAesthetic", "BorderOnly", "SmallArea", "TooManyBoxes", "MalformedRecord")

GLYPH_CANVAS = CanvasSpec(512, 512)


@dataclass(frozen=True)
class CurationConfig:
    aesthetic_min: float = 4.5
    area_min_frac: float = 0.05
    max_boxes: int = 5
    border_margin_frac: float = 0.02

    def __post_init__(self):
        if self.aesthetic_min <= 0 or self.area_min_frac <= 0 or self.max_boxes <= 0 or self.border_margin_frac <= 0:
            raise ValueError("curation thresholds must be positive")
        if self.area_min_frac >= 1:
            raise ValueError("area_min_frac must be below 1")


@dataclass(frozen=True)
class KeptEntry:
    image_id: str
    glyph_path: str
    caption: str
    # per-record tallies kept out of the manifest line, used for statistics
    char_count: int = 0
    word_count: int = 0
    box_count: int = 0


@dataclass(frozen=True)
class RejectEntry:
    image_id: str
    reason: str


@dataclass(frozen=True)
class DatasetStats:
    chars: dict[int, int]
    words: dict[int, int]
    boxes: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "chars": {str(k): v for k, v in sorted(self.chars.items())},
            "words": {str(k): v for k, v in sorted(self.words.items())},
            "boxes": {str(k): v for k, v in sorted(self.boxes.items())},
        }


@dataclass
class DatasetManifest:
    kept: list[KeptEntry] = field(default_factory=list)
    rejected: list[RejectEntry] = field(default_factory=list)
    stats: DatasetStats = field(default_factory=lambda: DatasetStats({}, {}, {}))


def box_area_fraction(boxes: Sequence[OcrBox], width: float, height: float) -> float:
    """Summed quad area over image area; overlapping quads double count."""
    total = sum(shoelace_area(list(b.quad)) for b in boxes)
    return total / (width * height)


def all_boxes_on_border(boxes: Sequence[OcrBox], width: float, height: float, margin_frac: float) -> bool:
    """True iff boxes exist and every one touches the border band."""
    if not boxes:
        return False
    margin = margin_frac * min(width, height)
    for b in boxes:
        min_x, min_y, max_x, max_y = bounding_rect(list(b.quad))
        touches = (
            min_x <= margin
            or min_y <= margin
            or max_x >= width - margin
            or max_y >= height - margin
        )
        if not touches:
            return False
    return True


def filter_record(record: OcrRecord, config: CurationConfig) -> str | None:
    """First failing rule's reason code, or None to keep.

    Rules run in a fixed order so reject reasons are reproducible:
    NoBoxes, LowAesthetic, BorderOnly, SmallArea, TooManyBoxes.
    """
    if not record.boxes:
        return "NoBoxes"
    if record.aesthetic < config.aesthetic_min:
        return "LowAesthetic"
    if all_boxes_on_border(record.boxes, record.width, record.height, config.border_margin_frac):
        return "BorderOnly"
    if box_area_fraction(record.boxes, record.width, record.height) < config.area_min_frac:
        return "SmallArea"
    if len(record.boxes) > config.max_boxes:
        return "TooManyBoxes"
    return None


def stats_from_entries(entries: Iterable[KeptEntry]) -> DatasetStats:
    chars: Counter = Counter()
    words: Counter = Counter()
    boxes: Counter = Counter()
    for e in entries:
        chars[e.char_count] += 1
        words[e.word_count] += 1
        boxes[e.box_count] += 1
    return DatasetStats(chars=dict(chars), words=dict(words), boxes=dict(boxes))


def build_manifest(
    lines: Iterable[str],
    config: CurationConfig,
    out_dir: Path | str | None = None,
    threads: int = 1,
) -> DatasetManifest:
    """Filter a JSONL record stream; render glyph images when out_dir is set.

    Input order is preserved in both the kept and reject lists. Malformed
    lines are rejected with reason MalformedRecord and never abort the
    stream.
    """
    kept_records: list[OcrRecord] = []
    kept_order: list[int] = []  # position in the combined sequence
    sequence: list[tuple[str, object]] = []  # ("kept", idx) | ("rejected", RejectEntry)
    line_no = 0
    for raw in lines:
        raw = raw.strip()
        if not raw:
            continue
        line_no += 1
        try:
            record = parse_record_line(raw)
        except MalformedRecord:
            image_id = _best_effort_id(raw, line_no)
            sequence.append(("rejected", RejectEntry(image_id=image_id, reason="MalformedRecord")))
            continue
        reason = filter_record(record, config)
        if reason is None:
            sequence.append(("kept", len(kept_records)))
            kept_records.append(record)
        else:
            sequence.append(("rejected", RejectEntry(image_id=record.image_id, reason=reason)))

    glyph_dir = None
    if out_dir is not None:
        glyph_dir = Path(out_dir) / "glyphs"
        glyph_dir.mkdir(parents=True, exist_ok=True)

    def _finish(record: OcrRecord) -> KeptEntry:
        glyph_rel = f"glyphs/{record.image_id}.png"
        if glyph_dir is not None:
            image = render(from_ocr_record(record, canvas=GLYPH_CANVAS))
            image.write_png(Path(out_dir) / glyph_rel)
        return KeptEntry(
            image_id=record.image_id,
            glyph_path=glyph_rel,
            caption=record.caption,
            char_count=sum(len(b.text) for b in record.boxes),
            word_count=sum(len(b.text.split()) for b in record.boxes),
            box_count=len(record.boxes),
        )

    if threads > 1 and kept_records:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            kept_entries = list(pool.map(_finish, kept_records))
    else:
        kept_entries = [_finish(r) for r in kept_records]

    manifest = DatasetManifest()
    for kind, payload in sequence:
        if kind == "kept":
            manifest.kept.append(kept_entries[payload])
        else:
            manifest.rejected.append(payload)
    manifest.stats = stats_from_entries(manifest.kept)
    return manifest


def split_dataset(manifest: DatasetManifest, sizes: Sequence[int], seed: int) -> list[DatasetManifest]:
    """Seeded shuffle of the kept records, sliced into disjoint manifests."""
    if sum(sizes) > len(manifest.kept):
        raise InsufficientRecords(
            f"requested {sum(sizes)} records but only {len(manifest.kept)} were kept"
        )
    pool = list(manifest.kept)
    random.Random(seed).shuffle(pool)
    splits = []
    offset = 0
    for size in sizes:
        part = pool[offset : offset + size]
        offset += size
        splits.append(DatasetManifest(kept=part, rejected=[], stats=stats_from_entries(part)))
    return splits


def write_manifest(manifest: DatasetManifest, out_dir: Path | str) -> None:
    """Write manifest.jsonl, rejects.jsonl and stats.json under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "manifest.jsonl", "w", encoding="utf-8") as fh:
        for e in manifest.kept:
            fh.write(
                json.dumps(
                    {"image_id": e.image_id, "glyph_path": e.glyph_path, "caption": e.caption},
                    ensure_ascii=False,
                )
                + "\n"
            )
    with open(out / "rejects.jsonl", "w", encoding="utf-8") as fh:
        for r in manifest.rejected:
            fh.write(json.dumps({"image_id": r.image_id, "reason": r.reason}, ensure_ascii=False) + "\n")
    with open(out / "stats.json", "w", encoding="utf-8") as fh:
        json.dump(manifest.stats.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _best_effort_id(raw: str, line_no: int) -> str:
    try:
        obj = json.loads(raw)
        if isinstance(obj, dict) and "image_id" in obj:
            return str(obj["image_id"])
    except json.JSONDecodeError:
        pass
    return f"line_{line_no}"
