"""Toolkit for glyph condition maps: authoring, rendering, curation, scoring.

The generator itself is an external system; this package prepares its
inputs (instruction files and rendered glyph images, curated datasets,
benchmark cases) and scores its outputs (OCR-based accuracy and edit
distance, cosine image-text score, Fréchet distance between feature sets).
"""

__version__ = "0.1.0"

from .benchmark import (
    BUCKET_NAMES,
    FONT_PRESETS,
    FrequencyBucket,
    PromptCase,
    build_bench,
    build_buckets,
    emit_bench,
    make_prompts,
    sample_words,
)
from .curation import (
    CurationConfig,
    DatasetManifest,
    DatasetStats,
    all_boxes_on_border,
    box_area_fraction,
    build_manifest,
    filter_record,
    split_dataset,
)
from .embeddings import EmbeddingSet, read_embeddings, write_embeddings
from .instructions import (
    CanvasSpec,
    GlyphInstructionSet,
    TextBox,
    from_ocr_record,
    instruction_set_to_dict,
    parse_instructions,
    serialize_instructions,
)
from .metrics import (
    CaseResult,
    EvalReport,
    aggregate,
    clip_score,
    evaluate_case,
    fid,
    levenshtein,
    matrix_sqrt_psd,
    word_error_rate,
)
from .records import OcrBox, OcrRecord
from .render import GlyphImage, fit_font_size, measure_ink, render, split_rows
from .validation import ValidationReport, validate

__all__ = [name for name in dir() if not name.startswith("_")]
