"""Evaluation benchmark construction.

Takes a word-frequency list, buckets words by rank, samples words per
bucket and expands each into prompt cases with a rendered glyph layout.
Two prompt styles exist: a fixed plain-sign template, and a pool of more
elaborate templates drawn per case from a template file.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import BucketTooSmall, EmptyTemplateFile, MalformedEntry
from .instructions import CanvasSpec, GlyphInstructionSet, TextBox, instruction_set_to_dict
from .render import render

BUCKET_NAMES = ("top1k", "1k_10k", "10k_100k", "100k_plus")

SIMPLE_TEMPLATE = 'A sign that says "<word>".'
DEFAULT_CREATIVE_TEMPLATES = (
    'Little panda holding a sign that says "<word>".',
    'A photographer wears a t-shirt with the word "<word>" printed on it.',
)

FONT_PRESETS = {"small": 0.15, "medium": 0.30, "large": 0.60}
REPLICATES = 4
BOX_Y = 0.45


@dataclass(frozen=True)
class FrequencyBucket:
    name: str
    words: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class PromptCase:
    case_id: str
    word: str
    bucket: str
    prompt: str
    replicate: int  # 1-based
    font_preset: str
    instructions: GlyphInstructionSet

    def glyph_name(self) -> str:
        return f"{self.bucket}_{self.word}_{self.replicate}.png"


def bucket_for_rank(rank: int) -> str:
    if rank <= 1000:
        return "top1k"
    if rank <= 10_000:
        return "1k_10k"
    if rank <= 100_000:
        return "10k_100k"
    return "100k_plus"


def build_buckets(freq_list: Iterable[tuple[str, int]]) -> dict[str, FrequencyBucket]:
    """Assign every (word, rank) entry to exactly one rank bucket."""
    grouped: dict[str, list[tuple[str, int]]] = {name: [] for name in BUCKET_NAMES}
    for word, rank in freq_list:
        if not word or len(word.split()) != 1:
            raise MalformedEntry(f"not a single word: {word!r}")
        if rank <= 0:
            raise MalformedEntry(f"rank for {word!r} must be positive, got {rank}")
        grouped[bucket_for_rank(rank)].append((word, int(rank)))
    return {name: FrequencyBucket(name=name, words=tuple(entries)) for name, entries in grouped.items()}


def parse_freq_list(lines: Iterable[str]) -> list[tuple[str, int]]:
    """Parse the word<TAB>rank list format."""
    entries = []
    for i, line in enumerate(lines):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise MalformedEntry(f"line {i + 1}: expected 'word<TAB>rank', got {line!r}")
        word, rank_text = parts
        try:
            rank = int(rank_text)
        except ValueError:
            raise MalformedEntry(f"line {i + 1}: rank {rank_text!r} is not an integer") from None
        entries.append((word.strip(), rank))
    return entries


def sample_words(bucket: FrequencyBucket, n: int, seed: int) -> list[str]:
    """Uniform sample without replacement, deterministic per seed."""
    if n > len(bucket.words):
        raise BucketTooSmall(f"bucket {bucket.name} holds {len(bucket.words)} words, need {n}")
    rng = random.Random(seed)
    return [w for w, _ in rng.sample(list(bucket.words), n)]


def load_templates(path: Path | str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    templates = [line for line in lines if "<word>" in line]
    if not templates:
        raise EmptyTemplateFile(f"{path} has no line containing the placeholder '<word>'")
    return templates


def case_instructions(word: str, font_preset: str, canvas: CanvasSpec | None = None) -> GlyphInstructionSet:
    """One horizontally centered box carrying the word."""
    width = FONT_PRESETS[font_preset]
    box = TextBox(text=word, x=(1.0 - width) / 2.0, y=BOX_Y, width=width, yaw_deg=0.0, rows=1)
    return GlyphInstructionSet(canvas=canvas or CanvasSpec(), boxes=(box,))


def make_prompts(
    tagged_words: Sequence[tuple[str, str]],
    bench_kind: str,
    templates: Sequence[str] | None = None,
    seed: int = 0,
    font_preset: str = "medium",
) -> list[PromptCase]:
    """Expand (word, bucket) pairs into replicated prompt cases.

    The plain kind uses the single fixed template; the creative kind draws
    a template per case, seeded-uniformly from the template pool. All four
    replicates of a word share one glyph layout.
    """
    if bench_kind not in ("simple", "creative"):
        raise ValueError(f"bench_kind must be 'simple' or 'creative', got {bench_kind!r}")
    if font_preset not in FONT_PRESETS:
        raise ValueError(f"font_preset must be one of {sorted(FONT_PRESETS)}, got {font_preset!r}")
    pool = list(templates) if templates is not None else list(DEFAULT_CREATIVE_TEMPLATES)
    if bench_kind == "creative" and not pool:
        raise EmptyTemplateFile("creative benchmark needs at least one template")
    rng = random.Random(seed)
    cases = []
    for word, bucket in tagged_words:
        instructions = case_instructions(word, font_preset)
        for replicate in range(1, REPLICATES + 1):
            if bench_kind == "simple":
                template = SIMPLE_TEMPLATE
            else:
                template = pool[rng.randrange(len(pool))]
            cases.append(
                PromptCase(
                    case_id=f"{bucket}_{word}_{replicate}",
                    word=word,
                    bucket=bucket,
                    prompt=template.replace("<word>", word),
                    replicate=replicate,
                    font_preset=font_preset,
                    instructions=instructions,
                )
            )
    return cases


def build_bench(
    freq_entries: Iterable[tuple[str, int]],
    bench_kind: str,
    templates: Sequence[str] | None = None,
    seed: int = 0,
    words_per_bucket: int = 100,
    font_preset: str = "medium",
) -> list[PromptCase]:
    """Bucket, sample and expand a frequency list into the full case list."""
    buckets = build_buckets(freq_entries)
    tagged = []
    for name in BUCKET_NAMES:
        for word in sample_words(buckets[name], words_per_bucket, seed):
            tagged.append((word, name))
    return make_prompts(tagged, bench_kind, templates=templates, seed=seed, font_preset=font_preset)


def emit_bench(cases: Sequence[PromptCase], out_dir: Path | str) -> Path:
    """Write cases.jsonl plus one glyph PNG per case; returns the JSONL path.

    Replicates of a word share a layout, so the render is done once per
    layout and the bytes reused.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    png_cache: dict[tuple[str, str], bytes] = {}
    jsonl_path = out / "cases.jsonl"
    with open(jsonl_path, "w", encoding="utf-8") as fh:
        for case in cases:
            key = (case.word, case.font_preset)
            png = png_cache.get(key)
            if png is None:
                png = render(case.instructions).png_bytes()
                png_cache[key] = png
            glyph_rel = case.glyph_name()
            with open(out / glyph_rel, "wb") as img:
                img.write(png)
            fh.write(
                json.dumps(
                    {
                        "case_id": case.case_id,
                        "word": case.word,
                        "bucket": case.bucket,
                        "prompt": case.prompt,
                        "replicate": case.replicate,
                        "font_preset": case.font_preset,
                        "glyph_path": glyph_rel,
                        "instructions": instruction_set_to_dict(case.instructions),
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    return jsonl_path
