"""Command-line entry points.

Exit codes form a closed set: 0 success, 1 I/O failure, 2 instruction
validation failure, 3 schema or dimension mismatch in evaluation inputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .benchmark import FONT_PRESETS, build_bench, emit_bench, load_templates, parse_freq_list
from .curation import CurationConfig, build_manifest, stats_from_entries, write_manifest
from .errors import DimensionMismatch, GlyphkitError, InstructionError, MalformedRecord
from .instructions import parse_instructions
from .records import parse_record_line
from .render import render
from .validation import validate

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_SCHEMA = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glyphkit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"glyphkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="rasterize an instruction file to a glyph PNG")
    p.add_argument("instructions", help="instruction JSON file")
    p.add_argument("--out", required=True, help="output PNG path")

    p = sub.add_parser("curate", help="filter an OCR record JSONL into a dataset manifest")
    p.add_argument("records", help="OCR records, one JSON object per line")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--aesthetic-min", type=float, default=4.5)
    p.add_argument("--area-min", type=float, default=0.05)
    p.add_argument("--max-boxes", type=int, default=5)
    p.add_argument("--border-margin", type=float, default=0.02)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--no-glyphs", action="store_true", help="skip glyph image rendering")

    p = sub.add_parser("stats", help="histogram character/word/box counts of a record stream")
    p.add_argument("records", help="OCR records JSONL")
    p.add_argument("--out", help="output JSON path (default: stdout)")

    p = sub.add_parser("bench", help="build evaluation cases from a word-frequency list")
    p.add_argument("frequencies", help="UTF-8 TSV of word<TAB>rank")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--kind", choices=("simple", "creative"), default="simple")
    p.add_argument("--templates", help="template file, one '<word>' template per line")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--words-per-bucket", type=int, default=100)
    p.add_argument("--font-preset", choices=sorted(FONT_PRESETS), default="medium")

    p = sub.add_parser("eval", help="score OCR predictions (and embeddings) against cases")
    p.add_argument("cases", help="cases.jsonl from the bench command")
    p.add_argument("predictions", help="prediction JSONL from an external OCR engine")
    p.add_argument("--out", help="report JSON path (default: stdout)")
    p.add_argument("--clip-image", help="image embedding file (EMB1)")
    p.add_argument("--clip-text", help="text embedding file (EMB1)")
    p.add_argument("--fid-real", help="reference feature file (EMB1)")
    p.add_argument("--fid-gen", help="generated feature file (EMB1)")

    p = sub.add_parser("serve", help="run the HTTP service and studio UI")
    p.add_argument("--bind", default="127.0.0.1:8000", help="host:port")
    p.add_argument("--templates", help="creative template file served to clients")
    p.add_argument("--static", help="directory of studio UI assets for GET /")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "render": cmd_render,
        "curate": cmd_curate,
        "stats": cmd_stats,
        "bench": cmd_bench,
        "eval": cmd_eval,
        "serve": cmd_serve,
    }[args.command]
    return handler(args)


def cmd_render(args) -> int:
    try:
        raw = Path(args.instructions).read_bytes()
    except OSError as exc:
        print(f"error: cannot read {args.instructions}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        instr = parse_instructions(raw)
    except InstructionError as exc:
        print(f"error: {exc.code} at {exc.location()}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    report = validate(instr)
    for warning in report.warnings:
        print(f"warning: {warning.code}: {warning.message}", file=sys.stderr)
    if not report.ok:
        for error in report.errors:
            print(f"error: {error.code}: {error.message}", file=sys.stderr)
        return EXIT_VALIDATION
    image = render(instr)
    try:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        image.write_png(args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_curate(args) -> int:
    config = CurationConfig(
        aesthetic_min=args.aesthetic_min,
        area_min_frac=args.area_min,
        max_boxes=args.max_boxes,
        border_margin_frac=args.border_margin,
    )
    try:
        with open(args.records, encoding="utf-8") as fh:
            manifest = build_manifest(
                fh,
                config,
                out_dir=None if args.no_glyphs else args.out,
                threads=max(1, args.threads),
            )
        write_manifest(manifest, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"kept {len(manifest.kept)} / rejected {len(manifest.rejected)}")
    return EXIT_OK


def cmd_stats(args) -> int:
    from .curation import KeptEntry

    entries = []
    try:
        with open(args.records, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    record = parse_record_line(line)
                except MalformedRecord as exc:
                    print(f"warning: skipping record: {exc}", file=sys.stderr)
                    continue
                entries.append(
                    KeptEntry(
                        image_id=record.image_id,
                        glyph_path="",
                        caption=record.caption,
                        char_count=sum(len(b.text) for b in record.boxes),
                        word_count=sum(len(b.text.split()) for b in record.boxes),
                        box_count=len(record.boxes),
                    )
                )
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    payload = json.dumps(stats_from_entries(entries).to_dict(), indent=2, sort_keys=True)
    return _write_or_print(payload, args.out)


def cmd_bench(args) -> int:
    try:
        with open(args.frequencies, encoding="utf-8") as fh:
            entries = parse_freq_list(fh)
        templates = load_templates(args.templates) if args.templates else None
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except GlyphkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        cases = build_bench(
            entries,
            args.kind,
            templates=templates,
            seed=args.seed,
            words_per_bucket=args.words_per_bucket,
            font_preset=args.font_preset,
        )
        path = emit_bench(cases, args.out)
    except GlyphkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(cases)} cases to {path}")
    return EXIT_OK


def cmd_eval(args) -> int:
    from .report import run_file_eval

    try:
        report = run_file_eval(
            args.cases,
            args.predictions,
            clip_image_path=args.clip_image,
            clip_text_path=args.clip_text,
            fid_real_path=args.fid_real,
            fid_gen_path=args.fid_gen,
        )
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DimensionMismatch, ValueError, KeyError) as exc:
        print(f"error: bad evaluation input: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except GlyphkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    return _write_or_print(json.dumps(report, indent=2), args.out)


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port_text = args.bind.partition(":")
    port = int(port_text or "8000")
    templates = None
    if args.templates:
        try:
            templates = load_templates(args.templates)
        except (OSError, GlyphkitError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    app = create_app(creative_templates=templates, static_dir=args.static)
    uvicorn.run(app, host=host or "127.0.0.1", port=port, log_level="info")
    return EXIT_OK


def _write_or_print(payload: str, out: str | None) -> int:
    if out:
        try:
            Path(out).parent.mkdir(parents=True, exist_ok=True)
            Path(out).write_text(payload + "\n", encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write {out}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        print(payload)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
