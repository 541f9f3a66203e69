"""Bundled font access and the toolkit's canonical text metrics.

Exactly one sans-serif face ships with the package; every measurement and
raster in the toolkit goes through it so outputs are reproducible. All
metrics are defined at a fixed 4x oversampling: a glyph at nominal size
``s`` is measured and rasterized on the 4s face and mapped back, which is
also how the renderer antialiases. Hinted per-size metrics are therefore
consistent between layout and rasterization by construction.

Pillow font objects are not safe to share across threads, so faces are
cached per thread.
"""

from __future__ import annotations

import threading
from importlib import resources
from pathlib import Path

from PIL import ImageFont

OVERSAMPLE = 4

_local = threading.local()


def font_path() -> Path:
    """Filesystem path of the bundled face."""
    return Path(str(resources.files("glyphkit") / "fonts" / "DejaVuSans.ttf"))


def oversampled_face(size_px: int) -> ImageFont.FreeTypeFont:
    """Font face at `size_px` oversampled units (i.e. nominal size * 4)."""
    cache = getattr(_local, "faces", None)
    if cache is None:
        cache = _local.faces = {}
    face = cache.get(size_px)
    if face is None:
        face = ImageFont.truetype(
            str(font_path()), size_px, layout_engine=ImageFont.Layout.BASIC
        )
        cache[size_px] = face
    return face


def advance_width(text: str, size: int) -> float:
    """Advance width of `text` at nominal pixel size `size`."""
    return oversampled_face(size * OVERSAMPLE).getlength(text) / OVERSAMPLE


def line_height(size: int) -> float:
    """Ascent plus descent at nominal pixel size `size`."""
    asc, desc = oversampled_face(size * OVERSAMPLE).getmetrics()
    return (asc + desc) / OVERSAMPLE


def ascent(size: int) -> float:
    asc, _ = oversampled_face(size * OVERSAMPLE).getmetrics()
    return asc / OVERSAMPLE
