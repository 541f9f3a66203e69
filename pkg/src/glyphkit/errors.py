"""Exception hierarchy shared across the toolkit."""


class GlyphkitError(Exception):
    """Base class for all toolkit errors."""


class InstructionError(GlyphkitError):
    """Problem with a glyph instruction file or object.

    Carries the offending box index and field name when they are known so
    callers (CLI, HTTP service) can point at the exact input location.
    """

    code = "InstructionError"

    def __init__(self, message: str, *, box_index: int | None = None, field: str | None = None):
        super().__init__(message)
        self.box_index = box_index
        self.field = field

    def location(self) -> str:
        parts = []
        if self.box_index is not None:
            parts.append(f"box {self.box_index}")
        if self.field is not None:
            parts.append(f"field {self.field}")
        return ", ".join(parts) if parts else "document"


class MalformedSyntax(InstructionError):
    code = "MalformedSyntax"


class SchemaViolation(InstructionError):
    code = "SchemaViolation"


class OutOfRange(InstructionError):
    code = "OutOfRange"


class RowsExceedWords(GlyphkitError):
    """More rows requested than the text has words."""


class Unrenderable(GlyphkitError):
    """No font size >= 1 satisfies the box constraints."""


class InsufficientRecords(GlyphkitError):
    """Requested dataset split sizes exceed the available records."""


class MalformedRecord(GlyphkitError):
    """An OCR record line could not be parsed against the record schema."""


class MalformedEntry(GlyphkitError):
    """A frequency-list entry is not a single word with a positive rank."""


class BucketTooSmall(GlyphkitError):
    """A frequency bucket holds fewer words than the requested sample."""


class EmptyTemplateFile(GlyphkitError):
    """The prompt template file contains no usable templates."""


class EmptyGroundTruth(GlyphkitError):
    """A metric was asked to score an empty ground-truth sequence."""


class EmptyBucket(GlyphkitError):
    """A bucket is present in the result grouping but has zero cases."""


class DimensionMismatch(GlyphkitError):
    """Paired embedding sets disagree in count or dimension."""


class ZeroVector(GlyphkitError):
    """Cosine similarity is undefined for a zero-norm embedding row."""


class TooFewSamples(GlyphkitError):
    """Covariance needs at least two samples per embedding set."""


class NotSymmetric(GlyphkitError):
    """Matrix square root input deviates from symmetry beyond tolerance."""


class IndefiniteBeyondTolerance(GlyphkitError):
    """Matrix square root input has eigenvalues below the negative tolerance."""
