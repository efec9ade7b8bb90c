"""Blind watermark extraction.

Everything here is recomputed from the received page alone: the page
is re-segmented, cores re-extracted, and both thresholds re-derived.
The decode rule per character is: bit 1 if the extraction threshold
minus the core thickness is >= 0, else 0. Sub-line mode decodes by
majority vote over the sub-line's eligible complete characters, with
ties falling to 1 to mirror the >= boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import extract_core
from .errors import InsufficientBits, TooFewLines
from .image import BinaryImage
from .metrics import accuracy
from .segmentation import segment_lines, split_sublines
from .thresholds import baseline_thickness_mean, selection_threshold

__all__ = ["ExtractConfig", "PageAnalysis", "analyze_page", "extract_page",
           "extract_with_report", "extract_trace", "decode_bit"]

# Eligibility compares against the selection threshold lifted by this
# factor (identically on embed and extract side). The percentile value
# itself always equals some character population's exact score, and
# under channel distortion both that population's instances and the
# order statistic drift individually, letting borderline characters
# flicker in and out of the carrier set and desynchronize the bit
# stream. Lifting the cutoff well into the gap above the threshold
# population absorbs the drift of either side of the comparison.
SELECTION_MARGIN = 1.25


@dataclass
class ExtractConfig:
    length: int | None = None  # expected bit count; None when framed
    framed: bool = False
    es_enabled: bool = False
    n_s: int = 9
    lambda_: float = 0.2
    t_c: int = 10


@dataclass
class PageAnalysis:
    """Segmentation, cores, and thresholds derived from one page."""

    lines: list
    cores: dict  # (line_index, char_index) -> CoreDescriptor
    t_delta: int
    t_lambda: float  # None when selection is disabled
    chars: list  # non-baseline CharBoxes in reading order

    def is_eligible(self, box) -> bool:
        core = self.cores[(box.line_index, box.char_index)]
        if self.t_lambda is None:
            return True
        return core.mean_length > self.t_lambda * SELECTION_MARGIN

    def thickness(self, box) -> int:
        return self.cores[(box.line_index, box.char_index)].thickness


def analyze_page(page: BinaryImage, lambda_: float = 0.2, t_c: int = 10) -> PageAnalysis:
    """Segment a page and derive cores plus both thresholds.

    Both thresholds are computed over boxes that plausibly are
    characters: noisy channels leave stray pixels that segment into
    tiny phantom boxes, and letting those enter the statistics would
    drag the selection percentile below every real glyph and collapse
    the baseline thickness mean. Boxes whose mean core length falls
    under a quarter of the page's 90th-percentile length are therefore
    kept out of both computations (they remain firmly ineligible as
    carriers either way); the anchor percentile sits safely inside the
    real-glyph population even when phantoms outnumber glyphs.

    lambda_ = 0 disables character selection (every character carries
    bits); used by the selection ablation.
    """
    lines = segment_lines(page)
    if len(lines) < 2:
        raise TooFewLines("page must have at least two text lines")
    px = page.pixels
    cores = {}
    for line in lines:
        for c in line.chars:
            r = c.rect
            cores[(line.line_index, c.char_index)] = extract_core(
                px[r.y0 : r.y1, r.x0 : r.x1], t_c
            )
    all_lengths = [d.mean_length for d in cores.values()]
    floor = 0.25 * float(np.percentile(all_lengths, 90))

    def plausible(box):
        return cores[(box.line_index, box.char_index)].mean_length >= floor

    baseline = [cores[(0, c.char_index)] for c in lines[0].chars if plausible(c)]
    t_delta = baseline_thickness_mean(
        baseline or [cores[(0, c.char_index)] for c in lines[0].chars]
    )
    chars = [c for line in lines[1:] for c in line.chars]
    if lambda_ > 0:
        lengths = [
            cores[(c.line_index, c.char_index)].mean_length
            for c in chars
            if plausible(c)
        ]
        all_non_base = [cores[(c.line_index, c.char_index)].mean_length for c in chars]
        t_lambda = selection_threshold(lengths or all_non_base, lambda_)
    else:
        t_lambda = None
    return PageAnalysis(lines=lines, cores=cores, t_delta=t_delta,
                        t_lambda=t_lambda, chars=chars)


def decode_bit(t_delta: int, thickness: int) -> int:
    return 1 if t_delta - thickness >= 0 else 0


def _char_bit_stream(analysis: PageAnalysis):
    for box in analysis.chars:
        if analysis.is_eligible(box):
            yield decode_bit(analysis.t_delta, analysis.thickness(box))


def es_sublines(analysis: PageAnalysis, line, n_s: int) -> list:
    """Sub-lines for the strength modulator, spanning the extent of the
    line's eligible characters (phantom boxes from channel noise would
    otherwise shift every span boundary)."""
    from .segmentation import LineBox, Rect, split_sublines

    eligible = [c for c in line.chars if analysis.is_eligible(c)]
    if not eligible:
        return []
    x0 = min(c.rect.x0 for c in eligible)
    x1 = max(c.rect.x1 for c in eligible)
    if x1 - x0 < n_s:
        return []
    trimmed = LineBox(
        line_index=line.line_index,
        rect=Rect(x0, line.rect.y0, x1 - x0, line.rect.height),
        chars=line.chars,
    )
    return split_sublines(trimmed, n_s)


def _subline_bit_stream(analysis: PageAnalysis, n_s: int):
    for line in analysis.lines[1:]:
        for sub in es_sublines(analysis, line, n_s):
            voters = [c for c in sub.complete_chars if analysis.is_eligible(c)]
            if not voters:
                continue
            ones = sum(
                decode_bit(analysis.t_delta, analysis.thickness(c)) for c in voters
            )
            yield 1 if 2 * ones >= len(voters) else 0


def _take(stream, n: int) -> list:
    out = []
    for bit in stream:
        out.append(bit)
        if len(out) == n:
            return out
    raise InsufficientBits(f"page yields only {len(out)} of {n} required bits")


def extract_page(page: BinaryImage, cfg: ExtractConfig) -> list:
    """Recover the embedded wire bits from a page.

    Raw mode returns exactly cfg.length bits. Framed mode reads the
    16-bit length prefix first and returns the complete frame for the
    payload module to verify and strip.
    """
    analysis = analyze_page(page, cfg.lambda_, cfg.t_c)
    if cfg.es_enabled:
        stream = _subline_bit_stream(analysis, cfg.n_s)
    else:
        stream = _char_bit_stream(analysis)
    if cfg.framed:
        head = _take(stream, 16)
        n = int("".join(map(str, head)), 2)
        return head + _take(stream, n + 8)
    if cfg.length is None or cfg.length < 1:
        raise ValueError("raw extraction requires a positive length")
    return _take(stream, cfg.length)


def extract_with_report(page: BinaryImage, cfg: ExtractConfig, truth) -> tuple:
    """Extract and score against a known payload (Eq.-style ACC in %)."""
    bits = extract_page(page, cfg)
    return bits, accuracy(bits, truth)


def extract_trace(page: BinaryImage, cfg: ExtractConfig) -> list:
    """Per-character decode trace for debugging drift under attack."""
    analysis = analyze_page(page, cfg.lambda_, cfg.t_c)
    trace = []
    for box in analysis.chars:
        n = analysis.thickness(box)
        trace.append(
            {
                "line": box.line_index,
                "char": box.char_index,
                "n_core": n,
                "t_delta": analysis.t_delta,
                "eligible": analysis.is_eligible(box),
                "bit": decode_bit(analysis.t_delta, n),
            }
        )
    return trace
