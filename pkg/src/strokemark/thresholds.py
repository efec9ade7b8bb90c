"""Selection and embedding thresholds, shared by embedder and extractor.

Both sides must derive these from the page alone; keeping the
computations in one place guarantees the blind extractor recomputes
exactly what the embedder used.
"""

from __future__ import annotations

import math

from .errors import EmptyBaseline, EmptyDocument, TooFewLines
from .image import BinaryImage

__all__ = ["selection_threshold", "embedding_threshold", "round_half_up"]


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def selection_threshold(core_lengths, lambda_: float) -> float:
    """Percentile cutoff on mean core lengths: the ceil(n*lambda)-th
    smallest value. Characters at or below it are too fragile to carry
    bits."""
    values = sorted(core_lengths)
    if not values:
        raise EmptyDocument("no characters to select from")
    if not 0.0 < lambda_ <= 1.0:
        raise ValueError("lambda must lie in (0, 1]")
    k = math.ceil(len(values) * lambda_)
    return values[k - 1]


def embedding_threshold(page: BinaryImage, t_c: int = 10, baseline_index: int = 0) -> int:
    """Mean core thickness over the baseline line's characters, rounded
    half-up. The baseline line itself never carries payload."""
    from .core import extract_core
    from .segmentation import segment_lines

    lines = segment_lines(page)
    if len(lines) < 2:
        raise TooFewLines("page must have at least two text lines")
    baseline = lines[baseline_index]
    if not baseline.chars:
        raise EmptyBaseline("baseline line has no characters")
    px = page.pixels
    thicknesses = []
    for c in baseline.chars:
        r = c.rect
        view = px[r.y0 : r.y1, r.x0 : r.x1]
        thicknesses.append(extract_core(view, t_c).thickness)
    return round_half_up(sum(thicknesses) / len(thicknesses))


def baseline_thickness_mean(cores) -> int:
    """Same rounding rule, applied to precomputed core descriptors."""
    if not cores:
        raise EmptyBaseline("baseline line has no characters")
    return round_half_up(sum(c.thickness for c in cores) / len(cores))
