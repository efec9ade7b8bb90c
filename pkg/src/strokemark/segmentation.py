"""Projection-profile segmentation of a page into lines and characters.

A text line is a maximal band of rows whose black-pixel count clears a
peak-relative threshold, extended outward over adjacent rows that still
carry a noticeable count (ascenders, descenders); the threshold keeps
line detection stable under the sprinkle of isolated pixels left by
noisy channels. Within a line, any column containing a black pixel
belongs to a character and any all-white column separates two, so
stray pixels can surface as tiny phantom boxes; downstream character
selection discards those on both the embedding and extraction side.
Character boxes are tightened vertically to their glyph's extent so
core scanline indices are box-local. Touching glyphs are out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import LineTooNarrow, NoTextFound
from .image import BinaryImage

_ROW_BAND_FRAC = 0.25  # of the page's peak row count
_ROW_EXTEND_FRAC = 0.08

__all__ = [
    "Rect",
    "CharBox",
    "LineBox",
    "SubLine",
    "segment_lines",
    "segment_chars",
    "split_sublines",
    "boxes_to_json",
]


class Rect(NamedTuple):
    x0: int
    y0: int
    width: int
    height: int

    @property
    def x1(self):
        return self.x0 + self.width

    @property
    def y1(self):
        return self.y0 + self.height

    def intersects(self, other: "Rect") -> bool:
        return (
            self.x0 < other.x1
            and other.x0 < self.x1
            and self.y0 < other.y1
            and other.y0 < self.y1
        )


@dataclass
class CharBox:
    line_index: int
    char_index: int
    rect: Rect


@dataclass
class LineBox:
    line_index: int
    rect: Rect
    chars: list = field(default_factory=list)


@dataclass
class SubLine:
    line_index: int
    sub_index: int
    x_span: tuple  # half-open [x0, x1)
    complete_chars: list = field(default_factory=list)


def _bands(profile: np.ndarray):
    """Maximal runs of True in a 1-D profile, as (start, stop) pairs."""
    padded = np.zeros(len(profile) + 2, dtype=np.int8)
    padded[1:-1] = profile
    d = np.diff(padded)
    starts = np.nonzero(d == 1)[0]
    stops = np.nonzero(d == -1)[0]
    return list(zip(starts.tolist(), stops.tolist()))


def _row_bands(black: np.ndarray) -> list:
    counts = black.sum(axis=1)
    peak = int(counts.max())
    if peak == 0:
        return []
    high = max(1, math.ceil(_ROW_BAND_FRAC * peak))
    low = max(1, math.ceil(_ROW_EXTEND_FRAC * peak))
    merged = []
    for y0, y1 in _bands(counts >= high):
        while y0 > 0 and counts[y0 - 1] >= low:
            y0 -= 1
        while y1 < len(counts) and counts[y1] >= low:
            y1 += 1
        if merged and y0 <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(y1, merged[-1][1]))
        else:
            merged.append((y0, y1))
    return merged


def segment_lines(page: BinaryImage) -> list:
    """Split a page into text lines, each with its character boxes."""
    black = page.pixels == 0
    bands = _row_bands(black)
    if not bands:
        raise NoTextFound("page contains no black pixels")
    lines = []
    for li, (y0, y1) in enumerate(bands):
        chars = _chars_in_band(black, li, y0, y1)
        if not chars:
            continue
        x0 = min(c.rect.x0 for c in chars)
        x1 = max(c.rect.x1 for c in chars)
        ytop = min(c.rect.y0 for c in chars)
        ybot = max(c.rect.y1 for c in chars)
        rect = Rect(x0, ytop, x1 - x0, ybot - ytop)
        lines.append(LineBox(line_index=len(lines), rect=rect, chars=chars))
    if not lines:
        raise NoTextFound("page contains no segmentable text")
    return lines


def _chars_in_band(black: np.ndarray, line_index: int, y0: int, y1: int) -> list:
    band = black[y0:y1, :]
    col_profile = band.any(axis=0)
    boxes = []
    height = black.shape[0]
    for x0, x1 in _bands(col_profile):
        rows = np.nonzero(band[:, x0:x1].any(axis=1))[0]
        top, bot = y0 + int(rows[0]), y0 + int(rows[-1]) + 1
        # follow strokes that continue past the band (modified glyphs
        # may extend a few scanlines beyond the detected text band)
        occupied = black[:, x0:x1].any(axis=1)
        while top > 0 and occupied[top - 1]:
            top -= 1
        while bot < height and occupied[bot]:
            bot += 1
        boxes.append(
            CharBox(
                line_index=line_index,
                char_index=len(boxes),
                rect=Rect(int(x0), top, int(x1 - x0), bot - top),
            )
        )
    return boxes


def segment_chars(page: BinaryImage, line: LineBox) -> list:
    """Character boxes of one line (recomputed from the page)."""
    black = page.pixels == 0
    y0 = line.rect.y0
    y1 = line.rect.y1
    return _chars_in_band(black, line.line_index, y0, y1)


def split_sublines(line: LineBox, n_s: int) -> list:
    """Partition a line's width into n_s equal spans (last takes the
    remainder) and classify each character by x-extent containment."""
    if n_s < 1:
        raise ValueError("n_s must be >= 1")
    if line.rect.width < n_s:
        raise LineTooNarrow(
            f"line width {line.rect.width} cannot be split into {n_s} sub-lines"
        )
    base = line.rect.width // n_s
    subs = []
    for i in range(n_s):
        x0 = line.rect.x0 + i * base
        x1 = line.rect.x0 + (i + 1) * base if i < n_s - 1 else line.rect.x1
        members = [
            c for c in line.chars if c.rect.x0 >= x0 and c.rect.x1 <= x1
        ]
        subs.append(
            SubLine(
                line_index=line.line_index,
                sub_index=i,
                x_span=(x0, x1),
                complete_chars=members,
            )
        )
    return subs


def boxes_to_json(lines) -> list:
    """Flat dump of the segmentation for fixture comparison."""
    out = []
    for line in lines:
        for c in line.chars:
            out.append(
                {
                    "line": line.line_index,
                    "char": c.char_index,
                    "x0": c.rect.x0,
                    "y0": c.rect.y0,
                    "w": c.rect.width,
                    "h": c.rect.height,
                }
            )
    return out
