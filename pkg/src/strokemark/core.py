"""Stroke-core extraction from character bitmaps.

A character's core is the dominant cluster of consecutive, spatially
aligned black-pixel runs. Its thickness (number of member scanlines)
is the feature modulated by the embedder and read back by the
extractor. Isolated noise pixels never form the longest run of a
scanline, which is what makes the feature stable under transmission
noise.

Coordinates are 0-based throughout. For a horizontal core, scanlines
are row indices and starts are column offsets; for a vertical core
the image is transposed first, so scanlines are column indices and
starts are row offsets.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import groupby
from typing import NamedTuple

import numpy as np

from .errors import NoBlackPixels
from .image import BinaryImage

__all__ = [
    "HORIZONTAL",
    "VERTICAL",
    "Run",
    "CandidateVector",
    "ClusterStats",
    "CoreDescriptor",
    "rlc",
    "decode_runs",
    "longest_run",
    "run_start",
    "determine_direction",
    "candidate_vectors",
    "cluster_candidates",
    "extract_core",
]

HORIZONTAL = "horizontal"
VERTICAL = "vertical"

BLACK = 0
WHITE = 1


class Run(NamedTuple):
    """One run-length pair: `length` consecutive pixels of `value`."""

    length: int
    value: int


class CandidateVector(NamedTuple):
    """Longest black run of a scanline: member candidate for the core."""

    scanline: int
    start: int
    length: int


@dataclass
class ClusterStats:
    count: int
    mean_len: float


@dataclass
class CoreDescriptor:
    direction: str
    scanlines: list  # consecutive scanline indices
    starts: list  # per-scanline run start offsets
    lengths: list  # per-scanline run lengths

    @property
    def thickness(self) -> int:
        return len(self.scanlines)

    @property
    def mean_length(self) -> float:
        return sum(self.lengths) / len(self.lengths)

    def to_json(self) -> dict:
        return {
            "direction": self.direction,
            "rows": list(self.scanlines),
            "starts": list(self.starts),
            "lens": list(self.lengths),
        }


# --- run-length coding (reference path) ---

def rlc(scanline) -> list:
    """Run-length code a scanline of 0/1 pixels into maximal runs."""
    seq = scanline.tolist() if isinstance(scanline, np.ndarray) else list(scanline)
    if not seq:
        raise ValueError("scanline must be non-empty")
    return [Run(len(list(g)), int(v)) for v, g in groupby(seq)]


def decode_runs(runs) -> list:
    out = []
    for length, value in runs:
        out.extend([value] * length)
    return out


def longest_run(runs):
    """Return (index, run) of the longest run; first one wins ties."""
    if not runs:
        raise ValueError("runs must be non-empty")
    best = max(range(len(runs)), key=lambda i: (runs[i].length, -i))
    return best, runs[best]


def run_start(runs, index: int) -> int:
    """0-based offset of runs[index] within its scanline."""
    return sum(r.length for r in runs[:index])


# --- vectorized per-scanline run statistics ---

def _longest_true_runs(mask: np.ndarray):
    """Per row of a boolean mask: (length, start) of its longest True run.

    Ties go to the earliest run. Rows without any True pixel get length 0.
    """
    h, w = mask.shape
    padded = np.zeros((h, w + 2), dtype=np.int8)
    padded[:, 1:-1] = mask
    d = np.diff(padded, axis=1)
    ri, cs = np.nonzero(d == 1)
    _, ce = np.nonzero(d == -1)
    out_len = np.zeros(h, dtype=np.int64)
    out_start = np.zeros(h, dtype=np.int64)
    if ri.size == 0:
        return out_len, out_start
    lens = ce - cs
    # encode (length, earliest-start) into one sortable key per run
    key = lens * (w + 1) + (w - cs)
    counts = np.bincount(ri, minlength=h)
    offsets = np.zeros(h, dtype=np.int64)
    np.cumsum(counts[:-1], out=offsets[1:])
    nonempty = counts > 0
    best = np.maximum.reduceat(key, offsets[nonempty])
    out_len[nonempty] = best // (w + 1)
    out_start[nonempty] = w - (best % (w + 1))
    return out_len, out_start


def _scanline_stats(black: np.ndarray):
    """For each row: longest black run (len, start) and whether the row's
    overall longest run is black (first run wins length ties)."""
    lb, sb = _longest_true_runs(black)
    lw, sw = _longest_true_runs(~black)
    black_longest = (lb > lw) | ((lb == lw) & (lb > 0) & (sb < sw))
    return lb, sb, black_longest


def _pixels(char) -> np.ndarray:
    return char.pixels if isinstance(char, BinaryImage) else np.asarray(char)


# --- direction, candidates, clustering ---

def determine_direction(char) -> str:
    """Pick the scan direction whose black-dominated scanlines have the
    larger mean longest-run length; ties fall to vertical."""
    px = _pixels(char)
    black = px == BLACK
    if not black.any():
        raise NoBlackPixels("character contains no black pixels")
    lb_h, _, kmask_h = _scanline_stats(black)
    lb_v, _, kmask_v = _scanline_stats(black.T)
    u_h = int(lb_h[kmask_h].sum())
    k_h = int(np.count_nonzero(kmask_h))
    u_v = int(lb_v[kmask_v].sum())
    k_v = int(np.count_nonzero(kmask_v))
    r_h = u_h / k_h if k_h else float("-inf")
    r_v = u_v / k_v if k_v else float("-inf")
    return HORIZONTAL if r_h > r_v else VERTICAL


def candidate_vectors(char, direction: str) -> list:
    """One candidate per scanline whose longest run is black."""
    px = _pixels(char)
    black = px == BLACK
    if direction == VERTICAL:
        black = black.T
    lb, sb, black_longest = _scanline_stats(black)
    idx = np.nonzero(black_longest)[0]
    return [CandidateVector(int(i), int(sb[i]), int(lb[i])) for i in idx]


def _cluster_spans(cands, t_c: int):
    """Partition an ordered candidate list into clusters.

    Candidates chain while (b1) scanlines are consecutive, (b2) starts
    and (b3) ends stay within t_c of the previous member. Yields
    (first_index, count, total_length) per cluster.
    """
    first = 0
    total = cands[0].length
    for i in range(1, len(cands)):
        prev, cur = cands[i - 1], cands[i]
        b1 = cur.scanline - prev.scanline == 1
        b2 = abs(cur.start - prev.start) <= t_c
        b3 = abs((cur.start + cur.length) - (prev.start + prev.length)) <= t_c
        if b1 and b2 and b3:
            total += cur.length
        else:
            yield first, i - first, total
            first = i
            total = cur.length
    yield first, len(cands) - first, total


def cluster_stats(cands, t_c: int) -> list:
    return [ClusterStats(n, tot / n) for _, n, tot in _cluster_spans(cands, t_c)]


def cluster_candidates(cands, t_c: int, direction: str = HORIZONTAL) -> CoreDescriptor:
    """Select the cluster with the largest mean run length (first wins ties)."""
    if not cands:
        raise ValueError("candidate list must be non-empty")
    best = None
    for first, count, total in _cluster_spans(cands, t_c):
        mean = total / count
        if best is None or mean > best[0]:
            best = (mean, first, count)
    _, first, count = best
    members = cands[first : first + count]
    return CoreDescriptor(
        direction=direction,
        scanlines=[c.scanline for c in members],
        starts=[c.start for c in members],
        lengths=[c.length for c in members],
    )


def extract_core(char, t_c: int = 10) -> CoreDescriptor:
    """Full pipeline: direction, candidates, clustering.

    If no scanline's longest run is black in the chosen direction (tiny
    marks only), the single longest black run of any scanline stands in
    as a one-scanline core.
    """
    px = _pixels(char)
    black = px == BLACK
    if not black.any():
        raise NoBlackPixels("character contains no black pixels")
    stats_h = _scanline_stats(black)
    stats_v = _scanline_stats(black.T)

    def ratio(stats):
        lb, _, kmask = stats
        k = int(np.count_nonzero(kmask))
        return int(lb[kmask].sum()) / k if k else float("-inf")

    if ratio(stats_h) > ratio(stats_v):
        direction, (lb, sb, black_longest) = HORIZONTAL, stats_h
    else:
        direction, (lb, sb, black_longest) = VERTICAL, stats_v
    idx = np.nonzero(black_longest)[0]
    if idx.size == 0:
        line = int(np.argmax(lb))
        return CoreDescriptor(
            direction=direction,
            scanlines=[line],
            starts=[int(sb[line])],
            lengths=[int(lb[line])],
        )
    cands = [CandidateVector(int(i), int(sb[i]), int(lb[i])) for i in idx]
    return cluster_candidates(cands, t_c, direction)
