"""Watermark embedding by core-thickness modulation.

A character carries one bit through the thickness of its core: thin
(at most T_delta - beta scanlines) means 1, thick (at least
T_delta + beta + 1) means 0. Characters whose mean core length falls
at or below the selection threshold are skipped on both sides.
Reduction erodes the shorter edge scanline of the core, sparing black
pixels that continue into a crossing stroke; expansion replicates the
longer edge scanline outward.

The default mode enforces the margin on both sides of the threshold
so a noiseless page always decodes exactly; strict_paper_mode keeps
the literal four-case rule, under which a thickness exactly at the
threshold is left untouched when embedding 0 (and then decodes as 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from .core import HORIZONTAL, VERTICAL, CoreDescriptor, extract_core
from .errors import (
    CannotExpand,
    CannotReduce,
    InfeasibleTarget,
    InsufficientCapacity,
    OutOfBounds,
)
from .extract import PageAnalysis, analyze_page, es_sublines
from .image import BinaryImage, hamming
from .metrics import psnr as _psnr, ssim as _ssim
from .segmentation import Rect
from .thresholds import embedding_threshold, selection_threshold

__all__ = [
    "EmbedConfig",
    "EmbedPlan",
    "EmbedReport",
    "selection_threshold",
    "embedding_threshold",
    "target_thickness",
    "reduce_core",
    "expand_core",
    "embed_page",
]

BLACK = 0
WHITE = 1


@dataclass
class EmbedConfig:
    beta: int = 1
    lambda_: float = 0.2
    t_c: int = 10
    n_s: int = 9
    es_enabled: bool = False
    strict_paper_mode: bool = False
    compute_metrics: bool = True

    def to_json(self) -> dict:
        return {
            "beta": self.beta,
            "lambda": self.lambda_,
            "tc": self.t_c,
            "ns": self.n_s,
            "es": self.es_enabled,
            "strict_paper_mode": self.strict_paper_mode,
        }


@dataclass
class EmbedPlan:
    t_lambda: float
    t_delta: int
    baseline_line: int
    mode: str  # "plain" or "es"
    assignments: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class EmbedReport:
    flipped_pixels: int
    chars_modified: int
    chars_skipped: int
    psnr: float | None = None
    ssim: float | None = None

    def to_json(self) -> dict:
        return asdict(self)


def target_thickness(n_core: int, bit: int, t_delta: int, beta: int,
                     strict_paper_mode: bool = False):
    """Thickness a character must take to carry `bit`, or None when the
    natural thickness already does."""
    if n_core < 1 or beta < 1:
        raise ValueError("n_core and beta must be >= 1")
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    if strict_paper_mode:
        if bit == 1:
            target = t_delta - beta if t_delta - n_core <= beta else None
        else:
            target = t_delta + beta + 1 if t_delta - n_core >= beta else None
    else:
        if bit == 1:
            target = t_delta - beta if n_core > t_delta - beta else None
        else:
            target = t_delta + beta + 1 if n_core < t_delta + beta + 1 else None
    if target is None or target == n_core:
        return None
    if target < 1:
        raise InfeasibleTarget(
            f"target thickness {target} below 1 (t_delta={t_delta}, beta={beta})"
        )
    return target


def _tight_recheck(px: np.ndarray, x0: int, x1: int, y_lo: int, y_hi: int, t_c: int):
    """Re-extract the core of the glyph occupying columns [x0,x1) within
    the row window [y_lo,y_hi), tightened to its black extent."""
    y_lo = max(y_lo, 0)
    y_hi = min(y_hi, px.shape[0])
    band = px[y_lo:y_hi, x0:x1]
    rows = np.nonzero((band == BLACK).any(axis=1))[0]
    if rows.size == 0:
        return None
    return extract_core(band[rows[0] : rows[-1] + 1], t_c)


def reduce_core(page_px: np.ndarray, rect: Rect, core: CoreDescriptor,
                target: int, t_c: int = 10) -> None:
    """Thin a core to `target` scanlines by eroding its shorter edge.

    An edge pixel flips to white only when its outward neighbour is
    white, so strokes crossing the edge survive. If the recomputed
    thickness misses the target after the planned removals, up to two
    extra edge scanlines are tried before giving up and restoring the
    original pixels.
    """
    if not 1 <= target < core.thickness:
        raise ValueError("target must be in [1, thickness)")
    if core.direction == VERTICAL:
        flipped = CoreDescriptor(HORIZONTAL, core.scanlines, core.starts, core.lengths)
        return reduce_core(page_px.T, Rect(rect.y0, rect.x0, rect.height, rect.width),
                           flipped, target, t_c)

    snapshot = page_px[rect.y0 : rect.y1, rect.x0 : rect.x1].copy()
    rows = [rect.y0 + s for s in core.scanlines]
    starts = [rect.x0 + s for s in core.starts]
    lens = list(core.lengths)

    def remove_edge():
        if lens[0] <= lens[-1]:
            i, outward = 0, -1
        else:
            i, outward = len(rows) - 1, +1
        r, s, l = rows[i], starts[i], lens[i]
        ref = r + outward
        ref_row = page_px[ref] if 0 <= ref < page_px.shape[0] else None
        for c in range(s, s + l):
            if page_px[r, c] == BLACK and (ref_row is None or ref_row[c] == WHITE):
                page_px[r, c] = WHITE
        del rows[i], starts[i], lens[i]

    for _ in range(core.thickness - target):
        if not rows:
            break
        remove_edge()
    for extra in range(3):
        desc = _tight_recheck(page_px, rect.x0, rect.x1, rect.y0, rect.y1, t_c)
        if desc is not None and desc.thickness == target:
            return
        if desc is None or desc.thickness < target or extra == 2 or not desc.scanlines:
            break
        # crossing strokes kept the edge scanline alive; peel one more
        band_rows = np.nonzero(
            (page_px[rect.y0 : rect.y1, rect.x0 : rect.x1] == BLACK).any(axis=1)
        )[0]
        y_off = rect.y0 + int(band_rows[0])
        rows = [y_off + s for s in desc.scanlines]
        starts = [rect.x0 + s for s in desc.starts]
        lens = list(desc.lengths)
        if desc.direction != HORIZONTAL:
            break
        remove_edge()
    page_px[rect.y0 : rect.y1, rect.x0 : rect.x1] = snapshot
    raise CannotReduce(
        f"could not thin core to {target} scanlines at {tuple(rect)}"
    )


def expand_core(page_px: np.ndarray, rect: Rect, core: CoreDescriptor,
                target: int, t_c: int = 10, blocked=()) -> None:
    """Grow a core to `target` scanlines by replicating the longer edge
    scanline outward (ties fall to the bottom/right side).

    The added scanlines span exactly the edge scanline's run extent.
    Raises OutOfBounds when the new scanlines would leave the page or
    collide with a blocked rectangle (another character, another line).
    """
    if target <= core.thickness:
        raise ValueError("target must exceed the current thickness")
    if core.direction == VERTICAL:
        flipped = CoreDescriptor(HORIZONTAL, core.scanlines, core.starts, core.lengths)
        t_blocked = [Rect(b.y0, b.x0, b.height, b.width) for b in blocked]
        return expand_core(page_px.T, Rect(rect.y0, rect.x0, rect.height, rect.width),
                           flipped, target, t_c, t_blocked)

    k = target - core.thickness
    top_longer = core.lengths[0] > core.lengths[-1]
    if top_longer:
        edge = 0
        ry0 = rect.y0 + core.scanlines[0] - k
        ry1 = rect.y0 + core.scanlines[0]
    else:
        edge = -1
        ry0 = rect.y0 + core.scanlines[-1] + 1
        ry1 = ry0 + k
    cx0 = rect.x0 + core.starts[edge]
    cx1 = cx0 + core.lengths[edge]
    if ry0 < 0 or ry1 > page_px.shape[0]:
        raise OutOfBounds("expansion leaves the page")
    region = Rect(cx0, ry0, cx1 - cx0, ry1 - ry0)
    for b in blocked:
        if region.intersects(b):
            raise OutOfBounds(f"expansion collides with {tuple(b)}")

    y_lo = min(ry0, rect.y0)
    y_hi = max(ry1, rect.y1)
    snapshot = page_px[y_lo:y_hi, rect.x0 : rect.x1].copy()
    page_px[ry0:ry1, cx0:cx1] = BLACK
    desc = _tight_recheck(page_px, rect.x0, rect.x1, y_lo, y_hi, t_c)
    if desc is not None and desc.thickness == target:
        return
    page_px[y_lo:y_hi, rect.x0 : rect.x1] = snapshot
    raise CannotExpand(
        f"expansion to {target} scanlines restructures the core at {tuple(rect)}"
    )


def _char_rects(lines) -> dict:
    return {(ln.line_index, c.char_index): c.rect for ln in lines for c in ln.chars}


def _blocked_for(analysis: PageAnalysis, box) -> list:
    blocked = [ln.rect for ln in analysis.lines if ln.line_index != box.line_index]
    blocked += [
        c.rect
        for c in analysis.lines[box.line_index].chars
        if c.char_index != box.char_index
    ]
    return blocked


def _embed_into_char(px, analysis, box, bit, cfg, plan):
    """Modify one character to carry `bit`. Returns the action taken or
    raises the underlying modification error."""
    core = analysis.cores[(box.line_index, box.char_index)]
    target = target_thickness(core.thickness, bit, analysis.t_delta, cfg.beta,
                              cfg.strict_paper_mode)
    if target is None:
        return "unchanged", core.thickness
    if target < core.thickness:
        reduce_core(px, box.rect, core, target, cfg.t_c)
        return "reduced", target
    expand_core(px, box.rect, core, target, cfg.t_c, _blocked_for(analysis, box))
    return "expanded", target


def _record(plan, box, bit, action, n_before, n_after):
    plan.assignments.append(
        {
            "line": box.line_index,
            "char": box.char_index,
            "rect": list(box.rect),
            "bit": bit,
            "action": action,
            "n_before": n_before,
            "n_after": n_after,
        }
    )


def _embed_plain(px, analysis, payload, cfg, plan):
    i = 0
    lossy = []
    for box in analysis.chars:
        if i == len(payload):
            break
        core = analysis.cores[(box.line_index, box.char_index)]
        if not analysis.is_eligible(box):
            _record(plan, box, None, "skip-selection", core.thickness, core.thickness)
            continue
        bit = payload[i]
        try:
            action, n_after = _embed_into_char(px, analysis, box, bit, cfg, plan)
        except (CannotReduce, CannotExpand, OutOfBounds) as exc:
            # the extractor cannot skip this character, so the bit
            # position is consumed and rides the natural thickness
            action, n_after = f"failed-{type(exc).__name__.lower()}", core.thickness
            lossy.append(i)
        _record(plan, box, bit, action, core.thickness, n_after)
        i += 1
    if i < len(payload):
        raise InsufficientCapacity(
            f"only {i} of {len(payload)} bits fit the eligible characters"
        )
    return lossy


def _embed_es(px, analysis, payload, cfg, plan):
    i = 0
    lossy = []
    for line in analysis.lines[1:]:
        if i == len(payload):
            break
        for sub in es_sublines(analysis, line, cfg.n_s):
            if i == len(payload):
                break
            voters = [c for c in sub.complete_chars if analysis.is_eligible(c)]
            if not voters:
                continue
            bit = payload[i]
            for box in voters:
                core = analysis.cores[(box.line_index, box.char_index)]
                try:
                    action, n_after = _embed_into_char(px, analysis, box, bit, cfg, plan)
                except (CannotReduce, CannotExpand, OutOfBounds) as exc:
                    action, n_after = f"failed-{type(exc).__name__.lower()}", core.thickness
                    if i not in lossy:
                        lossy.append(i)
                _record(plan, box, bit, action, core.thickness, n_after)
            i += 1
    if i < len(payload):
        raise InsufficientCapacity(
            f"only {i} of {len(payload)} bits fit the usable sub-lines"
        )
    return lossy


def embed_page(page: BinaryImage, payload, cfg: EmbedConfig = None):
    """Embed a bit sequence into a page.

    Returns (watermarked page, EmbedPlan, EmbedReport). The payload is
    consumed in reading order over the non-baseline characters (or
    sub-lines when the strength modulator is enabled); characters whose
    selection score is too low, or that cannot be modified cleanly, are
    skipped. A post-pass re-runs the blind decoder and confirms both the
    eligibility set and the decoded bits, so a successfully returned
    page is guaranteed to round-trip in default mode.
    """
    if cfg is None:
        cfg = EmbedConfig()
    payload = [int(b) for b in payload]
    if not payload or any(b not in (0, 1) for b in payload):
        raise ValueError("payload must be a non-empty 0/1 sequence")

    analysis = analyze_page(page, cfg.lambda_, cfg.t_c)
    out = page.copy()
    px = out.pixels
    plan = EmbedPlan(
        t_lambda=analysis.t_lambda,
        t_delta=analysis.t_delta,
        baseline_line=0,
        mode="es" if cfg.es_enabled else "plain",
        config=cfg.to_json(),
    )
    if cfg.es_enabled:
        lossy = _embed_es(px, analysis, payload, cfg, plan)
    else:
        lossy = _embed_plain(px, analysis, payload, cfg, plan)

    if not cfg.strict_paper_mode:
        _check_consistency(out, analysis, payload, cfg, lossy)

    modified = sum(1 for a in plan.assignments if a["action"] in ("reduced", "expanded"))
    skipped = sum(1 for a in plan.assignments if a["action"].startswith("skip"))
    report = EmbedReport(
        flipped_pixels=hamming(page, out),
        chars_modified=modified,
        chars_skipped=skipped,
        psnr=_psnr(page, out) if cfg.compute_metrics else None,
        ssim=_ssim(page, out) if cfg.compute_metrics else None,
    )
    return out, plan, report


class EmbeddingUnstable(InsufficientCapacity):
    """Embedding changed the page in a way the blind decoder cannot
    reproduce (selection drift or a decode mismatch)."""


def _check_consistency(out, analysis, payload, cfg, lossy):
    """Post-conditions: the watermarked page re-analyzes to the same
    eligibility set and decodes to the payload (positions whose carrier
    could not be modified are known-lossy and excluded)."""
    from .extract import _char_bit_stream, _subline_bit_stream, _take

    post = analyze_page(out, cfg.lambda_, cfg.t_c)
    if len(post.chars) != len(analysis.chars):
        raise EmbeddingUnstable("embedding altered the character count")
    if post.t_delta != analysis.t_delta:
        raise EmbeddingUnstable("embedding altered the baseline threshold")
    for before, after in zip(analysis.chars, post.chars):
        if analysis.is_eligible(before) != post.is_eligible(after):
            raise EmbeddingUnstable(
                f"selection flipped for char {(after.line_index, after.char_index)}"
            )
    stream = (
        _subline_bit_stream(post, cfg.n_s)
        if cfg.es_enabled
        else _char_bit_stream(post)
    )
    decoded = _take(stream, len(payload))
    bad = [i for i, (d, p) in enumerate(zip(decoded, payload))
           if d != p and i not in lossy]
    if bad:
        raise EmbeddingUnstable(
            f"watermarked page does not decode to the payload at bits {bad[:8]}"
        )
