"""Deterministic test-page generation from a built-in bitmap glyph set.

The glyph set is hand-drawn around wide horizontal strokes: the
dominant stroke of every glyph is a horizontal bar whose appendages
(short stems flush with a bar end) stay well clear of the bar's run
extent, so cluster membership is stable across integer upscaling.
Four short-core glyphs (punctuation stand-ins, all with the same core
run length) give every page a population for the selection threshold
to cut; they are drawn pixel-heavy so that disabling selection does
not change the page's overall modification cost.

Pages are composed at unit scale and integer-upscaled with
nearest-neighbor replication, so recorded ground-truth boxes scale
exactly and always match the segmentation module's output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IoError, UnknownGlyph
from .image import BinaryImage, save_image
from .segmentation import Rect

__all__ = ["GlyphSet", "default_glyphset", "render_page", "make_corpus", "CORPUS_ALPHABET"]


def _g(art: str) -> np.ndarray:
    rows = [r for r in art.strip("\n").splitlines()]
    width = max(len(r) for r in rows)
    grid = np.ones((len(rows), width), dtype=np.uint8)
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            if ch == "#":
                grid[y, x] = 0
    return grid


# Wide-bar glyphs; stems are flush with a bar end and at least seven
# columns narrower than the bar, so they never chain into the bar
# cluster once the page is upscaled past 1.5x. Short-core glyphs are
# solid blocks: their core run stays below the selection cut while
# their pixel mass keeps modification costs comparable to the bars.
_GLYPH_ART = {
    "A": """
##########
##########
##########
###.......
###.......
###.......
###.......
""",
    "B": """
##########
##########
##########
.......###
.......###
.......###
.......###
""",
    "C": """
###.......
###.......
###.......
###.......
##########
##########
##########
""",
    "D": """
.......###
.......###
.......###
.......###
##########
##########
##########
""",
    "E": """
###########
###########
###########
""",
    "F": """
##########
##########
##########
""",
    "G": """
###########
###########
###########
""",
    "H": """
##########
##########
##########
##########
""",
    "I": """
###########
###########
###########
""",
    "J": """
##########
##########
##########
###....###
###....###
###....###
""",
    "K": """
###....###
###....###
###....###
##########
##########
##########
""",
    "L": """
###########
###########
###########
###........
###........
###........
###........
###........
""",
    ".": """
######
######
######
######
######
""",
    ",": """
######
######
######
######
######
""",
    "-": """
######
######
######
######
######
""",
    "'": """
######
######
######
######
######
""",
}

# Same shapes one notch smaller: strokes thin to 1-2 px, the regime
# where isolated channel noise genuinely competes with glyph features.
_SMALL_GLYPH_ART = {
    "A": """
########
########
##......
##......
""",
    "B": """
########
########
......##
......##
""",
    "C": """
##......
##......
########
########
""",
    "D": """
......##
......##
########
########
""",
    "E": """
#########
#########
""",
    "F": """
########
########
""",
    "G": """
#######
#######
""",
    "H": """
########
########
########
""",
    "I": """
#######
""",
    "J": """
########
########
##....##
##....##
""",
    "K": """
##....##
##....##
########
########
""",
    "L": """
#########
#########
##.......
##.......
##.......
""",
    ".": """
###
###
""",
    ",": """
####
####
""",
    "-": """
####
""",
    "'": """
###
""",
}

LONG_GLYPHS = "ABCDEFGHIJKL"
SHORT_GLYPHS = ".,-'"
CORPUS_ALPHABET = LONG_GLYPHS + SHORT_GLYPHS


@dataclass
class GlyphSet:
    glyphs: dict  # codepoint -> 0/1 bitmap (0 = black)
    char_gap: int = 3
    line_gap: int = 14
    space_advance: int = 6
    nominal_height: int = 8


def default_glyphset(size: str = "regular") -> GlyphSet:
    """The built-in glyph set; size "small" is the fragile one-notch-down
    variant emulating the smallest font of a size sweep."""
    if size == "regular":
        return GlyphSet(glyphs={ch: _g(art) for ch, art in _GLYPH_ART.items()})
    if size == "small":
        return GlyphSet(
            glyphs={ch: _g(art) for ch, art in _SMALL_GLYPH_ART.items()},
            char_gap=3,
            line_gap=10,
            space_advance=4,
            nominal_height=4,
        )
    raise ValueError(f"unknown glyph size {size!r}")


def render_page(text: str, glyphset: GlyphSet = None, scale: int = 1, margin: int = 40):
    """Render text (lines separated by newline) to a page image.

    Returns (BinaryImage, ground_truth) where ground_truth is a list of
    per-line dicts holding the line rect and the tight rect of every
    glyph, matching what the segmentation module reports.
    """
    if glyphset is None:
        glyphset = default_glyphset()
    if scale < 1:
        raise ValueError("scale must be >= 1")
    lines = text.split("\n")

    placed = []  # (line_idx, x, y, bitmap) at unit scale
    line_meta = []
    y = margin
    width_needed = 0
    for li, line_text in enumerate(lines):
        x = margin
        line_height = 0
        glyph_cells = []
        for ch in line_text:
            if ch == " ":
                x += glyphset.space_advance
                continue
            if ch not in glyphset.glyphs:
                raise UnknownGlyph(f"no glyph for character {ch!r}")
            bmp = glyphset.glyphs[ch]
            glyph_cells.append((x, bmp))
            x += bmp.shape[1] + glyphset.char_gap
            line_height = max(line_height, bmp.shape[0])
        if not glyph_cells:
            raise UnknownGlyph("line contains no renderable glyphs")
        # bottom-align glyphs within the line slot
        for gx, bmp in glyph_cells:
            gy = y + line_height - bmp.shape[0]
            placed.append((li, gx, gy, bmp))
        line_meta.append((li, y, line_height))
        width_needed = max(width_needed, x - glyphset.char_gap + margin)
        y += line_height + glyphset.line_gap
    height_needed = y - glyphset.line_gap + margin

    page = np.ones((height_needed, width_needed), dtype=np.uint8)
    truth = []
    for li, ly, lh in line_meta:
        truth.append({"line": li, "chars": []})
    for li, gx, gy, bmp in placed:
        page[gy : gy + bmp.shape[0], gx : gx + bmp.shape[1]] &= bmp
        truth[li]["chars"].append(
            {"rect": [gx * scale, gy * scale, bmp.shape[1] * scale, bmp.shape[0] * scale]}
        )
    for entry in truth:
        rects = [Rect(*c["rect"]) for c in entry["chars"]]
        x0 = min(r.x0 for r in rects)
        y0 = min(r.y0 for r in rects)
        x1 = max(r.x1 for r in rects)
        y1 = max(r.y1 for r in rects)
        entry["rect"] = [x0, y0, x1 - x0, y1 - y0]

    if scale > 1:
        page = np.kron(page, np.ones((scale, scale), dtype=np.uint8))
    return BinaryImage(page), truth


def _random_line(rng, n_chars: int) -> str:
    # exactly one quarter short-core glyphs per line, so the selection
    # percentile (at the default 0.2) always lands inside the uniform
    # short population regardless of page-level sampling noise
    n_short = n_chars // 4
    chars = [SHORT_GLYPHS[i] for i in rng.integers(0, len(SHORT_GLYPHS), n_short)]
    chars += [LONG_GLYPHS[i] for i in rng.integers(0, len(LONG_GLYPHS),
                                                   n_chars - n_short)]
    order = rng.permutation(len(chars))
    return "".join(chars[i] for i in order)


def page_text(rng, lines_per_page: int, chars_per_line: int) -> str:
    return "\n".join(_random_line(rng, chars_per_line) for _ in range(lines_per_page))


def make_corpus(
    out_dir,
    n_pages: int = 10,
    lines_per_page: int = 6,
    chars_per_line: int = 40,
    seed: int = 0,
    scale: int = 2,
    margin: int = 250,
    glyph_size: str = "regular",
) -> dict:
    """Generate a deterministic corpus: NNN.pbm + NNN.json per page,
    plus corpus.json echoing the generation parameters."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    rng = np.random.default_rng(seed)
    glyphset = default_glyphset(glyph_size)
    manifest = {
        "schema": 1,
        "n_pages": n_pages,
        "lines_per_page": lines_per_page,
        "chars_per_line": chars_per_line,
        "seed": seed,
        "scale": scale,
        "margin": margin,
        "glyph_size": glyph_size,
        "pages": [],
    }
    for p in range(n_pages):
        text = page_text(rng, lines_per_page, chars_per_line)
        page, truth = render_page(text, glyphset, scale=scale, margin=margin)
        stem = f"{p:03d}"
        save_image(page, out / f"{stem}.pbm")
        meta = {"page": p, "text": text, "lines": truth}
        (out / f"{stem}.json").write_text(json.dumps(meta))
        manifest["pages"].append(stem)
    (out / "corpus.json").write_text(json.dumps(manifest, indent=2))
    return manifest
