"""Extraction-accuracy and visual-quality metrics (ACC, PSNR, SSIM).

PSNR and SSIM are computed on the 8-bit expansion of the binary images
(black -> 0, white -> 255) so values are comparable to standard 8-bit
image-quality figures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve1d

from .errors import DimensionMismatch, ImageTooSmall, LengthMismatch
from .image import BinaryImage

__all__ = ["accuracy", "psnr", "ssim", "QualityMetrics", "quality_metrics", "INFINITE"]

INFINITE = math.inf

_SSIM_WIN = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03


@dataclass
class QualityMetrics:
    psnr: float
    ssim: float


def accuracy(extracted, embedded) -> float:
    """Percentage of positions where the two bit sequences agree."""
    ext = list(extracted)
    emb = list(embedded)
    if len(ext) != len(emb) or not ext:
        raise LengthMismatch(
            f"bit sequences must have equal nonzero length ({len(ext)} vs {len(emb)})"
        )
    correct = sum(1 for a, b in zip(ext, emb) if a == b)
    return correct / len(ext) * 100.0


def _as_float_gray(img: BinaryImage) -> np.ndarray:
    return img.pixels.astype(np.float64) * 255.0


def psnr(a: BinaryImage, b: BinaryImage) -> float:
    """Peak signal-to-noise ratio in dB; INFINITE for identical images."""
    if a.pixels.shape != b.pixels.shape:
        raise DimensionMismatch("images differ in size")
    diff = _as_float_gray(a) - _as_float_gray(b)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return INFINITE
    return 10.0 * math.log10(255.0 ** 2 / mse)


def _gaussian_kernel() -> np.ndarray:
    radius = (_SSIM_WIN - 1) // 2
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-(x * x) / (2.0 * _SSIM_SIGMA ** 2))
    return g / g.sum()


def _ssim_map_sum(x: np.ndarray, y: np.ndarray):
    """Sum of the SSIM map over all fully interior window positions."""
    kernel = _gaussian_kernel()
    pad = (_SSIM_WIN - 1) // 2

    def filt(img):
        out = convolve1d(img, kernel, axis=0, mode="constant")
        out = convolve1d(out, kernel, axis=1, mode="constant")
        return out[pad:-pad, pad:-pad]

    ux = filt(x)
    uy = filt(y)
    vx = filt(x * x) - ux * ux
    vy = filt(y * y) - uy * uy
    vxy = filt(x * y) - ux * uy

    c1 = (_SSIM_K1 * 255.0) ** 2
    c2 = (_SSIM_K2 * 255.0) ** 2
    num = (2.0 * ux * uy + c1) * (2.0 * vxy + c2)
    den = (ux * ux + uy * uy + c1) * (vx + vy + c2)
    smap = num / den
    return float(smap.sum()), smap.size


def ssim(a: BinaryImage, b: BinaryImage) -> float:
    """Single-scale SSIM with an 11x11 Gaussian window (sigma 1.5).

    The SSIM map is averaged over all fully interior window positions.
    Windows whose content is identical in both images contribute exactly
    1, so only the bounding box of the differing pixels is filtered.
    """
    if a.pixels.shape != b.pixels.shape:
        raise DimensionMismatch("images differ in size")
    h, w = a.pixels.shape
    if h < _SSIM_WIN or w < _SSIM_WIN:
        raise ImageTooSmall(f"both sides must be >= {_SSIM_WIN} pixels")

    diff = a.pixels != b.pixels
    total_windows = (h - _SSIM_WIN + 1) * (w - _SSIM_WIN + 1)
    if not diff.any():
        return 1.0
    rows = np.nonzero(diff.any(axis=1))[0]
    cols = np.nonzero(diff.any(axis=0))[0]
    grow = _SSIM_WIN - 1
    y0 = max(int(rows[0]) - grow, 0)
    y1 = min(int(rows[-1]) + 1 + grow, h)
    x0 = max(int(cols[0]) - grow, 0)
    x1 = min(int(cols[-1]) + 1 + grow, w)
    sub = np.s_[y0:y1, x0:x1]
    boxsum, boxn = _ssim_map_sum(
        a.pixels[sub].astype(np.float64) * 255.0,
        b.pixels[sub].astype(np.float64) * 255.0,
    )
    return (boxsum + (total_windows - boxn)) / total_windows


def quality_metrics(a: BinaryImage, b: BinaryImage) -> QualityMetrics:
    return QualityMetrics(psnr=psnr(a, b), ssim=ssim(a, b))
