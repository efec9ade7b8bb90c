"""Deterministic, seedable simulation of transmission attacks.

Every attack maps a binary page to a binary page: lossy steps run on
the 8-bit expansion and the result is re-binarized at threshold 128,
mirroring how a received document image is preprocessed before
extraction. The scale attack keeps the new size (extraction adapts to
it); the screenshot attack models screen down-sampling as a down/up
resample pair.
"""

from __future__ import annotations

import io
import time
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import InvalidParams
from .extract import ExtractConfig, extract_page
from .image import BinaryImage, GrayImage, binarize, to_gray
from .metrics import accuracy, psnr, ssim

__all__ = ["AttackSpec", "apply_attack", "attack_suite", "EvalReport", "ATTACK_KINDS"]

_RANGES = {
    "jpeg": ("quality", 5, 95),
    "scale": ("factor", 0.2, 3.0),
    "screenshot": ("factor", 0.3, 0.95),
    "gaussian_noise": ("sigma", 0.0, 64.0),
    "salt_pepper": ("density", 0.0, 0.05),
    "rebinarize": ("threshold", 1, 254),
}

ATTACK_KINDS = tuple(_RANGES)


@dataclass
class AttackSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def validate(self):
        if self.kind not in _RANGES:
            raise InvalidParams(f"unknown attack kind {self.kind!r}")
        name, lo, hi = _RANGES[self.kind]
        if name not in self.params:
            raise InvalidParams(f"attack {self.kind!r} requires parameter {name!r}")
        value = self.params[name]
        if not lo <= value <= hi:
            raise InvalidParams(
                f"{self.kind}.{name}={value} outside [{lo}, {hi}]"
            )
        return self

    def label(self) -> str:
        name, _, _ = _RANGES[self.kind]
        return f"{self.kind}({name}={self.params[name]})"


def _gray_pil(img: BinaryImage) -> Image.Image:
    return Image.fromarray(to_gray(img).pixels, mode="L")


def _binarized(arr: np.ndarray) -> BinaryImage:
    return binarize(GrayImage(arr), 128)


def _jpeg(page: BinaryImage, quality: int) -> BinaryImage:
    buf = io.BytesIO()
    _gray_pil(page).save(buf, format="JPEG", quality=int(quality))
    buf.seek(0)
    with Image.open(buf) as im:
        arr = np.asarray(im.convert("L"), dtype=np.uint8)
    return _binarized(arr)


def _resize(page: BinaryImage, w: int, h: int) -> np.ndarray:
    im = _gray_pil(page).resize((w, h), Image.BILINEAR)
    return np.asarray(im, dtype=np.uint8)


def _scale(page: BinaryImage, factor: float) -> BinaryImage:
    if factor == 1.0:
        return page.copy()
    w = max(1, round(page.width * factor))
    h = max(1, round(page.height * factor))
    return _binarized(_resize(page, w, h))


def _screenshot(page: BinaryImage, factor: float) -> BinaryImage:
    w = max(1, round(page.width * factor))
    h = max(1, round(page.height * factor))
    down = Image.fromarray(_resize(page, w, h), mode="L")
    up = down.resize((page.width, page.height), Image.BILINEAR)
    return _binarized(np.asarray(up, dtype=np.uint8))


def _gaussian_noise(page: BinaryImage, sigma: float, seed: int) -> BinaryImage:
    rng = np.random.default_rng(seed)
    gray = to_gray(page).pixels.astype(np.float64)
    noisy = gray + rng.normal(0.0, sigma, gray.shape)
    return _binarized(np.clip(noisy, 0, 255).astype(np.uint8))


def _salt_pepper(page: BinaryImage, density: float, seed: int) -> BinaryImage:
    rng = np.random.default_rng(seed)
    flips = rng.random(page.pixels.shape) < density
    return BinaryImage(page.pixels ^ flips.astype(np.uint8))


def _rebinarize(page: BinaryImage, threshold: int) -> BinaryImage:
    return binarize(to_gray(page), int(threshold))


def apply_attack(page: BinaryImage, spec: AttackSpec) -> BinaryImage:
    """Apply one attack; identical (page, spec) pairs give identical
    output."""
    spec.validate()
    p = spec.params
    if spec.kind == "jpeg":
        return _jpeg(page, p["quality"])
    if spec.kind == "scale":
        return _scale(page, p["factor"])
    if spec.kind == "screenshot":
        return _screenshot(page, p["factor"])
    if spec.kind == "gaussian_noise":
        return _gaussian_noise(page, p["sigma"], spec.seed)
    if spec.kind == "salt_pepper":
        return _salt_pepper(page, p["density"], spec.seed)
    return _rebinarize(page, p["threshold"])


@dataclass
class EvalReport:
    schema: int
    config: dict
    psnr: float | None
    ssim: float | None
    rows: list

    def to_json(self) -> dict:
        return {
            "schema": self.schema,
            "config": self.config,
            "psnr": self.psnr,
            "ssim": self.ssim,
            "rows": self.rows,
        }

    def to_csv(self) -> str:
        lines = ["attack,param,seed,acc,psnr,ssim,runtime_ms,error"]
        for r in self.rows:
            lines.append(
                "{attack},{param},{seed},{acc},{psnr},{ssim},{runtime_ms},{error}".format(
                    attack=r["attack"],
                    param=r["param"],
                    seed=r["seed"],
                    acc="" if r["acc"] is None else f"{r['acc']:.4f}",
                    psnr="" if self.psnr is None else f"{self.psnr:.4f}",
                    ssim="" if self.ssim is None else f"{self.ssim:.6f}",
                    runtime_ms=f"{r['runtime_ms']:.1f}",
                    error=r["error"] or "",
                )
            )
        return "\n".join(lines) + "\n"


def attack_suite(watermarked: BinaryImage, payload, specs, cfg: ExtractConfig,
                 original: BinaryImage = None) -> EvalReport:
    """Attack -> extract -> score for every spec; per-spec extraction
    failures are recorded in the row, not raised."""
    payload = [int(b) for b in payload]
    rows = []
    for spec in specs:
        spec.validate()
        start = time.perf_counter()
        error = None
        acc = None
        try:
            attacked = apply_attack(watermarked, spec)
            bits = extract_page(attacked, cfg)
            acc = accuracy(bits, payload)
        except Exception as exc:  # recorded per-spec, never fatal
            error = f"{type(exc).__name__}: {exc}"
        elapsed = (time.perf_counter() - start) * 1000.0
        name, _, _ = _RANGES[spec.kind]
        rows.append(
            {
                "attack": spec.kind,
                "param": spec.params[name],
                "seed": spec.seed,
                "acc": acc,
                "runtime_ms": elapsed,
                "error": error,
            }
        )
    return EvalReport(
        schema=1,
        config={
            "length": cfg.length,
            "framed": cfg.framed,
            "es": cfg.es_enabled,
            "ns": cfg.n_s,
            "lambda": cfg.lambda_,
            "tc": cfg.t_c,
        },
        psnr=psnr(original, watermarked) if original is not None else None,
        ssim=ssim(original, watermarked) if original is not None else None,
        rows=rows,
    )
