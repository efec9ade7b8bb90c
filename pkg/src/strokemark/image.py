"""Binary image representation, PBM/PNG file I/O, and binarization.

Pixel convention everywhere in this package: 0 = black, 1 = white.
PBM stores the opposite polarity (bit 1 = black), so the codecs here
flip bits on the way in and out.
"""

from __future__ import annotations

import io
import os

import numpy as np

from .errors import CorruptFile, DimensionMismatch, IoError, UnsupportedFormat

__all__ = [
    "BinaryImage",
    "GrayImage",
    "to_gray",
    "from_gray",
    "binarize",
    "load_image",
    "save_image",
]


class BinaryImage:
    """A rectangular grid of 0 (black) / 1 (white) pixels."""

    __slots__ = ("pixels",)

    def __init__(self, pixels):
        arr = np.asarray(pixels, dtype=np.uint8)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("pixels must be a non-empty 2-D grid")
        if arr.max(initial=0) > 1:
            raise ValueError("pixel values must be 0 or 1")
        self.pixels = arr

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    def copy(self):
        return BinaryImage(self.pixels.copy())

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"BinaryImage({self.width}x{self.height})"


class GrayImage:
    """8-bit grayscale image, intensities in [0, 255]."""

    __slots__ = ("pixels",)

    def __init__(self, pixels):
        arr = np.asarray(pixels, dtype=np.uint8)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("pixels must be a non-empty 2-D grid")
        self.pixels = arr

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


def to_gray(img: BinaryImage) -> GrayImage:
    """Expand a binary image to 8-bit: black -> 0, white -> 255."""
    return GrayImage(img.pixels * np.uint8(255))


def from_gray(img: GrayImage, threshold: int = 128) -> BinaryImage:
    return binarize(img, threshold)


def binarize(img: GrayImage, threshold: int = 128) -> BinaryImage:
    """Threshold a grayscale image: pixel becomes black iff intensity < threshold."""
    if not 0 < threshold < 256:
        raise ValueError("threshold must lie in (0, 255]")
    return BinaryImage((img.pixels >= threshold).astype(np.uint8))


# --- PBM (P4) codec ---

def _read_pbm_token(buf: io.BytesIO) -> bytes:
    """Read one whitespace-delimited header token, skipping # comments."""
    token = b""
    while True:
        c = buf.read(1)
        if c == b"":
            raise CorruptFile("unexpected end of PBM header")
        if c == b"#":
            while c not in (b"\n", b"", b"\r"):
                c = buf.read(1)
            continue
        if c.isspace():
            if token:
                return token
            continue
        token += c


def decode_pbm(data: bytes) -> BinaryImage:
    buf = io.BytesIO(data)
    magic = _read_pbm_token(buf)
    if magic != b"P4":
        raise UnsupportedFormat(f"not a binary PBM (magic {magic!r})")
    try:
        width = int(_read_pbm_token(buf))
        height = int(_read_pbm_token(buf))
    except ValueError as exc:
        raise CorruptFile("malformed PBM dimensions") from exc
    if width < 1 or height < 1:
        raise CorruptFile("PBM dimensions must be positive")
    stride = (width + 7) // 8
    raw = buf.read(stride * height)
    if len(raw) < stride * height:
        raise CorruptFile("PBM pixel data truncated")
    rows = np.frombuffer(raw, dtype=np.uint8).reshape(height, stride)
    bits = np.unpackbits(rows, axis=1)[:, :width]
    return BinaryImage(1 - bits)


def encode_pbm(img: BinaryImage) -> bytes:
    header = f"P4\n{img.width} {img.height}\n".encode("ascii")
    bits = (1 - img.pixels).astype(np.uint8)
    packed = np.packbits(bits, axis=1)
    return header + packed.tobytes()


def load_image(path, threshold: int = 128) -> BinaryImage:
    """Load a 1-bit PBM (P4) or 8-bit grayscale PNG as a BinaryImage.

    PNG input is binarized at `threshold` (default 128).
    """
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    if data[:2] == b"P4":
        return decode_pbm(data)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _decode_png(data, threshold)
    raise UnsupportedFormat(f"unrecognized image format: {os.fspath(path)}")


def _decode_png(data: bytes, threshold: int) -> BinaryImage:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(io.BytesIO(data)) as im:
            if im.mode == "1":
                im = im.convert("L")
            if im.mode != "L":
                raise UnsupportedFormat(
                    f"PNG must be 8-bit grayscale, got mode {im.mode}"
                )
            arr = np.asarray(im, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise CorruptFile("unreadable PNG data") from exc
    return binarize(GrayImage(arr), threshold)


def save_image(img: BinaryImage, path) -> None:
    """Write a BinaryImage as bit-exact P4 PBM."""
    try:
        with open(path, "wb") as fh:
            fh.write(encode_pbm(img))
    except OSError as exc:
        raise IoError(str(exc)) from exc


def hamming(a: BinaryImage, b: BinaryImage) -> int:
    """Number of differing pixels between two equally sized images."""
    if a.pixels.shape != b.pixels.shape:
        raise DimensionMismatch("images differ in size")
    return int(np.count_nonzero(a.pixels != b.pixels))
