import numpy as np
import pytest
from PIL import Image

from strokemark.errors import CorruptFile, UnsupportedFormat
from strokemark.image import (
    BinaryImage,
    GrayImage,
    binarize,
    decode_pbm,
    encode_pbm,
    load_image,
    save_image,
    to_gray,
)


def test_decode_p4_two_pixels():
    # one row: black, white -> PBM bits 1, 0
    data = b"P4\n2 1\n" + bytes([0b10000000])
    img = decode_pbm(data)
    assert img.width == 2 and img.height == 1
    assert img.pixels.tolist() == [[0, 1]]


def test_encode_single_black_pixel():
    img = BinaryImage([[0]])
    data = encode_pbm(img)
    assert data.startswith(b"P4\n1 1\n")
    assert data[-1] == 0b10000000


def test_pbm_header_comments():
    data = b"P4\n# a comment\n2 1\n" + bytes([0b10000000])
    assert decode_pbm(data).pixels.tolist() == [[0, 1]]


def test_pbm_roundtrip_random():
    rng = np.random.default_rng(0)
    for _ in range(100):
        img = BinaryImage(rng.integers(0, 2, (64, 64)))
        assert decode_pbm(encode_pbm(img)) == img


def test_pbm_roundtrip_odd_width():
    rng = np.random.default_rng(1)
    for w in (1, 7, 8, 9, 13):
        img = BinaryImage(rng.integers(0, 2, (3, w)))
        assert decode_pbm(encode_pbm(img)) == img


def test_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    img = BinaryImage(rng.integers(0, 2, (32, 45)))
    path = tmp_path / "x.pbm"
    save_image(img, path)
    assert load_image(path) == img


def test_load_all_white_png(tmp_path):
    arr = np.full((8, 8), 255, np.uint8)
    path = tmp_path / "w.png"
    Image.fromarray(arr, mode="L").save(path)
    img = load_image(path)
    assert img.pixels.tolist() == np.ones((8, 8)).tolist()


def test_load_gray_png_threshold(tmp_path):
    arr = np.array([[0, 127, 128, 255]], np.uint8)
    path = tmp_path / "g.png"
    Image.fromarray(arr, mode="L").save(path)
    assert load_image(path).pixels.tolist() == [[0, 0, 1, 1]]


def test_load_rejects_unknown_format(tmp_path):
    path = tmp_path / "x.bin"
    path.write_bytes(b"GARBAGE")
    with pytest.raises(UnsupportedFormat):
        load_image(path)


def test_truncated_pbm():
    with pytest.raises(CorruptFile):
        decode_pbm(b"P4\n16 4\n\x00")


def test_binarize_examples():
    g = GrayImage([[0, 200]])
    b = binarize(g, 128)
    assert b.pixels.tolist() == [[0, 1]]


def test_binarize_fixed_point():
    rng = np.random.default_rng(3)
    for t in (1, 64, 128, 200, 255):
        b = BinaryImage(rng.integers(0, 2, (16, 16)))
        assert binarize(to_gray(b), t) == b


def test_binary_image_validation():
    with pytest.raises(ValueError):
        BinaryImage([[0, 2]])
    with pytest.raises(ValueError):
        BinaryImage(np.zeros((0, 4)))
