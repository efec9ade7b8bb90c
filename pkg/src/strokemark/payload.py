"""Keyed scrambling and optional framing of the watermark bits.

Scrambling XORs the bits with a keystream generated by keyed BLAKE2b
over (nonce || block counter), so it is its own inverse. Framing wraps
the bits in a 16-bit big-endian length prefix plus an 8-bit CRC
(polynomial 0x07) over prefix and body, letting the extractor
self-detect desynchronization. When both are used the scrambled bits
are framed (frame outermost), so a blind extractor can read the length
prefix without the key.
"""

from __future__ import annotations

import hashlib

from .errors import ChecksumFailed, KeyTooShort, PayloadTooLong

__all__ = ["scramble", "frame", "unframe", "crc8", "encode_payload", "decode_wire",
           "MIN_KEY_BYTES", "MAX_KEY_BYTES"]

MIN_KEY_BYTES = 16
MAX_KEY_BYTES = 64

_CRC_POLY = 0x07


def _check_key(key: bytes) -> bytes:
    if not isinstance(key, (bytes, bytearray)):
        raise TypeError("key must be bytes")
    if len(key) < MIN_KEY_BYTES:
        raise KeyTooShort(f"key must be at least {MIN_KEY_BYTES} bytes")
    if len(key) > MAX_KEY_BYTES:
        raise ValueError(f"key must be at most {MAX_KEY_BYTES} bytes")
    return bytes(key)


def _keystream_bits(key: bytes, nonce: int, n: int):
    out = []
    counter = 0
    while len(out) < n:
        block = hashlib.blake2b(
            nonce.to_bytes(8, "big") + counter.to_bytes(8, "big"),
            key=key,
            digest_size=64,
        ).digest()
        for byte in block:
            for shift in range(7, -1, -1):
                out.append((byte >> shift) & 1)
        counter += 1
    return out[:n]


def scramble(bits, key: bytes, nonce: int = 0) -> list:
    """XOR bits with the keyed keystream; applying it twice restores
    the input."""
    bits = [int(b) for b in bits]
    if not bits:
        raise ValueError("bit sequence must be non-empty")
    key = _check_key(key)
    ks = _keystream_bits(key, nonce, len(bits))
    return [b ^ k for b, k in zip(bits, ks)]


def crc8(bits) -> list:
    """Bitwise CRC-8 (poly 0x07) over an arbitrary-length bit stream."""
    reg = 0
    for b in bits:
        reg ^= (int(b) & 1) << 7
        if reg & 0x80:
            reg = ((reg << 1) ^ _CRC_POLY) & 0xFF
        else:
            reg = (reg << 1) & 0xFF
    return [(reg >> i) & 1 for i in range(7, -1, -1)]


def frame(bits) -> list:
    """16-bit big-endian length prefix + body + CRC-8 over both."""
    bits = [int(b) for b in bits]
    if len(bits) > 0xFFFF:
        raise PayloadTooLong("framed payload limited to 65535 bits")
    prefix = [(len(bits) >> i) & 1 for i in range(15, -1, -1)]
    return prefix + bits + crc8(prefix + bits)


def unframe(bits) -> list:
    """Strip and verify a frame; raises ChecksumFailed on a bad CRC."""
    bits = [int(b) for b in bits]
    if len(bits) < 24:
        raise ChecksumFailed("frame shorter than header plus checksum")
    n = int("".join(str(b) for b in bits[:16]), 2)
    if len(bits) != 24 + n:
        raise ChecksumFailed(f"frame length field says {n}, got {len(bits) - 24} body bits")
    body = bits[16 : 16 + n]
    if crc8(bits[: 16 + n]) != bits[16 + n :]:
        raise ChecksumFailed("frame checksum mismatch")
    return body


def encode_payload(bits, key: bytes = None, nonce: int = 0, framed: bool = False) -> list:
    """Payload -> wire bits: scramble (if keyed), then frame (if framed)."""
    wire = [int(b) for b in bits]
    if key is not None:
        wire = scramble(wire, key, nonce)
    if framed:
        wire = frame(wire)
    return wire


def decode_wire(bits, key: bytes = None, nonce: int = 0, framed: bool = False) -> list:
    """Wire bits -> payload: unframe (if framed), then descramble."""
    out = [int(b) for b in bits]
    if framed:
        out = unframe(out)
    if key is not None and out:
        out = scramble(out, key, nonce)
    return out
