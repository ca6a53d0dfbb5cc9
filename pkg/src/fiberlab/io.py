"""MPFW1 grid files.

Layout: the 5-byte magic ``MPFW1``, a little-endian u32 ``n``, a u8 flag
(0 = physical samples, 1 = spectrum or symbol), then little-endian float64
(re, im) pairs in row-major order with the row carrying the first coordinate.
Two-dimensional payloads have n^2 pairs, 1-D symbols have n.  Spectra and
symbols are written in centred order: row r holds frequency ``r - n/2``.
"""

from __future__ import annotations

import struct
from typing import Union

import numpy as np

from .bumps import Symbol1D
from .grid import GridFunction2D, Spectrum2D, inverse_transform
from .operators import Symbol2D

MAGIC = b"MPFW1"
_HEADER = struct.Struct("<5sIB")

Payload = Union[GridFunction2D, Spectrum2D, Symbol1D, Symbol2D]


def _pack(n: int, flag: int, values: np.ndarray) -> bytes:
    v = np.asarray(values, dtype=complex).ravel()
    pairs = np.empty(2 * v.size, dtype="<f8")
    pairs[0::2] = v.real
    pairs[1::2] = v.imag
    return _HEADER.pack(MAGIC, n, flag) + pairs.tobytes()


def dumps(obj: Payload) -> bytes:
    if isinstance(obj, GridFunction2D):
        return _pack(obj.n, 0, obj.samples)
    if isinstance(obj, Spectrum2D):
        return _pack(obj.n, 1, obj.centered())
    if isinstance(obj, Symbol2D):
        return _pack(obj.n, 1, np.fft.fftshift(obj.values))
    if isinstance(obj, Symbol1D):
        return _pack(obj.n, 1, np.fft.fftshift(obj.values))
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def loads(data: bytes, as_symbol: bool = False) -> Payload:
    """Decode a file.  Flag 1 with an n^2 payload gives a Spectrum2D, or a
    Symbol2D when ``as_symbol``; an n-long payload gives a Symbol1D."""
    if len(data) < _HEADER.size:
        raise ValueError("file too short for an MPFW1 header")
    magic, n, flag = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if flag not in (0, 1):
        raise ValueError(f"bad flag {flag}, expected 0 or 1")
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    if body.size % 2:
        raise ValueError("payload holds an odd number of float64 values")
    v = body[0::2] + 1j * body[1::2]
    if v.size == n * n:
        a = v.reshape(n, n)
        if flag == 0:
            return GridFunction2D(a)
        if as_symbol:
            return Symbol2D(np.fft.ifftshift(a))
        return Spectrum2D.from_centered(a)
    if v.size == n and flag == 1:
        return Symbol1D(np.fft.ifftshift(v))
    raise ValueError(f"payload of {v.size} values does not match n = {n} with flag {flag}")


def write(path: str, obj: Payload) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps(obj))


def read(path: str, as_symbol: bool = False) -> Payload:
    with open(path, "rb") as fh:
        return loads(fh.read(), as_symbol)


def read_grid(path: str) -> GridFunction2D:
    """Read a physical grid function; spectra are transformed back."""
    obj = read(path)
    if isinstance(obj, Spectrum2D):
        return inverse_transform(obj)
    if not isinstance(obj, GridFunction2D):
        raise ValueError(f"{path} does not hold a 2-D grid function")
    return obj
