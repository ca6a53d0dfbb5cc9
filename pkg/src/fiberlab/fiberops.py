"""Fiber-wise multipliers and the square and maximal functions built on them.

Axis 1 acts on the first coordinate (array axis 0): each fiber ``F(., x2)`` is
transformed, multiplied by the symbol and transformed back.  Axis 2 acts on
``F(x1, .)`` in the same way.
"""

from __future__ import annotations

from typing import List

import numpy as np

from .bumps import DyadicSymbolFamily, Symbol1D
from .grid import GridFunction2D


def _array_axis(axis: int) -> int:
    if axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {axis!r}")
    return axis - 1


def multiply_fibers(a: np.ndarray, values: np.ndarray, axis: int) -> np.ndarray:
    """Raw-array form of :func:`apply_fiber`; ``a`` may carry leading batch axes."""
    ax = a.ndim - 2 + _array_axis(axis)
    shape = [1] * a.ndim
    shape[ax] = values.shape[0]
    spec = np.fft.fft(a, axis=ax)
    return np.fft.ifft(spec * values.reshape(shape), axis=ax)


def apply_fiber(F: GridFunction2D, sym: Symbol1D, axis: int) -> GridFunction2D:
    if sym.n != F.n:
        raise ValueError(f"symbol size {sym.n} does not match grid size {F.n}")
    return GridFunction2D(multiply_fibers(F.samples, np.asarray(sym.values), axis))


def lp_projection(F: GridFunction2D, family: DyadicSymbolFamily, kind: str, k: int, axis: int) -> GridFunction2D:
    """``P_k`` (kind "P", symbol phi_k) or ``Q_k`` (kind "Q", symbol psi_k) along ``axis``."""
    if family.n != F.n:
        raise ValueError(f"family size {family.n} does not match grid size {F.n}")
    if not family.k_min <= k <= family.k_max:
        raise ValueError(f"scale {k} outside window [{family.k_min}, {family.k_max}]")
    return GridFunction2D(multiply_fibers(F.samples, family.samples(kind, k), axis))


def scale_family(F: GridFunction2D, family: DyadicSymbolFamily, kind: str, axis: int) -> List[GridFunction2D]:
    return [lp_projection(F, family, kind, k, axis) for k in family.scales]


def square_function(F: GridFunction2D, family: DyadicSymbolFamily, kind: str, axis: int) -> GridFunction2D:
    """Pointwise l^2 norm over the scale window of the projections."""
    total = np.zeros(F.samples.shape)
    for G in scale_family(F, family, kind, axis):
        total += np.abs(G.samples) ** 2
    return GridFunction2D(np.sqrt(total))


def hl_maximal_fiber(F: GridFunction2D, axis: int) -> GridFunction2D:
    """Uncentered dyadic-length maximal function along each fiber.

    For each window length L = 1, 2, ..., n the averages over all periodic
    windows of that length are formed, then each point takes the largest
    average among the L windows that contain it.
    """
    ax = _array_axis(axis)
    a = np.moveaxis(np.abs(F.samples), ax, 0)
    n = a.shape[0]
    out = a.copy()
    L = 2
    while L <= n:
        # avg[s] = mean of a[s], ..., a[s + L - 1] (periodic)
        csum = np.concatenate([np.zeros((1, n)), np.cumsum(np.concatenate([a, a]), axis=0)])
        avg = (csum[L : L + n] - csum[:n]) / L
        # best[x] = max over s in [x - L + 1, x] of avg[s], built by doubling
        best = avg
        span = 1
        while span < L:
            best = np.maximum(best, np.roll(best, span, axis=0))
            span *= 2
        out = np.maximum(out, best)
        L *= 2
    return GridFunction2D(np.moveaxis(out, 0, ax))
