"""Discretized functions on the periodic unit square.

A grid function of size ``n`` holds samples ``F(i/n, j/n)`` with the first
array axis carrying the first coordinate ``x1``.  Spectra hold the
coefficients ``c(xi)`` of ``F(x) = sum_xi c(xi) exp(2 pi i x.xi)`` for integer
frequencies in ``[-n/2, n/2)^2``.  Arrays are kept in numpy's FFT order
internally; :func:`frequencies` gives the integer frequency at each index.

Every cell carries mass ``n^-2``, so the Lebesgue norms below are norms with
respect to the probability measure on the torus and the constant function 1
has norm 1 for every exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np


def is_power_of_two(n: int) -> bool:
    return isinstance(n, (int, np.integer)) and n >= 1 and (n & (n - 1)) == 0


def frequencies(n: int) -> np.ndarray:
    """Integer frequency at each FFT-order index, in ``[-n/2, n/2)``."""
    return np.fft.fftfreq(n, d=1.0 / n).round().astype(np.int64)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def _check_finite(a: np.ndarray, what: str) -> None:
    bad = ~np.isfinite(a)
    if bad.any():
        idx = tuple(int(v) for v in np.argwhere(bad)[0])
        raise ValueError(f"non-finite {what} at index {idx}: {a[idx]!r}")


@dataclass(frozen=True, eq=False)
class GridFunction2D:
    """Complex samples of a function on the n x n periodic grid."""

    samples: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.samples)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"samples must be a square 2-D array, got shape {a.shape}")
        if not is_power_of_two(a.shape[0]) or a.shape[0] < 8:
            raise ValueError(f"grid size must be a power of two >= 8, got {a.shape[0]}")
        _check_finite(a, "sample")
        object.__setattr__(self, "samples", _frozen(a))

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @classmethod
    def from_function(cls, func, n: int) -> "GridFunction2D":
        """Sample ``func(x1, x2)`` (vectorized) at the grid points."""
        x = np.arange(n) / n
        return cls(func(x[:, None], x[None, :]))

    @classmethod
    def exponential(cls, n: int, xi1: int, xi2: int, amplitude: complex = 1.0) -> "GridFunction2D":
        """The pure exponential ``amplitude * exp(2 pi i (xi1 x1 + xi2 x2))``."""
        i = np.arange(n)
        e1 = np.exp(2j * np.pi * ((xi1 * i) % n) / n)
        e2 = np.exp(2j * np.pi * ((xi2 * i) % n) / n)
        return cls(amplitude * e1[:, None] * e2[None, :])

    def __add__(self, other: "GridFunction2D") -> "GridFunction2D":
        return GridFunction2D(self.samples + other.samples)

    def __sub__(self, other: "GridFunction2D") -> "GridFunction2D":
        return GridFunction2D(self.samples - other.samples)

    def __mul__(self, other) -> "GridFunction2D":
        if isinstance(other, GridFunction2D):
            return GridFunction2D(self.samples * other.samples)
        return GridFunction2D(self.samples * other)

    __rmul__ = __mul__

    def translate(self, s1: int, s2: int) -> "GridFunction2D":
        """``x -> F(x - (s1, s2)/n)``."""
        return GridFunction2D(np.roll(self.samples, (s1, s2), axis=(0, 1)))


@dataclass(frozen=True, eq=False)
class Spectrum2D:
    """Fourier coefficients in FFT order; use :meth:`coeff` to index by frequency."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.coeffs)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or not is_power_of_two(a.shape[0]):
            raise ValueError(f"coefficients must be a square power-of-two array, got shape {a.shape}")
        _check_finite(a, "coefficient")
        object.__setattr__(self, "coeffs", _frozen(a))

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    def coeff(self, xi1: int, xi2: int) -> complex:
        return complex(self.coeffs[xi1 % self.n, xi2 % self.n])

    def centered(self) -> np.ndarray:
        """Coefficients with row r holding frequency ``r - n/2``."""
        return np.fft.fftshift(self.coeffs)

    @classmethod
    def from_centered(cls, a: np.ndarray) -> "Spectrum2D":
        return cls(np.fft.ifftshift(np.asarray(a)))


def forward_transform(F: GridFunction2D) -> Spectrum2D:
    n = F.n
    return Spectrum2D(np.fft.fft2(F.samples) / (n * n))


def inverse_transform(S: Spectrum2D) -> GridFunction2D:
    n = S.n
    return GridFunction2D(np.fft.ifft2(S.coeffs) * (n * n))


def _check_exponent(p: float) -> float:
    p = float(p)
    if not (p > 0):
        raise ValueError(f"exponent must be positive or inf, got {p}")
    return p


def lp_norm(F: Union[GridFunction2D, np.ndarray], p: float) -> float:
    """``(sum |F|^p n^-2)^(1/p)``, or the max modulus for ``p = inf``."""
    p = _check_exponent(p)
    a = np.abs(F.samples if isinstance(F, GridFunction2D) else np.asarray(F))
    if p == math.inf:
        return float(a.max())
    # scaling by the max keeps large exponents from overflowing
    top = float(a.max())
    if top == 0.0:
        return 0.0
    return top * float(np.mean((a / top) ** p)) ** (1.0 / p)


def weak_lp(F: GridFunction2D, p: float) -> float:
    """``sup_t t * |{|F| > t}|^(1/p)``, exact from the sorted moduli.

    For t just below the j-th largest modulus ``a_j`` the level set has at
    least j cells, so the supremum is ``max_j a_j (j / n^2)^(1/p)``.
    """
    p = _check_exponent(p)
    a = np.sort(np.abs(F.samples).ravel())[::-1]
    if p == math.inf:
        return float(a[0])
    j = np.arange(1, a.size + 1)
    return float(np.max(a * (j / a.size) ** (1.0 / p)))


@dataclass(frozen=True)
class MixedNormSpec:
    """``L^p(l^q0(l^q1))``: ``inner_chain[0]`` acts on the outermost family index."""

    outer_exponent: float
    inner_chain: tuple = ()

    def __post_init__(self) -> None:
        _check_exponent(self.outer_exponent)
        chain = tuple(float(q) for q in self.inner_chain)
        if len(chain) > 2:
            raise ValueError("inner chain has at most two sequence norms")
        for q in chain:
            if q not in (2.0, math.inf):
                raise ValueError(f"sequence exponents must be 2 or inf, got {q}")
        object.__setattr__(self, "inner_chain", chain)


def _stack(family) -> np.ndarray:
    if isinstance(family, GridFunction2D):
        return family.samples
    if isinstance(family, np.ndarray):
        return family
    members = [_stack(f) for f in family]
    if not members:
        raise ValueError("empty family")
    shapes = {m.shape for m in members}
    if len(shapes) != 1:
        raise ValueError(f"family members disagree in shape: {sorted(shapes)}")
    return np.stack(members)


def mixed_norm(family: Sequence, spec: MixedNormSpec) -> float:
    """Pointwise sequence norms over the scale indices, then the outer L^p norm.

    ``family`` is a nested sequence of grid functions whose nesting depth
    matches ``len(spec.inner_chain)``; missing leading levels are treated as
    singletons, and an empty chain takes a single-member family.
    """
    if not isinstance(family, GridFunction2D) and len(family) == 0:
        raise ValueError("empty family")
    a = np.abs(_stack(family))
    depth = len(spec.inner_chain)
    while a.ndim - 2 < depth:
        a = a[None]
    while a.ndim - 2 > depth:
        if a.shape[0] != 1:
            raise ValueError("family nesting deeper than the inner chain")
        a = a[0]
    for q in reversed(spec.inner_chain):
        axis = a.ndim - 3
        a = a.max(axis=axis) if q == math.inf else np.sqrt(np.sum(a * a, axis=axis))
    return lp_norm(a, spec.outer_exponent)


def canonical_frequency_index(n: int) -> np.ndarray:
    """Position of each frequency in a size-independent enumeration of Z^2.

    Frequencies are listed box by box: the box ``[-m/2, m/2)^2`` for
    m = 1, 2, 4, ... comes first, then the shell completing the next box,
    each shell in row-major order.  Returned array is in FFT order.
    """
    f = frequencies(n)
    a, b = np.meshgrid(f, f, indexing="ij")
    # smallest power of two m with -m/2 <= v < m/2
    reach = np.maximum(np.where(a < 0, -2 * a, 2 * a + 1), np.where(b < 0, -2 * b, 2 * b + 1))
    shell = np.where(reach <= 1, 1, 2 ** np.ceil(np.log2(np.maximum(reach, 1))).astype(np.int64))
    order = np.lexsort((b.ravel(), a.ravel(), shell.ravel()))
    index = np.empty(n * n, dtype=np.int64)
    index[order] = np.arange(n * n)
    return index.reshape(n, n)


def random_field(seed: int, n: int, decay: float = 0.0, real: bool = False) -> GridFunction2D:
    """Random field with independent complex Gaussian coefficients.

    The coefficient at frequency xi is ``z * (1 + |xi|)^-decay`` with
    ``E|z|^2 = 1``.  Draws come from a Philox stream keyed by ``seed`` and are
    assigned through :func:`canonical_frequency_index`, so a frequency gets the
    same draw for every grid size.  With ``real=True`` the real part of the
    field is returned, which symmetrizes the spectrum.
    """
    if not is_power_of_two(n) or n < 8:
        raise ValueError(f"grid size must be a power of two >= 8, got {n}")
    if decay < 0:
        raise ValueError(f"decay must be nonnegative, got {decay}")
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    z = rng.standard_normal((n * n, 2))
    idx = canonical_frequency_index(n)
    draws = (z[idx, 0] + 1j * z[idx, 1]) / math.sqrt(2.0)
    f = frequencies(n).astype(float)
    radius = np.sqrt(f[:, None] ** 2 + f[None, :] ** 2)
    F = inverse_transform(Spectrum2D(draws * (1.0 + radius) ** (-float(decay))))
    if real:
        return GridFunction2D(F.samples.real)
    return F
