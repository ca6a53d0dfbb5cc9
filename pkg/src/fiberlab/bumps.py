"""Smooth bumps and the dyadic low-pass / band-pass symbol families built from them.

The mother bump equals 1 on ``[-r0, r0]``, vanishes outside ``[-r1, r1]`` and
in between follows the C-infinity transition

    h(t) = e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)}),   t = (r1 - |x|) / (r1 - r0).

A family samples ``phi_k(xi) = phi(2^-k xi)`` on the grid frequencies and
defines the annular pieces ``psi_k = phi_k - phi_{k-1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from .grid import frequencies, is_power_of_two


def _glue(t: np.ndarray) -> np.ndarray:
    """The transition h on [0, 1]: 0 at t <= 0 and 1 at t >= 1."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / t), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / (1.0 - t)), 0.0)
    return a / (a + b)


def _glue_derivative(t: np.ndarray) -> np.ndarray:
    inside = (t > 0) & (t < 1)
    s = np.where(inside, t, 0.5)
    a = np.exp(-1.0 / s)
    b = np.exp(-1.0 / (1.0 - s))
    d = a * b * (1.0 / s**2 + 1.0 / (1.0 - s) ** 2) / (a + b) ** 2
    return np.where(inside, d, 0.0)


@dataclass(frozen=True)
class BumpProfile:
    """Even C-infinity bump: 1 on ``[-r0, r0]``, 0 outside ``[-r1, r1]``."""

    r0: float = 1.0
    r1: float = 2.0
    smoothness_order: float = math.inf

    def __post_init__(self) -> None:
        if not (0 < self.r0 < self.r1):
            raise ValueError(f"need 0 < r0 < r1, got r0={self.r0}, r1={self.r1}")

    def evaluate(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        return _glue((self.r1 - x) / (self.r1 - self.r0))

    __call__ = evaluate

    def derivative(self, x):
        """Closed-form first derivative."""
        x = np.asarray(x, dtype=float)
        w = self.r1 - self.r0
        return -np.sign(x) * _glue_derivative((self.r1 - np.abs(x)) / w) / w


def make_mother_bump(r0: float = 1.0, r1: float = 2.0) -> BumpProfile:
    return BumpProfile(float(r0), float(r1))


@dataclass(frozen=True, eq=False)
class Symbol1D:
    """Multiplier values at the integer frequencies, stored in FFT order."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, copy=True)
        if v.ndim != 1 or not is_power_of_two(v.shape[0]):
            raise ValueError(f"symbol needs a power-of-two length, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("symbol values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def at(self, xi: int):
        return self.values[xi % self.n]

    @classmethod
    def from_function(cls, func, n: int) -> "Symbol1D":
        return cls(np.asarray(func(frequencies(n).astype(float))))

    def __mul__(self, other: "Symbol1D") -> "Symbol1D":
        return Symbol1D(self.values * other.values)


@dataclass(frozen=True, eq=False)
class DyadicSymbolFamily:
    """Sampled ``phi_k`` for k in [k_min - 1, k_max] and ``psi_k`` for k in [k_min, k_max]."""

    profile: BumpProfile
    n: int
    k_min: int
    k_max: int
    phi: Dict[int, np.ndarray] = field(repr=False)
    psi: Dict[int, np.ndarray] = field(repr=False)

    @property
    def scales(self) -> List[int]:
        return list(range(self.k_min, self.k_max + 1))

    @property
    def window(self) -> tuple:
        return (self.k_min, self.k_max)

    def _check(self, k: int, low: int) -> None:
        if not (low <= k <= self.k_max):
            raise ValueError(f"scale {k} outside [{low}, {self.k_max}]")

    def phi_samples(self, k: int) -> Symbol1D:
        self._check(k, self.k_min - 1)
        return Symbol1D(self.phi[k])

    def psi_samples(self, k: int) -> Symbol1D:
        self._check(k, self.k_min)
        return Symbol1D(self.psi[k])

    def samples(self, kind: str, k: int) -> np.ndarray:
        """Raw value array for ``kind`` in {"P", "Q"}."""
        if kind == "P":
            self._check(k, self.k_min - 1)
            return self.phi[k]
        if kind == "Q":
            self._check(k, self.k_min)
            return self.psi[k]
        raise ValueError(f"kind must be 'P' or 'Q', got {kind!r}")

    def is_telescoping(self) -> bool:
        """True when every psi_k equals phi_k - phi_{k-1} bit for bit."""
        return all(np.array_equal(self.psi[k], self.phi[k] - self.phi[k - 1]) for k in self.scales)


def max_scale(profile: BumpProfile, n: int) -> int:
    """Largest k with ``2^k r1 < n/2``."""
    k = math.floor(math.log2(n / (2 * profile.r1)))
    while 2.0**k * profile.r1 >= n / 2:
        k -= 1
    return k


def make_family(profile: BumpProfile, n: int, k_min: int = 0, k_max: int | None = None) -> DyadicSymbolFamily:
    if not is_power_of_two(n):
        raise ValueError(f"grid size must be a power of two, got {n}")
    top = max_scale(profile, n)
    if k_max is None:
        k_max = top
    if k_min < 0:
        raise ValueError(f"k_min must be >= 0, got {k_min}")
    if k_max > top:
        raise ValueError(
            f"scale {k_max} overflows the grid: need 2^k_max * r1 < n/2, admissible k_max <= {top}"
        )
    if k_max < k_min:
        raise ValueError(f"empty scale window [{k_min}, {k_max}]")
    xi = frequencies(n).astype(float)
    phi = {}
    for k in range(k_min - 1, k_max + 1):
        a = profile.evaluate(xi * 2.0**-k)
        a.setflags(write=False)
        phi[k] = a
    psi = {}
    for k in range(k_min, k_max + 1):
        a = phi[k] - phi[k - 1]
        a.setflags(write=False)
        psi[k] = a
    return DyadicSymbolFamily(profile, n, k_min, k_max, phi, psi)


@dataclass(frozen=True)
class AdaptednessReport:
    """Per-order constants ``c_a = sup|D^a sym| * L^a`` and the verdicts."""

    half_width: float
    support_ok: bool
    constants: tuple
    passed: tuple
    bound: float

    @property
    def constant(self) -> float:
        return max(self.constants)

    @property
    def ok(self) -> bool:
        return self.support_ok and all(self.passed)


def check_adapted(sym: Symbol1D, half_width: float, order: int = 3, bound: float = 10.0) -> AdaptednessReport:
    """Support and finite-difference derivative test against the interval [-L, L].

    The a-th forward difference at unit frequency step stands in for the
    a-th derivative; ``c_a = max|D^a sym| * L^a`` for a = 0..order and the
    symbol passes order a when ``c_a <= bound``.
    """
    if not 0 <= order <= 6:
        raise ValueError(f"order must lie in [0, 6], got {order}")
    v = np.asarray(sym.values, dtype=complex)
    xi = frequencies(sym.n)
    support_ok = bool(np.all(v[np.abs(xi) > half_width] == 0))
    # walk the frequency line in increasing order so differences are local
    line = v[np.argsort(xi, kind="stable")]
    constants = []
    d = line
    for a in range(order + 1):
        if a:
            d = np.roll(d, -1) - d
        constants.append(float(np.max(np.abs(d))) * float(half_width) ** a)
    passed = tuple(c <= bound for c in constants)
    return AdaptednessReport(float(half_width), support_ok, tuple(constants), passed, float(bound))


def vartheta_rho_system(b: float, n: int, k: int):
    """Sampled ``(vartheta_a, rho_a)`` at ``a = k + b``.

    With a bump equal to 1 on ``[-2^-0.6, 2^-0.6]`` and supported in
    ``[-2^-0.4, 2^-0.4]``:

        vartheta_a(xi) = phi(2^{-a-1} xi) - phi(2^{-a} xi)
        rho_a(xi)      = phi(2^{-a-0.6} xi) - phi(2^{-a-0.5} xi)

    so rho_a lives in ``2^{a-0.1} <= |xi| <= 2^{a+0.2}``, where vartheta_a = 1.
    """
    if not -2.0 <= b <= 2.0:
        raise ValueError(f"shift must lie in [-2, 2], got {b}")
    a = k + b
    bump = BumpProfile(2.0**-0.6, 2.0**-0.4)
    if 2.0 ** (a + 0.6) >= n / 2:
        raise ValueError(f"scale {a} overflows the grid of size {n}")
    xi = frequencies(n).astype(float)
    vartheta = bump(2.0 ** (-a - 1) * xi) - bump(2.0**-a * xi)
    rho = bump(2.0 ** (-a - 0.6) * xi) - bump(2.0 ** (-a - 0.5) * xi)
    return Symbol1D(vartheta), Symbol1D(rho)
