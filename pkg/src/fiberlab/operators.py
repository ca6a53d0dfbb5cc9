"""Bilinear and trilinear fiber-wise multiplier operators.

All operators act on grid functions through their spectra.  A bilinear
operator with symbol ``m`` maps

    (F1, F2) -> sum_{xi, eta} F1^(xi) F2^(eta) m(xi, eta) e(x . (xi + eta))

and the trilinear ones add a third frequency ``tau``.  Each structured
operator factors this sum through 1-D fiber multipliers; the ``*_direct``
functions evaluate the spectral sum literally and serve as oracles on small
grids.

Scale families follow the numbering of the operator formulas: ``fams[0]``
supplies the bumps with index 1, ``fams[1]`` those with index 2, and so on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .bumps import DyadicSymbolFamily
from .grid import GridFunction2D, frequencies, is_power_of_two

DIRECT_BILINEAR_MAX_N = 32
DIRECT_TRILINEAR_MAX_N = 16


# --------------------------------------------------------------------------
# symbols


@dataclass(frozen=True, eq=False)
class Symbol2D:
    """Values on the frequency grid in FFT order, plus an optional continuous evaluator.

    ``func`` maps float arrays ``(zeta1, zeta2)`` to values and is needed only
    where a symbol must be evaluated between grid frequencies (the cone
    decomposition).
    """

    values: np.ndarray
    func: Optional[Callable] = None

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=complex, copy=True)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or not is_power_of_two(v.shape[0]):
            raise ValueError(f"symbol needs a square power-of-two array, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("symbol values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def at(self, z1: int, z2: int) -> complex:
        return complex(self.values[z1 % self.n, z2 % self.n])

    @classmethod
    def from_function(cls, func: Callable, n: int) -> "Symbol2D":
        f = frequencies(n).astype(float)
        return cls(func(f[:, None], f[None, :]) * np.ones((n, n)), func)

    @classmethod
    def constant(cls, n: int, value: complex = 1.0) -> "Symbol2D":
        return cls(np.full((n, n), value, dtype=complex), lambda a, b: value * np.ones(np.broadcast(a, b).shape))


def riesz_symbol(z1, z2):
    """``z1 z2 / |z|^2`` off the origin, 0 at the origin."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    r2 = z1 * z1 + z2 * z2
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(r2 > 0, z1 * z2 / np.where(r2 > 0, r2, 1.0), 0.0)


@dataclass(frozen=True)
class Symbol4D:
    """Procedural ``m(xi1, xi2, eta1, eta2)`` on integer frequencies (broadcasting arrays)."""

    n: int
    evaluate: Callable


@dataclass(frozen=True)
class Symbol6D:
    """Procedural ``m(xi1, xi2, eta1, eta2, tau1, tau2)``."""

    n: int
    evaluate: Callable


def _lookup(table: np.ndarray, *freqs):
    """Index an FFT-ordered table by integer frequencies."""
    n = table.shape[0]
    return table[tuple(np.asarray(f) % n for f in freqs)]


# --------------------------------------------------------------------------
# helpers


def _spectrum(F: GridFunction2D) -> np.ndarray:
    n = F.n
    return np.fft.fft2(F.samples) / (n * n)


def _physical(S: np.ndarray) -> np.ndarray:
    n = S.shape[-1]
    return np.fft.ifft2(S) * (n * n)


def _same_size(*Fs) -> int:
    sizes = {F.n for F in Fs}
    if len(sizes) != 1:
        raise ValueError(f"grid sizes differ: {sorted(sizes)}")
    return sizes.pop()


def _dft_matrix(n: int) -> np.ndarray:
    """``E[x, z] = exp(2 pi i x z / n)`` with z an FFT-order index."""
    k = np.arange(n)
    return np.exp(2j * np.pi * (np.outer(k, k) % n) / n)


def _synthesize(C: np.ndarray) -> GridFunction2D:
    """``x -> sum_z C[z] e(x . z)`` by explicit matrix products."""
    E = _dft_matrix(C.shape[0])
    return GridFunction2D(E @ C @ E.T)


def _check_window(fams: Sequence[DyadicSymbolFamily], n: int) -> Tuple[int, int]:
    windows = {f.window for f in fams}
    if len(windows) != 1:
        raise ValueError(f"families must share one scale window, got {sorted(windows)}")
    for f in fams:
        if f.n != n:
            raise ValueError(f"family size {f.n} does not match grid size {n}")
    return windows.pop()


# --------------------------------------------------------------------------
# direct oracles


def bilinear_direct(F1: GridFunction2D, F2: GridFunction2D, m: Symbol4D) -> GridFunction2D:
    """Literal double spectral sum, O(n^4)."""
    n = _same_size(F1, F2)
    if n > DIRECT_BILINEAR_MAX_N:
        raise ValueError(
            f"direct summation is limited to n <= {DIRECT_BILINEAR_MAX_N}; use a structured operator for n = {n}"
        )
    A = _spectrum(F1)
    B = _spectrum(F2)
    f = frequencies(n)
    xi1, xi2, eta1, eta2 = f[:, None, None, None], f[None, :, None, None], f[None, None, :, None], f[None, None, None, :]
    G = A[:, :, None, None] * B[None, None, :, :] * m.evaluate(xi1, xi2, eta1, eta2)
    k = np.arange(n)
    z1 = (k[:, None, None, None] + k[None, None, :, None]) % n
    z2 = (k[None, :, None, None] + k[None, None, None, :]) % n
    flat = np.broadcast_to(z1 * n + z2, G.shape).ravel()
    C = np.bincount(flat, G.real.ravel(), n * n) + 1j * np.bincount(flat, G.imag.ravel(), n * n)
    return _synthesize(C.reshape(n, n))


def trilinear_direct(F1: GridFunction2D, F2: GridFunction2D, F3: GridFunction2D, m: Symbol6D) -> GridFunction2D:
    """Literal triple spectral sum, O(n^6); loops over the frequency xi2."""
    n = _same_size(F1, F2, F3)
    if n > DIRECT_TRILINEAR_MAX_N:
        raise ValueError(
            f"direct summation is limited to n <= {DIRECT_TRILINEAR_MAX_N}; use the structured path for n = {n}"
        )
    A, B, Cs = _spectrum(F1), _spectrum(F2), _spectrum(F3)
    f = frequencies(n)
    k = np.arange(n)
    # axes: xi1, eta1, eta2, tau1, tau2
    sh = lambda v, ax: v.reshape([n if i == ax else 1 for i in range(5)])
    xi1, eta1, eta2, tau1, tau2 = (sh(f, i) for i in range(5))
    z1 = (sh(k, 0) + sh(k, 1) + sh(k, 3)) % n
    BC = B[None, :, :, None, None] * Cs[None, None, None, :, :]
    C = np.zeros(n * n, dtype=complex)
    for i2 in range(n):
        xi2 = f[i2]
        G = sh(A[:, i2], 0) * BC * m.evaluate(xi1, xi2, eta1, eta2, tau1, tau2)
        z2 = (i2 + sh(k, 2) + sh(k, 4)) % n
        flat = np.broadcast_to(z1 * n + z2, G.shape).ravel()
        C += np.bincount(flat, G.real.ravel(), n * n) + 1j * np.bincount(flat, G.imag.ravel(), n * n)
    return _synthesize(C.reshape(n, n))


# --------------------------------------------------------------------------
# twisted and tensor symbols


def twisted_paraproduct(F1: GridFunction2D, F2: GridFunction2D, m1: Symbol2D, chunk: int = 16) -> GridFunction2D:
    """Symbol ``m1(xi1, eta2)``; O(n^3 log n).

    Writing F1 as a sum over its first-coordinate frequencies,
    ``sum_xi1 (delta_xi1 projection of F1) * (m1(xi1, .) along axis 2 of F2)``.
    """
    n = _same_size(F1, F2)
    if m1.n != n:
        raise ValueError(f"symbol size {m1.n} does not match grid size {n}")
    # F1 split by first-coordinate frequency: rows of the axis-1 spectrum
    A = np.fft.fft(F1.samples, axis=0) / n
    e1 = _dft_matrix(n)  # e1[x1, xi1]
    B = np.fft.fft(F2.samples, axis=1)  # physical in x1, spectral in eta2
    out = np.zeros((n, n), dtype=complex)
    for start in range(0, n, chunk):
        rows = slice(start, min(start + chunk, n))
        G = np.fft.ifft(B[None, :, :] * m1.values[rows, None, :], axis=2)
        pieces = e1[:, rows].T[:, :, None] * A[rows, None, :]
        out += np.einsum("rxy,rxy->xy", pieces, G)
    return GridFunction2D(out)


def tensor_bilinear(F1: GridFunction2D, F2: GridFunction2D, m1: Symbol2D, m2: Symbol2D) -> GridFunction2D:
    """Symbol ``m1(xi1, eta2) m2(xi2, eta1)``.

    For each x2 the sum is a trace
    ``sum_{xi1, eta1} X[xi1, eta1] Y[eta1, xi1] e(x1 (xi1 + eta1))`` with
    ``X = A diag(e(x2 .)) M2`` and ``Y = B diag(e(x2 .)) M1^T``, giving
    O(n^4) work in dense matrix products.
    """
    n = _same_size(F1, F2)
    if m1.n != n or m2.n != n:
        raise ValueError("symbol sizes do not match the grid")
    A = _spectrum(F1)
    B = _spectrum(F2)
    E = _dft_matrix(n)
    out = np.empty((n, n), dtype=complex)
    for x2 in range(n):
        d = E[x2]
        X = (A * d[None, :]) @ m2.values
        Y = (B * d[None, :]) @ m1.values.T
        Z = X * Y.T
        # out(x1) = sum Z[xi1, eta1] e(x1 (xi1 + eta1)) = diagonal of E Z E^T
        out[:, x2] = np.einsum("xi,ix->x", E, Z @ E.T)
    return GridFunction2D(out)


def twisted_symbol(m1: Symbol2D) -> Symbol4D:
    return Symbol4D(m1.n, lambda a1, a2, b1, b2: _lookup(m1.values, a1, b2) * np.ones(np.broadcast(a1, a2, b1, b2).shape))


def tensor_symbol(m1: Symbol2D, m2: Symbol2D) -> Symbol4D:
    return Symbol4D(
        m1.n,
        lambda a1, a2, b1, b2: _lookup(m1.values, a1, b2) * _lookup(m2.values, a2, b1) * np.ones(np.broadcast(a1, a2, b1, b2).shape),
    )


# --------------------------------------------------------------------------
# two-parameter paraproducts


def _projected(S: np.ndarray, sym1: np.ndarray, sym2: np.ndarray) -> np.ndarray:
    return _physical(S * sym1[:, None] * sym2[None, :])


def T1(F1: GridFunction2D, F2: GridFunction2D, fam1: DyadicSymbolFamily, fam2: DyadicSymbolFamily) -> GridFunction2D:
    """``sum_{k <= l} (Q1_{1,k} P2_{2,l} F1)(Q1_{2,l} P2_{1,k} F2)``."""
    n = _same_size(F1, F2)
    k_min, k_max = _check_window([fam1, fam2], n)
    A, B = _spectrum(F1), _spectrum(F2)
    out = np.zeros((n, n), dtype=complex)
    for k in range(k_min, k_max + 1):
        for l in range(k, k_max + 1):
            out += _projected(A, fam1.psi[k], fam2.phi[l]) * _projected(B, fam2.psi[l], fam1.phi[k])
    return GridFunction2D(out)


def T2(F1: GridFunction2D, F2: GridFunction2D, fam1: DyadicSymbolFamily, fam2: DyadicSymbolFamily) -> GridFunction2D:
    """``sum_{k <= l} (P1_{1,k} P2_{2,l} F1)(Q1_{2,l} Q2_{1,k} F2)``."""
    n = _same_size(F1, F2)
    k_min, k_max = _check_window([fam1, fam2], n)
    A, B = _spectrum(F1), _spectrum(F2)
    out = np.zeros((n, n), dtype=complex)
    for k in range(k_min, k_max + 1):
        for l in range(k, k_max + 1):
            out += _projected(A, fam1.phi[k], fam2.phi[l]) * _projected(B, fam2.psi[l], fam1.psi[k])
    return GridFunction2D(out)


def t1_symbol(fam1: DyadicSymbolFamily, fam2: DyadicSymbolFamily) -> Symbol4D:
    def evaluate(a1, a2, b1, b2):
        total = 0.0
        for k in fam1.scales:
            for l in range(k, fam1.k_max + 1):
                total = total + (
                    _lookup(fam1.psi[k], a1) * _lookup(fam2.phi[l], a2) * _lookup(fam2.psi[l], b1) * _lookup(fam1.phi[k], b2)
                )
        return total * np.ones(np.broadcast(a1, a2, b1, b2).shape)

    return Symbol4D(fam1.n, evaluate)


def t2_symbol(fam1: DyadicSymbolFamily, fam2: DyadicSymbolFamily) -> Symbol4D:
    def evaluate(a1, a2, b1, b2):
        total = 0.0
        for k in fam1.scales:
            for l in range(k, fam1.k_max + 1):
                total = total + (
                    _lookup(fam1.phi[k], a1) * _lookup(fam2.phi[l], a2) * _lookup(fam2.psi[l], b1) * _lookup(fam1.psi[k], b2)
                )
        return total * np.ones(np.broadcast(a1, a2, b1, b2).shape)

    return Symbol4D(fam1.n, evaluate)


# --------------------------------------------------------------------------
# one-parameter paraproducts


@dataclass(frozen=True)
class FiberRole:
    """One fiber multiplier inside a slot: ``kind`` P or Q, ``axis`` 1 or 2, ``family`` index into fams."""

    kind: str
    axis: int
    family: int = 0


Roles = Tuple[Tuple[FiberRole, ...], Tuple[FiberRole, ...]]

CASE7_ROLES = {
    1: ((FiberRole("Q", 1, 2), FiberRole("P", 2, 0)), (FiberRole("P", 1, 1),)),
    2: ((FiberRole("P", 1, 0), FiberRole("P", 2, 1)), (FiberRole("Q", 1, 2),)),
    3: ((FiberRole("P", 1, 0), FiberRole("Q", 2, 2)), (FiberRole("P", 1, 1),)),
}
"""Slot roles of the three reduced operators; family 0, 1 carry indices 1, 2 and family 2 the unindexed Q_k."""


def _validate_roles(roles, n_fams: int) -> Roles:
    try:
        slots = tuple(tuple(slot) for slot in roles)
    except TypeError as exc:
        raise ValueError("roles must be a pair of role sequences") from exc
    if len(slots) != 2:
        raise ValueError(f"roles must describe exactly two slots, got {len(slots)}")
    for slot in slots:
        for r in slot:
            if not isinstance(r, FiberRole):
                raise ValueError(f"role entries must be FiberRole, got {r!r}")
            if r.kind not in ("P", "Q") or r.axis not in (1, 2):
                raise ValueError(f"malformed role {r!r}")
            if not 0 <= r.family < n_fams:
                raise ValueError(f"role {r!r} names a family outside 0..{n_fams - 1}")
    return slots


def _slot_symbols(slot, fams, k: int, n: int):
    s1 = np.ones(n)
    s2 = np.ones(n)
    for r in slot:
        values = fams[r.family].samples(r.kind, k)
        if r.axis == 1:
            s1 = s1 * values
        else:
            s2 = s2 * values
    return s1, s2


def _one_param_terms(F1, F2, roles, fams):
    """Yield (k, term_k) in ascending k."""
    n = _same_size(F1, F2)
    fams = list(fams)
    slots = _validate_roles(roles, len(fams))
    k_min, k_max = _check_window(fams, n)
    A, B = _spectrum(F1), _spectrum(F2)
    for k in range(k_min, k_max + 1):
        a1, a2 = _slot_symbols(slots[0], fams, k, n)
        b1, b2 = _slot_symbols(slots[1], fams, k, n)
        yield k, _projected(A, a1, a2) * _projected(B, b1, b2)


def one_param_generic(F1: GridFunction2D, F2: GridFunction2D, roles, fams: Sequence[DyadicSymbolFamily]) -> GridFunction2D:
    """``sum_k (roles[0] multipliers at scale k applied to F1)(roles[1] ... applied to F2)``."""
    out = np.zeros((F1.n, F1.n), dtype=complex)
    for _, term in _one_param_terms(F1, F2, roles, fams):
        out += term
    return GridFunction2D(out)


def one_param_symbol(roles, fams: Sequence[DyadicSymbolFamily]) -> Symbol4D:
    fams = list(fams)
    slots = _validate_roles(roles, len(fams))
    n = fams[0].n

    def evaluate(a1, a2, b1, b2):
        total = 0.0
        for k in fams[0].scales:
            term = 1.0
            for slot, (x1, x2) in zip(slots, ((a1, a2), (b1, b2))):
                for r in slot:
                    term = term * _lookup(fams[r.family].samples(r.kind, k), x1 if r.axis == 1 else x2)
            total = total + term
        return total * np.ones(np.broadcast(a1, a2, b1, b2).shape)

    return Symbol4D(n, evaluate)


def _case7_fams(fams) -> list:
    fams = [fams] if isinstance(fams, DyadicSymbolFamily) else list(fams)
    if len(fams) == 1:
        fams = fams * 3
    if len(fams) != 3:
        raise ValueError("case-7 operators take one family or three (indices 1, 2 and the Q family)")
    return fams


def case7_operator(F1: GridFunction2D, F2: GridFunction2D, variant: int, fams) -> GridFunction2D:
    if variant not in CASE7_ROLES:
        raise ValueError(f"variant must be 1, 2 or 3, got {variant!r}")
    return one_param_generic(F1, F2, CASE7_ROLES[variant], _case7_fams(fams))


def case7_symbol(variant: int, fams) -> Symbol4D:
    if variant not in CASE7_ROLES:
        raise ValueError(f"variant must be 1, 2 or 3, got {variant!r}")
    return one_param_symbol(CASE7_ROLES[variant], _case7_fams(fams))


MAXTWIST_ROLES = ((FiberRole("P", 1, 0),), (FiberRole("Q", 2, 0),))


def max_truncated_twist(F1: GridFunction2D, F2: GridFunction2D, fams, truncations: Sequence[int]):
    """For each N, ``sup_{N' <= N} |sum_{|k| < N'} (P1_{1,k} F1)(Q2_{1,k} F2)|``.

    Scales are the nonnegative grid scales, so ``|k| < N`` keeps the active
    scales below N.
    """
    fams = [fams] if isinstance(fams, DyadicSymbolFamily) else list(fams)
    fam = fams[0]
    truncations = [int(N) for N in truncations]
    for N in truncations:
        if not 0 <= N <= fam.k_max + 1:
            raise ValueError(f"truncation {N} outside [0, {fam.k_max + 1}]")
    n = F1.n
    top = max(truncations, default=0)
    partial = np.zeros((n, n), dtype=complex)
    best = np.zeros((n, n))
    sup_at = {0: best.copy()}
    terms = dict(_one_param_terms(F1, F2, MAXTWIST_ROLES, [fam]))
    for N in range(1, top + 1):
        k = N - 1
        if k in terms:
            partial = partial + terms[k]
        best = np.maximum(best, np.abs(partial))
        sup_at[N] = best.copy()
    return [GridFunction2D(sup_at[N]) for N in truncations]


# --------------------------------------------------------------------------
# trilinear operators


def separable_trilinear(F1, F2, F3, factors1, factors2, factors3) -> GridFunction2D:
    """Tripletwist-type sum with separable symbols.

    ``factors_i = (a_i, b_i)`` with row stacks of 1-D symbols so that
    ``m_i(z1, z2) = sum_r a_i[r, z1] b_i[r, z2]``.  The operator is
    ``sum (a1_r b3_t F1)(a2_s b1_r F2)(a3_t b2_s F3)``, a pointwise trace of
    three matrices of fiber-multiplied fields.
    """
    n = _same_size(F1, F2, F3)
    (a1, b1), (a2, b2), (a3, b3) = (tuple(np.atleast_2d(np.asarray(v)) for v in f) for f in (factors1, factors2, factors3))
    for a, b in ((a1, b1), (a2, b2), (a3, b3)):
        if a.shape[1] != n or b.shape[1] != n:
            raise ValueError(f"factor rows must have length {n}")
    S1, S2, S3 = _spectrum(F1), _spectrum(F2), _spectrum(F3)
    A = _physical(S1[None, None] * a1[:, None, :, None] * b3[None, :, None, :])  # [r, t]
    B = _physical(S2[None, None] * a2[:, None, :, None] * b1[None, :, None, :])  # [s, r]
    C = _physical(S3[None, None] * a3[:, None, :, None] * b2[None, :, None, :])  # [t, s]
    return GridFunction2D(np.einsum("rtxy,srxy,tsxy->xy", A, B, C, optimize=True))


def _stack(fam: DyadicSymbolFamily, kind: str) -> np.ndarray:
    return np.array([fam.samples(kind, k) for k in fam.scales])


def U1(F1, F2, F3, fams: Sequence[DyadicSymbolFamily]) -> GridFunction2D:
    """``sum_{k,l,m} (Q1_{1,k} P2_{4,m} F1)(Q1_{2,l} P2_{5,k} F2)(Q1_{3,m} P2_{6,l} F3)``."""
    f = _six(fams, F1, F2, F3)
    return separable_trilinear(
        F1, F2, F3,
        (_stack(f[0], "Q"), _stack(f[4], "P")),
        (_stack(f[1], "Q"), _stack(f[5], "P")),
        (_stack(f[2], "Q"), _stack(f[3], "P")),
    )


def U2(F1, F2, F3, fams: Sequence[DyadicSymbolFamily]) -> GridFunction2D:
    """``sum_{k,l,m} (P1_{5,k} P2_{4,m} F1)(Q1_{2,l} Q2_{1,k} F2)(Q1_{3,m} P2_{6,l} F3)``."""
    f = _six(fams, F1, F2, F3)
    return separable_trilinear(
        F1, F2, F3,
        (_stack(f[4], "P"), _stack(f[0], "Q")),
        (_stack(f[1], "Q"), _stack(f[5], "P")),
        (_stack(f[2], "Q"), _stack(f[3], "P")),
    )


def _six(fams, *Fs) -> list:
    fams = [fams] if isinstance(fams, DyadicSymbolFamily) else list(fams)
    if len(fams) == 1:
        fams = fams * 6
    if len(fams) != 6:
        raise ValueError(f"U1/U2 take one family or six, got {len(fams)}")
    _check_window(fams, _same_size(*Fs))
    return fams


def _u_symbol(fams, pattern) -> Symbol6D:
    """Triple scale sum of six lookups; ``pattern`` lists (slot variable, family, kind, scale letter)."""
    fams = [fams] if isinstance(fams, DyadicSymbolFamily) else list(fams)
    if len(fams) == 1:
        fams = fams * 6
    scales = fams[0].scales

    def evaluate(x1, x2, y1, y2, t1, t2):
        var = {"x1": x1, "x2": x2, "y1": y1, "y2": y2, "t1": t1, "t2": t2}
        total = 0.0
        for k in scales:
            for l in scales:
                for m in scales:
                    s = {"k": k, "l": l, "m": m}
                    term = 1.0
                    for v, fi, kind, letter in pattern:
                        term = term * _lookup(fams[fi].samples(kind, s[letter]), var[v])
                    total = total + term
        return total * np.ones(np.broadcast(x1, x2, y1, y2, t1, t2).shape)

    return Symbol6D(fams[0].n, evaluate)


def u1_symbol(fams) -> Symbol6D:
    return _u_symbol(fams, [("x1", 0, "Q", "k"), ("x2", 3, "P", "m"), ("y1", 1, "Q", "l"),
                            ("y2", 4, "P", "k"), ("t1", 2, "Q", "m"), ("t2", 5, "P", "l")])


def u2_symbol(fams) -> Symbol6D:
    return _u_symbol(fams, [("x1", 4, "P", "k"), ("x2", 3, "P", "m"), ("y1", 1, "Q", "l"),
                            ("y2", 0, "Q", "k"), ("t1", 2, "Q", "m"), ("t2", 5, "P", "l")])


def tripletwist_symbol(m1: Symbol2D, m2: Symbol2D, m3: Symbol2D) -> Symbol6D:
    def evaluate(x1, x2, y1, y2, t1, t2):
        return _lookup(m1.values, x1, y2) * _lookup(m2.values, y1, t2) * _lookup(m3.values, t1, x2)

    return Symbol6D(m1.n, evaluate)


def tripletwist(F1, F2, F3, m1: Symbol2D, m2: Symbol2D, m3: Symbol2D, path: str = "direct", **cone_options) -> GridFunction2D:
    """Symbol ``m1(xi1, eta2) m2(eta1, tau2) m3(tau1, xi2)``.

    ``path="direct"`` sums the spectral series (n <= 16).  ``path="cone"``
    expands each symbol through the cone decomposition, which turns the
    operator into a sum of modulated U-type paraproducts (see
    :func:`fiberlab.decomp.tripletwist_cone`).
    """
    n = _same_size(F1, F2, F3)
    if any(m.n != n for m in (m1, m2, m3)):
        raise ValueError("symbol sizes do not match the grid")
    if path == "direct":
        if n > DIRECT_TRILINEAR_MAX_N:
            raise ValueError(f"direct tripletwist is limited to n <= {DIRECT_TRILINEAR_MAX_N}; use path='cone'")
        return trilinear_direct(F1, F2, F3, tripletwist_symbol(m1, m2, m3))
    if path == "cone":
        from .decomp import tripletwist_cone

        return tripletwist_cone(F1, F2, F3, m1, m2, m3, **cone_options)
    raise ValueError(f"unknown path {path!r}")
