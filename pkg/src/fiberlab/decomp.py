"""Constructive decompositions: cone expansion of 2-D symbols, the telescoping
identity and the fiber-wise Calderon-Zygmund decomposition.

Cone decomposition
------------------
With ``phi`` a bump (1 on ``[-r0, r0]``, 0 off ``[-r1, r1]``) and
``psi(u) = phi(u) - phi(2u)``, a symbol is split at each scale k into

    lower:  m(z) phi(2^-k z1) psi(2^-k z2)
    upper:  m(z) psi(2^-k z1) phi(2^-(k-1) z2)

Summed over ``k_min..k_max`` the windows telescope to
``phi_K(z1) phi_K(z2) - phi_{k_min-1}(z1) phi_{k_min-1}(z2)``, which is 1 at
every nonzero integer frequency once ``k_min = 0`` and ``r0 2^K >= n/2``.  In
the rescaled variable ``u = 2^-k z`` each piece lives in a fixed rectangle,
where ``m(2^k u)`` is expanded as ``sum C[n1, n2] e(c (n1 u1 + n2 u2))`` over
``|n1|, |n2| <= M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .bumps import BumpProfile, DyadicSymbolFamily
from .grid import GridFunction2D, frequencies
from .operators import Symbol2D, separable_trilinear

CONES = ("lower", "upper")

DEFAULT_CONE_PROFILE = BumpProfile(1.0, 1.5)


# --------------------------------------------------------------------------
# cone decomposition


@dataclass(frozen=True)
class DecayReport:
    """Fitted power-law decay of ``max |C|`` along each mode index.

    ``exponents`` are the smallest fitted exponents over all pieces;
    ``c_N`` is ``max |C| (1+|n1|)^N (1+|n2|)^N`` for ``N = order``.
    """

    exponents: Tuple[float, float]
    order: int
    c_N: float


@dataclass(frozen=True, eq=False)
class ConeDecomposition:
    """Double Fourier coefficients of the cone pieces of a symbol.

    ``coeffs[(cone, k)]`` is a ``(2M+1, 2M+1)`` array with row ``n1 + M`` and
    column ``n2 + M``; the mode is ``e(phase_constant * (n1 u1 + n2 u2))`` in
    the rescaled variable ``u = 2^-k zeta``.
    """

    symbol: Symbol2D = field(repr=False)
    profile: BumpProfile
    phase_constant: float
    modes: int
    k_min: int
    k_max: int
    coeffs: Dict[Tuple[str, int], np.ndarray] = field(repr=False)
    decay: DecayReport

    @property
    def scales(self) -> List[int]:
        return list(range(self.k_min, self.k_max + 1))

    def mode_indices(self) -> np.ndarray:
        return np.arange(-self.modes, self.modes + 1)

    def to_csv(self) -> str:
        lines = ["cone,k,n1,n2,re,im"]
        idx = self.mode_indices()
        for cone in CONES:
            for k in self.scales:
                C = self.coeffs[(cone, k)]
                for a, n1 in enumerate(idx):
                    for b, n2 in enumerate(idx):
                        z = C[a, b]
                        lines.append(f"{cone},{k},{n1},{n2},{z.real:.17g},{z.imag:.17g}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ResidualReport:
    """Residual of a reconstruction on the covered annulus."""

    max_residual: float
    l2_residual: float
    annulus: Tuple[float, float]
    points: int


def _cone_windows(profile: BumpProfile):
    """Window factors (first coordinate, second coordinate) of each cone in u."""

    def full(u):
        return profile(u)

    def annular(u):
        return profile(u) - profile(2.0 * u)

    def half(u):
        return profile(2.0 * u)

    return {"lower": (full, annular), "upper": (annular, half)}


def _cone_nodes(profile: BumpProfile, count: int):
    """Sample nodes on a rectangle containing each piece's support.

    The upper cone uses the transposed lower rectangle rather than its
    narrower true support: the symbol is smooth there too, and the wider
    fit keeps the extension as well conditioned as the lower one.
    """
    r0, r1 = profile.r0, profile.r1
    side = np.linspace(r0 / 2.0, r1, max(count // 2, 2))
    ring = np.concatenate([-side[::-1], side])
    return {
        "lower": (np.linspace(-r1, r1, count), ring),
        "upper": (ring, np.linspace(-r1, r1, count)),
    }


def _regularized_solver(A: np.ndarray, reg: float, weights: np.ndarray) -> np.ndarray:
    """``(A^H A + reg diag(w))^-1 A^H``: smoothest least-squares extension."""
    AH = A.conj().T
    return np.linalg.solve(AH @ A + reg * np.diag(weights), AH)


def _fit_decay(C: np.ndarray, M: int, axis: int) -> float:
    """Slope of ``log max|C|`` against ``log(1 + |n|)`` along one mode index."""
    prof = np.abs(C).max(axis=1 - axis)
    floor = 1e-15 * max(prof.max(), 1e-300)
    x, y = [], []
    for j in range(1, M + 1):
        v = max(prof[M + j], prof[M - j])
        if v > floor:
            x.append(math.log1p(j))
            y.append(math.log(v))
    if len(x) < 2:
        return math.inf
    return float(-np.polyfit(x, y, 1)[0])


def default_cone_kmax(profile: BumpProfile, n: int) -> int:
    """Smallest K with ``r0 2^K >= n/2``, so the windows sum to 1 on the grid."""
    return max(0, math.ceil(math.log2(n / (2.0 * profile.r0))))


def cone_decompose(
    m: Symbol2D,
    profile: BumpProfile = DEFAULT_CONE_PROFILE,
    modes: int = 16,
    k_min: int = 0,
    k_max: int | None = None,
    oversample: int = 4,
    half_period: float | None = None,
    regularization: float = 1e-13,
    smoothness: float = 2.0,
) -> ConeDecomposition:
    """Cone pieces of ``m`` and their truncated double Fourier coefficients.

    The coefficients are a regularized least-squares fit of ``m(2^k u)`` on
    ``oversample * (2M+1)`` nodes per axis across each piece's support, with
    the penalty ``(1 + |n|)^(2 smoothness)``; this selects the smoothest
    periodic extension, which is what makes the coefficients decay.  The
    period is ``2 * half_period`` (default ``4/3 r1``).
    """
    if m.func is None:
        raise ValueError("cone decomposition needs a symbol with a continuous evaluator (Symbol2D.func)")
    modes = int(modes)
    if modes < 0:
        raise ValueError(f"mode cutoff must be >= 0, got {modes}")
    if oversample < 1:
        raise ValueError(f"oversample must be >= 1, got {oversample}")
    if k_max is None:
        k_max = default_cone_kmax(profile, m.n)
    if k_min < 0 or k_max < k_min:
        raise ValueError(f"bad scale window [{k_min}, {k_max}]")
    T = 4.0 * profile.r1 / 3.0 if half_period is None else float(half_period)
    if T <= profile.r1:
        raise ValueError(f"half period {T} must exceed r1 = {profile.r1}")
    idx = np.arange(-modes, modes + 1)
    weights = (1.0 + np.abs(idx)) ** (2.0 * smoothness)
    count = oversample * (2 * modes + 1)
    nodes = _cone_nodes(profile, count)
    coeffs = {}
    exps = [math.inf, math.inf]
    c_N = 0.0
    for cone in CONES:
        x1, x2 = nodes[cone]
        P1 = _regularized_solver(np.exp(1j * np.pi * np.outer(x1, idx) / T), regularization, weights)
        P2 = _regularized_solver(np.exp(1j * np.pi * np.outer(x2, idx) / T), regularization, weights)
        for k in range(k_min, k_max + 1):
            s = 2.0**k
            H = np.asarray(m.func(s * x1[:, None], s * x2[None, :]), dtype=complex) * np.ones((x1.size, x2.size))
            C = P1 @ H @ P2.T
            C.setflags(write=False)
            coeffs[(cone, k)] = C
            for ax in (0, 1):
                exps[ax] = min(exps[ax], _fit_decay(C, modes, ax))
            w = (1.0 + np.abs(idx)) ** 2
            c_N = max(c_N, float(np.max(np.abs(C) * w[:, None] * w[None, :])))
    return ConeDecomposition(
        m, profile, 1.0 / (2.0 * T), modes, k_min, k_max, coeffs, DecayReport((exps[0], exps[1]), 2, c_N)
    )


def _piece_values(dec: ConeDecomposition, cone: str, k: int, f: np.ndarray) -> np.ndarray:
    """One reconstructed piece on the frequency line ``f`` (both axes)."""
    u = f * 2.0**-k
    E = np.exp(2j * np.pi * dec.phase_constant * np.outer(u, dec.mode_indices()))
    w1, w2 = _cone_windows(dec.profile)[cone]
    return (E @ dec.coeffs[(cone, k)] @ E.T) * w1(u)[:, None] * w2(u)[None, :]


def cone_factors(dec: ConeDecomposition, n: int):
    """Separable form ``sum_r a[r, z1] b[r, z2]`` of the reconstruction on an n-grid.

    Each piece contributes ``2M+1`` rows: the modulated first-coordinate
    window times the coefficient-weighted second-coordinate modes.  The
    origin is left out (it belongs to no cone).
    """
    f = frequencies(n).astype(float)
    rows_a, rows_b = [], []
    for cone in CONES:
        w1, w2 = _cone_windows(dec.profile)[cone]
        for k in dec.scales:
            u = f * 2.0**-k
            E = np.exp(2j * np.pi * dec.phase_constant * np.outer(u, dec.mode_indices()))
            rows_a.append((E * w1(u)[:, None]).T)
            rows_b.append(dec.coeffs[(cone, k)] @ (E * w2(u)[:, None]).T)
    return np.concatenate(rows_a), np.concatenate(rows_b)


def cone_reconstruct(dec: ConeDecomposition, n: int, dc: str = "annihilate"):
    """Reassemble the symbol on the n-grid and measure the annulus residual.

    ``dc="annihilate"`` sets the origin to 0; ``dc="keep"`` copies the
    original value there.  Residuals compare against the original symbol on
    ``r1 2^k_min <= |zeta| <= r0 2^k_max``.
    """
    if dc not in ("annihilate", "keep"):
        raise ValueError(f"dc must be 'annihilate' or 'keep', got {dc!r}")
    f = frequencies(n).astype(float)
    R = np.zeros((n, n), dtype=complex)
    for cone in CONES:
        for k in dec.scales:
            R += _piece_values(dec, cone, k, f)
    exact = np.asarray(dec.symbol.func(f[:, None], f[None, :]), dtype=complex) * np.ones((n, n))
    R[0, 0] = exact[0, 0] if dc == "keep" else 0.0
    lo = dec.profile.r1 * 2.0**dec.k_min
    hi = dec.profile.r0 * 2.0**dec.k_max
    radius = np.hypot(f[:, None], f[None, :])
    mask = (radius >= lo) & (radius <= hi)
    diff = np.abs(R - exact)[mask]
    report = ResidualReport(
        float(diff.max()) if diff.size else 0.0,
        float(np.sqrt(np.mean(diff**2))) if diff.size else 0.0,
        (lo, hi),
        int(diff.size),
    )
    return Symbol2D(R, dec.symbol.func), report


def _compress(a: np.ndarray, b: np.ndarray, rtol: float):
    """Shorter separable form of ``a^T b`` via QR of both sides and an SVD."""
    Qa, Ra = np.linalg.qr(a.T)
    Qb, Rb = np.linalg.qr(b.T)
    U, s, Vh = np.linalg.svd(Ra @ Rb.T)
    if s.size == 0 or s[0] == 0:
        return a[:0], b[:0]
    keep = int(np.sum(s > rtol * s[0]))
    return (Qa @ (U[:, :keep] * s[:keep])).T, (Qb @ Vh[:keep].T).T


def tripletwist_cone(
    F1, F2, F3, m1: Symbol2D, m2: Symbol2D, m3: Symbol2D, modes: int = 16, rank_rtol: float | None = 1e-13, **options
) -> GridFunction2D:
    """Tripletwist through the cone expansion of each symbol.

    Every symbol becomes a sum of modulated window products (plus its value
    at the origin), so the operator is a separable trilinear sum.  Work grows
    with the square of the separation rank, so by default the factors are
    compressed to the numerical rank of the reconstructed symbol.
    """
    n = F1.n
    factors = []
    for m in (m1, m2, m3):
        a, b = cone_factors(cone_decompose(m, modes=modes, **options), n)
        delta = np.zeros((1, n))
        delta[0, 0] = 1.0
        a = np.concatenate([a, delta * m.values[0, 0]])
        b = np.concatenate([b, delta.astype(complex)])
        if rank_rtol is not None:
            a, b = _compress(a, b, rank_rtol)
        factors.append((a, b))
    return separable_trilinear(F1, F2, F3, *factors)


# --------------------------------------------------------------------------
# telescoping identity


def _fiber_apply(v: np.ndarray, sym: np.ndarray) -> np.ndarray:
    return np.fft.ifft(np.fft.fft(v) * sym)


def telescoping_check(f, g, famP: DyadicSymbolFamily, famQ: DyadicSymbolFamily, k0: int, k1: int) -> float:
    """Max modulus of

        sum_{k=k0}^{k1} (P_k f Q_k g + Q_k f P_{k-1} g) - (P_k1 f P_k1 g - P_{k0-1} f P_{k0-1} g)

    for 1-D samples ``f`` and ``g``.  ``famQ`` must hold ``psi_k =
    phi_k - phi_{k-1}`` of ``famP`` exactly.
    """
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    n = famP.n
    if f.shape != (n,) or g.shape != (n,):
        raise ValueError(f"f and g must be length-{n} vectors")
    if famQ.n != n:
        raise ValueError("families have different grid sizes")
    if not (max(famP.k_min, famQ.k_min) <= k0 <= k1 <= min(famP.k_max, famQ.k_max)):
        raise ValueError(f"window [{k0}, {k1}] outside the families' scales")
    for k in range(k0, k1 + 1):
        if not np.array_equal(famQ.psi[k], famP.phi[k] - famP.phi[k - 1]):
            raise ValueError(f"psi_{k} is not phi_{k} - phi_{k-1} of the P family")
    P = lambda v, k: _fiber_apply(v, famP.phi[k])
    Q = lambda v, k: _fiber_apply(v, famQ.psi[k])
    total = np.zeros(n, dtype=complex)
    for k in range(k0, k1 + 1):
        total += P(f, k) * Q(g, k) + Q(f, k) * P(g, k - 1)
    boundary = P(f, k1) * P(g, k1) - P(f, k0 - 1) * P(g, k0 - 1)
    return float(np.max(np.abs(total - boundary)))


# --------------------------------------------------------------------------
# fiber-wise Calderon-Zygmund decomposition


@dataclass(eq=False)
class FiberCZ:
    """Decomposition of the fiber ``F(., x2)``; intervals are (offset, length) in cells."""

    x2: int
    intervals: List[Tuple[int, int]]
    atoms: List[np.ndarray]
    good: np.ndarray


@dataclass(eq=False)
class CZDecomposition:
    level: float
    p2: float
    p3prime: float
    n: int
    fibers: List[FiberCZ]

    @property
    def threshold(self) -> float:
        """Height ``lambda^(p3'/p2)`` at which averages of ``|F|^p2`` are stopped."""
        return self.level ** (self.p3prime / self.p2)

    def intervals_per_fiber(self) -> List[List[Tuple[int, int]]]:
        return [fib.intervals for fib in self.fibers]

    def report(self) -> str:
        p = self.p2
        lines = [f"level {self.level:.17g} p2 {self.p2:.17g} p3prime {self.p3prime:.17g} n {self.n}"]
        for fib in self.fibers:
            norms = [float(np.sum(np.abs(a) ** p) / self.n) ** (1.0 / p) for a in fib.atoms]
            covered = sum(L for _, L in fib.intervals) / self.n
            lines.append(
                f"fiber {fib.x2}: intervals {fib.intervals} atom_norms "
                f"[{', '.join(f'{v:.6g}' for v in norms)}] covered {covered:.6g} "
                f"good_sup {np.max(np.abs(fib.good)):.6g}"
            )
        return "\n".join(lines) + "\n"


def _select_intervals(power: np.ndarray, cut: float) -> List[Tuple[int, int]]:
    """Maximal dyadic intervals whose average of ``power`` exceeds ``cut``, top-down."""
    n = power.size
    csum = np.concatenate([[0.0], np.cumsum(power)])
    chosen = []
    covered = np.zeros(n, dtype=bool)
    L = n
    while L >= 1:
        for start in range(0, n, L):
            if covered[start]:
                continue
            if (csum[start + L] - csum[start]) / L > cut:
                chosen.append((start, L))
                covered[start : start + L] = True
        L //= 2
    return sorted(chosen)


def fiberwise_cz(F: GridFunction2D, level: float, p2: float, p3prime: float) -> CZDecomposition:
    """Decompose each fiber ``F(., x2)`` at height ``level^(p3'/p2)``.

    Selected intervals are the maximal dyadic ones where the mean of
    ``|F|^p2`` exceeds ``level^p3'``; the atom on each is ``F`` minus its mean
    there, recentred once, and the good part is ``F`` minus the atoms, which
    is the interval mean up to rounding.  Fibers are handled
    independently and assembled in order.
    """
    if not level > 0:
        raise ValueError(f"level must be positive, got {level}")
    if not 1 < p2 < math.inf:
        raise ValueError(f"p2 must lie in (1, inf), got {p2}")
    if not p3prime > 0:
        raise ValueError(f"p3prime must be positive, got {p3prime}")
    n = F.n
    cut = level**p3prime
    fibers = []
    for x2 in range(n):
        col = F.samples[:, x2]
        intervals = _select_intervals(np.abs(col) ** p2, cut)
        good = col.copy()
        atoms = []
        for start, L in intervals:
            piece = col[start : start + L]
            mean = piece.mean()
            atom = piece - mean
            # rounding in the mean scales with |F|, not with the atom; one
            # recentring pass brings the atom's own mean to its rounding level
            atom = atom - atom.mean()
            atoms.append(atom)
            good[start : start + L] = piece - atom
        fibers.append(FiberCZ(x2, intervals, atoms, good))
    return CZDecomposition(float(level), float(p2), float(p3prime), n, fibers)


@dataclass
class CZReport:
    passed: bool
    checks: Dict[str, bool]
    constants: Dict[str, float]
    diagnostics: List[str]


def cz_verify(dec: CZDecomposition, F: GridFunction2D, ulps: float = 4.0) -> CZReport:
    """Check every structural property and bound of a decomposition of ``F``.

    Reconstruction is compared to ``ulps`` units in the last place of the
    summands at each cell, since ``mean + (F - mean)`` need not round back
    to ``F``.
    """
    n, p = dec.n, dec.p2
    t = dec.threshold
    eps = np.finfo(float).eps
    names = ("reconstruction", "disjoint", "dyadic", "mean_zero", "atom_bound", "covering", "good_lp", "good_linf")
    checks = {k: True for k in names}
    diag: List[str] = []
    atom_const = 0.0
    good_const = 0.0

    def fail(name: str, msg: str) -> None:
        checks[name] = False
        diag.append(f"{name}: {msg}")

    if F.n != n or len(dec.fibers) != n:
        fail("reconstruction", f"decomposition size {n} does not match input {F.n}")
        return CZReport(False, checks, {}, diag)
    for fib in dec.fibers:
        col = F.samples[:, fib.x2]
        x2 = fib.x2
        if len(fib.atoms) != len(fib.intervals):
            fail("reconstruction", f"fiber {x2}: {len(fib.atoms)} atoms for {len(fib.intervals)} intervals")
            continue
        rebuilt = fib.good.copy()
        scale = np.abs(fib.good) + np.abs(col)
        mask = np.zeros(n, dtype=bool)
        for i, ((start, L), atom) in enumerate(zip(fib.intervals, fib.atoms)):
            tag = f"fiber {x2}, interval {i} [{start}, {start + L})"
            if L < 1 or L & (L - 1) or start % L or start < 0 or start + L > n:
                fail("dyadic", f"{tag} is not a dyadic interval")
                continue
            if mask[start : start + L].any():
                fail("disjoint", f"{tag} overlaps an earlier interval")
            mask[start : start + L] = True
            rebuilt[start : start + L] = rebuilt[start : start + L] + atom
            scale[start : start + L] += np.abs(atom)
            amax = float(np.max(np.abs(atom)))
            mean = abs(atom.mean())
            if mean > 1e-12 * amax * (L / n) and mean > 0:
                fail("mean_zero", f"{tag}: atom mean {mean:.3e}")
            norm = float(np.sum(np.abs(atom) ** p) / n) ** (1.0 / p)
            ratio = norm / (t * (L / n) ** (1.0 / p))
            atom_const = max(atom_const, ratio)
            if ratio > 2.0 ** (1.0 + 1.0 / p) * (1 + 1e-12):
                fail("atom_bound", f"{tag}: atom norm ratio {ratio:.6g}")
        tol = ulps * eps * scale
        if np.any(np.abs(rebuilt - col) > tol):
            j = int(np.argmax(np.abs(rebuilt - col) - tol))
            fail("reconstruction", f"fiber {x2}, cell {j}: off by {abs(rebuilt[j] - col[j]):.3e}")
        fiber_norm_p = float(np.mean(np.abs(col) ** p))
        covered = sum(L for _, L in fib.intervals) / n
        if covered > fiber_norm_p / dec.level**dec.p3prime * (1 + 1e-12):
            fail("covering", f"fiber {x2}: covered {covered:.6g} exceeds {fiber_norm_p / dec.level ** dec.p3prime:.6g}")
        if float(np.mean(np.abs(fib.good) ** p)) > fiber_norm_p * (1 + 1e-12):
            fail("good_lp", f"fiber {x2}: good part norm exceeds the fiber norm")
        gsup = float(np.max(np.abs(fib.good)))
        good_const = max(good_const, gsup / t)
        if gsup > 2.0 ** (1.0 / p) * t * (1 + 1e-12):
            fail("good_linf", f"fiber {x2}: sup {gsup:.6g} exceeds 2^(1/p2) * {t:.6g}")
    constants = {"atom_bound": atom_const, "good_linf": good_const}
    return CZReport(all(checks.values()), checks, constants, diag)


# --------------------------------------------------------------------------
# Marcinkiewicz function


def marcinkiewicz_function(intervals_per_fiber: Sequence[Sequence[Tuple[int, int]]], n: int) -> GridFunction2D:
    """``H(x) = sum_i (1 + d(x1, c_i) / |I_i|)^-2`` over the intervals of fiber x2.

    Points are cell centres and ``d`` is the periodic distance on the unit
    circle; intervals are (offset, length) in cells.
    """
    if len(intervals_per_fiber) != n:
        raise ValueError(f"need one interval list per fiber ({n}), got {len(intervals_per_fiber)}")
    x = (np.arange(n) + 0.5) / n
    H = np.zeros((n, n))
    for x2, intervals in enumerate(intervals_per_fiber):
        for start, L in intervals:
            c = (start + L / 2.0) / n
            d = np.abs(x - c)
            d = np.minimum(d, 1.0 - d)
            H[:, x2] += (1.0 + d / (L / n)) ** -2
    return GridFunction2D(H)


def marcinkiewicz_constant(H: GridFunction2D, intervals_per_fiber, p2: float) -> float:
    """Largest ``||H(., x2)||_p2 / (sum_i |I_i|)^(1/p2)`` over fibers with intervals."""
    n = H.n
    worst = 0.0
    for x2, intervals in enumerate(intervals_per_fiber):
        total = sum(L for _, L in intervals) / n
        if total == 0:
            continue
        norm = float(np.mean(np.abs(H.samples[:, x2]) ** p2)) ** (1.0 / p2)
        worst = max(worst, norm / total ** (1.0 / p2))
    return worst
