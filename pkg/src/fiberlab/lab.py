"""Experiments: exponent-range classification, empirical norm-ratio sweeps,
refinement studies and the lambda-scaling counterexample reduction."""

from __future__ import annotations

import configparser
import math
import os
import statistics
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import operators as ops
from .bumps import BumpProfile, make_family
from .grid import lp_norm, random_field

BOUNDARY_TOL = 1e-9


# --------------------------------------------------------------------------
# exponents and known ranges


@dataclass(frozen=True)
class ExponentTuple:
    """Input exponents ``p_i`` (two or three) and the Hoelder output exponent.

    ``output`` is ``p3'`` (bilinear) or ``p4'`` (trilinear) with
    ``1/output = sum 1/p_i``; ``dual`` is its conjugate ``p3`` or ``p4``, so
    all reciprocals sum to 1.  Inputs may be any positive number or inf, so
    probes outside the stated ranges stay representable.
    """

    inputs: Tuple[float, ...]

    def __post_init__(self) -> None:
        p = tuple(float(v) for v in self.inputs)
        if len(p) not in (2, 3):
            raise ValueError(f"need two or three input exponents, got {len(p)}")
        for v in p:
            if not v > 0:
                raise ValueError(f"exponents must be positive or inf, got {v}")
        if all(v == math.inf for v in p):
            raise ValueError("at least one input exponent must be finite")
        object.__setattr__(self, "inputs", p)

    @classmethod
    def of(cls, *p: float) -> "ExponentTuple":
        return cls(tuple(p))

    @classmethod
    def symmetric(cls, output: float, arity: int = 2) -> "ExponentTuple":
        """Equal inputs ``p = arity * output``."""
        return cls((arity * float(output),) * arity)

    @property
    def arity(self) -> int:
        return len(self.inputs)

    @property
    def reciprocals(self) -> Tuple[float, ...]:
        return tuple(1.0 / v for v in self.inputs)

    @property
    def output(self) -> float:
        return 1.0 / sum(self.reciprocals)

    @property
    def dual(self) -> float:
        """Conjugate of the output exponent; nonpositive reciprocals map to inf or below 0."""
        a = 1.0 - sum(self.reciprocals)
        return math.inf if a == 0 else 1.0 / a

    @property
    def p1(self) -> float:
        return self.inputs[0]

    @property
    def p2(self) -> float:
        return self.inputs[1]

    @property
    def p3(self) -> Optional[float]:
        """Third input exponent of a trilinear tuple, None for bilinear ones."""
        return self.inputs[2] if self.arity == 3 else None

    def holder_defect(self) -> float:
        """``|sum 1/p_i + 1/dual - 1|``, zero up to rounding by construction."""
        return abs(sum(self.reciprocals) + 1.0 / self.dual - 1.0)


# A condition is (label, value function of reciprocals, lower, upper, lower_closed, upper_closed).
# Value functions take (a1, a2[, a3]) and the output reciprocal a_out.
Condition = Tuple[str, Callable, float, float, bool, bool]


def _input_cond(i: int, allow_inf: bool) -> Condition:
    return (f"1 < p{i + 1} {'<=' if allow_inf else '<'} inf", lambda a, out: a[i], 0.0, 1.0, allow_inf, False)


def _bilinear_row(inf_ok: bool, lo: float, hi: float) -> List[Condition]:
    """``1 < p1, p2 (<=) inf`` and ``lo < p3' < hi`` in reciprocal form."""
    conds = [_input_cond(0, inf_ok), _input_cond(1, inf_ok)]
    conds.append((f"{lo} < p3' < {hi}", lambda a, out: out, 1.0 / hi, 1.0 / lo, False, False))
    return conds


RANGES: Dict[str, List[Condition]] = {
    "1": _bilinear_row(True, 0.5, math.inf),
    "2": _bilinear_row(False, 0.5, math.inf),
    "3": _bilinear_row(False, 0.5, 2.0),
    "4": _bilinear_row(False, 0.5, math.inf),
    "5": _bilinear_row(True, 0.5, math.inf),
    "6": _bilinear_row(False, 1.0, 2.0),
    "7": _bilinear_row(False, 0.5, math.inf),
    "8": _bilinear_row(True, 0.5, math.inf),
    "T1": _bilinear_row(False, 1.0, 2.0),
    "T2": _bilinear_row(False, 1.0, 2.0),
    "tripletwist": [
        _input_cond(0, False),
        _input_cond(1, False),
        _input_cond(2, False),
        ("2 < p4 < inf", lambda a, out: 1.0 - out, 0.0, 0.5, False, False),
        ("1/p1 + 1/p2 > 1/2", lambda a, out: a[0] + a[1], 0.5, math.inf, False, False),
        ("1/p2 + 1/p3 > 1/2", lambda a, out: a[1] + a[2], 0.5, math.inf, False, False),
        ("1/p1 + 1/p3 > 1/2", lambda a, out: a[0] + a[2], 0.5, math.inf, False, False),
    ],
}

TRILINEAR_CASES = ("tripletwist",)


def _case_key(case_id) -> str:
    key = str(case_id).strip()
    if key.lower().startswith("case"):
        key = key[4:]
    if key not in RANGES:
        raise ValueError(f"unknown case {case_id!r}; known: {', '.join(RANGES)}")
    return key


def known_range(case_id, e: ExponentTuple) -> str:
    """``"inside"``, ``"outside"`` or ``"boundary"`` for the stated range of a case.

    Every condition is checked in reciprocal coordinates; a value within
    1e-9 of an excluded endpoint is a boundary point, provided no other
    condition fails outright.
    """
    key = _case_key(case_id)
    want = 3 if key in TRILINEAR_CASES else 2
    if e.arity != want:
        raise ValueError(f"case {key} takes {want} input exponents, got {e.arity}")
    a = e.reciprocals
    out = sum(a)
    verdict = "inside"
    for _, f, lo, hi, lo_closed, hi_closed in RANGES[key]:
        v = f(a, out)
        for end, closed, sign in ((lo, lo_closed, 1), (hi, hi_closed, -1)):
            if math.isinf(end):
                continue
            gap = sign * (v - end)
            if abs(gap) <= BOUNDARY_TOL:
                if not closed:
                    verdict = "boundary"
            elif gap < 0:
                return "outside"
    return verdict


# --------------------------------------------------------------------------
# operator registry


def _multi_symbol(name: str) -> Callable:
    """Continuous symbol of any number of variables."""
    if name == "one":
        return lambda *z: np.ones(np.broadcast(*z).shape)
    if name == "riesz":

        def f(*z):
            z = [np.asarray(v, dtype=float) for v in z]
            r2 = sum(v * v for v in z)
            with np.errstate(invalid="ignore", divide="ignore"):
                return np.where(r2 > 0, z[0] * z[1] / np.where(r2 > 0, r2, 1.0), 0.0)

        return f
    raise ValueError(f"unknown symbol {name!r}; known: one, riesz")


def _symbol2d(name: str, n: int) -> ops.Symbol2D:
    if name == "one":
        return ops.Symbol2D.constant(n, 1.0)
    return ops.Symbol2D.from_function(_multi_symbol(name), n)


# variable order (xi1, xi2, eta1, eta2); each case lists the factor arguments
_CASE_FACTORS = {
    "1": ((0, 2),),
    "2": ((0, 1),),
    "3": ((0, 3),),
    "4": ((0, 1), (2, 3)),
    "5": ((0, 2), (1, 3)),
    "6": ((0, 3), (1, 2)),
    "7": ((0, 1, 2),),
    "8": ((0, 1, 2, 3),),
}


def case_symbol(case_id, name: str, n: int) -> ops.Symbol4D:
    """Assembled symbol of bilinear case 1-8 with every factor equal to ``name``."""
    key = _case_key(case_id)
    if key not in _CASE_FACTORS:
        raise ValueError(f"case {case_id!r} is not one of the bilinear cases 1-8")
    g = _multi_symbol(name)
    factors = _CASE_FACTORS[key]

    def evaluate(*v):
        out = np.ones(np.broadcast(*v).shape)
        for args in factors:
            out = out * g(*(np.asarray(v[i], dtype=float) for i in args))
        return out

    return ops.Symbol4D(n, evaluate)


@dataclass(frozen=True)
class OpSpec:
    """An operator id from :data:`OPERATORS`, its symbol and scale window.

    ``k_max=None`` takes the largest admissible scale for the grid.
    """

    operator: str
    symbol: str = "riesz"
    k_min: int = 0
    k_max: Optional[int] = None


@dataclass(frozen=True)
class _OpEntry:
    arity: int
    case: str
    uses_window: bool
    build: Callable  # (spec, n, families) -> callable on the input fields


def _fams(spec: OpSpec, n: int, count: int = 1):
    fam = make_family(BumpProfile(), n, spec.k_min, spec.k_max)
    return [fam] * count


def _direct_case(case: str):
    return lambda spec, n, fams: (lambda F1, F2: ops.bilinear_direct(F1, F2, case_symbol(case, spec.symbol, n)))


OPERATORS: Dict[str, _OpEntry] = {
    "twisted": _OpEntry(2, "3", False, lambda s, n, f: (lambda F1, F2: ops.twisted_paraproduct(F1, F2, _symbol2d(s.symbol, n)))),
    "tensor": _OpEntry(
        2, "6", False, lambda s, n, f: (lambda F1, F2: ops.tensor_bilinear(F1, F2, _symbol2d(s.symbol, n), _symbol2d(s.symbol, n)))
    ),
    "T1": _OpEntry(2, "T1", True, lambda s, n, f: (lambda F1, F2: ops.T1(F1, F2, f[0], f[0]))),
    "T2": _OpEntry(2, "T2", True, lambda s, n, f: (lambda F1, F2: ops.T2(F1, F2, f[0], f[0]))),
    "case7_1": _OpEntry(2, "7", True, lambda s, n, f: (lambda F1, F2: ops.case7_operator(F1, F2, 1, f[0]))),
    "case7_2": _OpEntry(2, "7", True, lambda s, n, f: (lambda F1, F2: ops.case7_operator(F1, F2, 2, f[0]))),
    "case7_3": _OpEntry(2, "7", True, lambda s, n, f: (lambda F1, F2: ops.case7_operator(F1, F2, 3, f[0]))),
    "U1": _OpEntry(3, "tripletwist", True, lambda s, n, f: (lambda F1, F2, F3: ops.U1(F1, F2, F3, f[0]))),
    "U2": _OpEntry(3, "tripletwist", True, lambda s, n, f: (lambda F1, F2, F3: ops.U2(F1, F2, F3, f[0]))),
    "tripletwist": _OpEntry(
        3,
        "tripletwist",
        False,
        lambda s, n, f: (
            lambda F1, F2, F3: ops.tripletwist(
                F1, F2, F3, *([_symbol2d(s.symbol, n)] * 3), path="direct" if n <= ops.DIRECT_TRILINEAR_MAX_N else "cone"
            )
        ),
    ),
}
for _c in ("1", "2", "4", "5", "7", "8"):
    OPERATORS[f"case{_c}"] = _OpEntry(2, _c, False, lambda s, n, f, _c=_c: _direct_case(_c)(s, n, f))


def resolve(spec: OpSpec, n: int):
    """``(entry, window, operator callable)`` for a grid of size n."""
    if spec.operator not in OPERATORS:
        raise ValueError(f"unknown operator {spec.operator!r}; known: {', '.join(sorted(OPERATORS))}")
    entry = OPERATORS[spec.operator]
    fams = None
    window = (None, None)
    if entry.uses_window:
        fams = _fams(spec, n)
        window = fams[0].window
    return entry, window, entry.build(spec, n, fams)


# --------------------------------------------------------------------------
# trials and sweeps


@dataclass(frozen=True)
class TrialRecord:
    operator: str
    case: str
    exponents: ExponentTuple
    n: int
    seed: int
    decay: float
    ratio: float
    in_range: str
    k_min: Optional[int]
    k_max: Optional[int]
    note: str = ""

    def key(self) -> tuple:
        p = self.exponents.inputs + (math.nan,) * (3 - self.exponents.arity)
        return (self.operator, self.case, *p, self.n, self.seed, self.decay,
                -1 if self.k_min is None else self.k_min, -1 if self.k_max is None else self.k_max)

    def csv_row(self) -> str:
        e = self.exponents
        if e.arity == 2:
            p3, p4 = _fmt(e.output), ""
        else:
            p3, p4 = _fmt(e.inputs[2]), _fmt(e.output)
        cols = [self.operator, self.case, _fmt(e.inputs[0]), _fmt(e.inputs[1]), p3, p4, str(self.n), str(self.seed),
                _fmt(self.decay), _opt(self.k_min), _opt(self.k_max), _fmt(self.ratio), self.in_range]
        return ",".join(cols)


CSV_HEADER = "operator,case,p1,p2,p3,p4,n,seed,decay,kmin,kmax,ratio,in_range"


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _opt(v) -> str:
    return "" if v is None else str(v)


def _sub_seed(seed: int, slot: int, attempt: int) -> int:
    return int(np.random.SeedSequence([int(seed), slot, attempt]).generate_state(1, dtype=np.uint64)[0])


def _classify(case: str, e: ExponentTuple) -> str:
    try:
        return known_range(case, e)
    except ValueError:
        return "n/a"


def norm_ratio_trial(spec: OpSpec, e: ExponentTuple, seed: int, n: int, decay: float = 0.0, max_attempts: int = 8) -> TrialRecord:
    """``||T(F...)||_out / prod ||F_i||_{p_i}`` on random fields.

    Field i comes from :func:`random_field` keyed by a sub-seed derived from
    ``(seed, i, attempt)``; a field with zero norm is redrawn with the next
    attempt, which the record notes.
    """
    entry, window, op = resolve(spec, n)
    if e.arity != entry.arity:
        raise ValueError(f"operator {spec.operator} takes {entry.arity} exponents, got {e.arity}")
    fields, notes = [], []
    for slot, p in enumerate(e.inputs):
        for attempt in range(max_attempts):
            F = random_field(_sub_seed(seed, slot, attempt), n, decay)
            if lp_norm(F, p) > 0:
                break
            notes.append(f"slot {slot} redrawn")
        else:
            raise ValueError(f"could not draw a nonzero field for slot {slot}")
        fields.append(F)
    num = lp_norm(op(*fields), e.output)
    den = math.prod(lp_norm(F, p) for F, p in zip(fields, e.inputs))
    return TrialRecord(spec.operator, entry.case, e, n, int(seed), float(decay), num / den, _classify(entry.case, e),
                       window[0], window[1], "; ".join(notes))


@dataclass
class SweepConfig:
    """Cartesian sweep: operators x exponents x n x decay x seeds."""

    operators: List[str]
    exponents: List[ExponentTuple]
    n_values: List[int]
    seeds: List[int]
    decays: List[float] = field(default_factory=lambda: [0.0])
    symbol: str = "riesz"
    k_min: int = 0
    k_max: Optional[int] = None
    threads: int = 1

    def trials(self) -> List[tuple]:
        out = []
        for name in self.operators:
            if name not in OPERATORS:
                raise ValueError(f"unknown operator {name!r}")
            arity = OPERATORS[name].arity
            spec = OpSpec(name, self.symbol, self.k_min, self.k_max)
            for e in self.exponents:
                if e.arity != arity:
                    continue
                for n in self.n_values:
                    for d in self.decays:
                        for s in self.seeds:
                            out.append((spec, e, s, n, d))
        return out


def _floats(text: str) -> List[float]:
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


def _ints(text: str) -> List[int]:
    """Comma list of nonnegative integers and ``a-b`` ranges."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def parse_sweep_config(text: str) -> SweepConfig:
    """Read the flat ``key = value`` sweep grammar (see README).

    Keys: operators, exponents (``p1:p2[:p3]`` tuples, comma separated),
    p3prime (symmetric bilinear tuples p1 = p2 = 2 p3'), n, seeds (a count
    ``N`` meaning 0..N-1, or ``a-b`` ranges and lists under ``seed_list``),
    decay, symbol, kmin, kmax, threads.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.read_string("[sweep]\n" + text)
    s = cp["sweep"]
    known = {"operators", "exponents", "p3prime", "n", "seeds", "seed_list", "decay", "symbol", "kmin", "kmax", "threads"}
    extra = set(s) - known
    if extra:
        raise ValueError(f"unknown config keys: {', '.join(sorted(extra))}")
    exps = []
    for tup in s.get("exponents", "").split(","):
        if tup.strip():
            exps.append(ExponentTuple(tuple(float(v) for v in tup.split(":"))))
    for q in _floats(s.get("p3prime", "")):
        exps.append(ExponentTuple.symmetric(q, 2))
    if "seed_list" in s:
        seeds = _ints(s["seed_list"])
    else:
        seeds = list(range(int(s.get("seeds", "1"))))
    kmax = s.get("kmax", "").strip()
    return SweepConfig(
        operators=[v.strip() for v in s.get("operators", "").split(",") if v.strip()],
        exponents=exps,
        n_values=_ints(s.get("n", "")),
        seeds=seeds,
        decays=_floats(s.get("decay", "0")) or [0.0],
        symbol=s.get("symbol", "riesz").strip(),
        k_min=int(s.get("kmin", "0")),
        k_max=int(kmax) if kmax else None,
        threads=int(s.get("threads", "1")),
    )


def _check_writable(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path)) or "."
    if not os.path.isdir(parent):
        raise ValueError(f"output directory {parent} does not exist")
    if os.path.exists(path) and not os.access(path, os.W_OK) or not os.access(parent, os.W_OK):
        raise ValueError(f"output path {path} is not writable")


def records_to_csv(records: Sequence[TrialRecord]) -> str:
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in records]) + "\n"


def sweep(config: SweepConfig, out: Optional[str] = None, threads: Optional[int] = None):
    """Run every trial, in parallel, and return the records sorted by key with their CSV."""
    if out is not None:
        _check_writable(out)
    tasks = config.trials()
    workers = max(1, threads if threads is not None else config.threads)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        records = list(pool.map(lambda t: norm_ratio_trial(*t), tasks))
    records.sort(key=TrialRecord.key)
    text = records_to_csv(records)
    if out is not None:
        with open(out, "w") as fh:
            fh.write(text)
    return records, text


# --------------------------------------------------------------------------
# refinement study


@dataclass
class RefinementReport:
    operator: str
    exponents: ExponentTuple
    tag: str
    n_values: List[int]
    max_ratio: List[float]
    median_ratio: List[float]
    growth: List[float]
    alarm_threshold: float
    alarms: List[int]

    @property
    def total_growth(self) -> float:
        return self.max_ratio[-1] / self.max_ratio[0]

    def summary(self) -> str:
        lines = [f"{self.operator} p={self.exponents.inputs} out={self.exponents.output:.6g} range={self.tag}"]
        for i, n in enumerate(self.n_values):
            g = "" if i == 0 else f" growth {self.growth[i - 1]:.6g}"
            lines.append(f"  n={n}: max {self.max_ratio[i]:.6g} median {self.median_ratio[i]:.6g}{g}")
        if self.alarms:
            lines.append(f"  ALARM: growth above {self.alarm_threshold} after n = {self.alarms}")
        return "\n".join(lines)


def refinement_study(spec: OpSpec, e: ExponentTuple, n_values: Sequence[int], seeds: Sequence[int],
                     decay: float = 1.5, alarm: float = 2.0, threads: int = 1) -> RefinementReport:
    """Max and median ratio per n, growth between consecutive n.

    Alarms (an engineering diagnostic for implementation bugs) are raised
    only for exponents inside the known range.  Fields default to decay 1.5
    so that they converge as the grid is refined.
    """
    n_values = [int(n) for n in n_values]
    if any(not (n > 0 and n & (n - 1) == 0) for n in n_values) or n_values != sorted(n_values):
        raise ValueError("n values must be ascending powers of two")
    tag = _classify(OPERATORS[spec.operator].case, e) if spec.operator in OPERATORS else "n/a"
    mx, med = [], []
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for n in n_values:
            ratios = list(pool.map(lambda s: norm_ratio_trial(spec, e, s, n, decay).ratio, seeds))
            mx.append(max(ratios))
            med.append(statistics.median(ratios))
    growth = [b / a for a, b in zip(mx, mx[1:])]
    alarms = [n_values[i + 1] for i, g in enumerate(growth) if tag == "inside" and g > alarm]
    return RefinementReport(spec.operator, e, tag, n_values, mx, med, growth, alarm, alarms)


# --------------------------------------------------------------------------
# counterexample reduction


def fejer_profile(xi, power: int = 4):
    """The triangle ``(1 - |x|)_+`` convolved with itself ``power`` times.

    This is the centred cardinal B-spline of order ``2 power`` on
    ``[-power, power]``: nonnegative, ``C^(2 power - 2)``, and the Fourier
    transform of the Fejer-type kernel ``sinc^(2 power)``.  The default
    power 4 keeps kinks out of the quadrature error down to ``h^8``.
    """
    x = np.asarray(xi, dtype=float)
    k = 2 * power
    out = np.zeros_like(x)
    for j in range(k + 1):
        out += (-1) ** j * math.comb(k, j) * np.maximum(x + k / 2.0 - j, 0.0) ** (k - 1)
    return np.where(np.abs(x) < k / 2.0, np.maximum(out, 0.0) / math.factorial(k - 1), 0.0)


def fejer_physical(x, power: int = 4):
    """Inverse Fourier transform of :func:`fejer_profile`: ``sinc(x)^(2 power)``."""
    return np.sinc(np.asarray(x, dtype=float)) ** (2 * power)


def benign_m0(eps: float = 0.25) -> Callable:
    """``(xi1 - eta1) / sqrt(xi1^2 + eta1^2 + eps^2)``."""
    return lambda a, b: (a - b) / np.sqrt(a * a + b * b + eps * eps)


def cone_cutoff(aperture: float = 0.25) -> Callable:
    """Smooth ``m~(z1, z2) = phi(z2 / (aperture z1))``: 1 on the cone
    ``|z2| <= aperture |z1|``, 0 outside twice that, 1 at the origin and 0 on
    the rest of the ``z1 = 0`` axis."""
    bump = BumpProfile(1.0, 2.0)

    def f(z1, z2):
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(z1 != 0, z2 / (aperture * np.where(z1 != 0, z1, 1.0)), np.where(z2 == 0, 0.0, np.inf))
        return bump(t)

    return f


def unit_cutoff(z1, z2):
    return np.ones(np.broadcast(np.asarray(z1), np.asarray(z2)).shape)


@dataclass(frozen=True)
class ReducedSymbol:
    """``m(xi, eta) = m0(xi1, eta1) m~(xi1, eta2) m~(eta1, xi2)``.

    Callable as a four-variable evaluator; the product structure lets the
    counterexample form integrate the second coordinates by matrix products.
    """

    m0: Callable
    m_tilde: Callable

    def __call__(self, xi1, xi2, eta1, eta2):
        return self.m0(xi1, eta1) * self.m_tilde(xi1, eta2) * self.m_tilde(eta1, xi2)


_SHIFTS = (1.0, -0.5)
_ORDER = 4


def _peak(c: float) -> float:
    # x^4 exp(-(x - c)^2 / 2) peaks where x^2 - c x - 4 = 0
    r = np.array([(c + math.sqrt(c * c + 16.0)) / 2.0, (c - math.sqrt(c * c + 16.0)) / 2.0])
    return float(np.max(r**_ORDER * np.exp(-0.5 * (r - c) ** 2)))


def default_spectra():
    """Three 1-D spectra with unit peak, the first two vanishing to fourth
    order at 0 so the cone cutoff's singular line is integrated accurately."""
    c1, c2 = _SHIFTS
    n1, n2 = _peak(c1), _peak(c2)
    f1 = lambda x: x**_ORDER * np.exp(-0.5 * (x - c1) ** 2) / n1
    f2 = lambda x: x**_ORDER * np.exp(-0.5 * (x - c2) ** 2) / n2
    f3 = lambda x: np.exp(-(x * x) / 8.0)
    return f1, f2, f3


@dataclass(frozen=True)
class FormValue:
    value: complex
    warning: str = ""


def counterexample_form(f1, f2, f3, phi_hat, m, lam: float, box: float = 16.0, step: float = 0.125) -> FormValue:
    """Quadrature of

        int f1(x1) phi(x2) f2(y1) phi(y2) f3(x1 + y1) phi(x2 + y2) m(x1, x2/lam, y1, y2/lam)

    over the box ``[-box, box]^4`` on a tensor grid of spacing ``step``.
    ``lam = inf`` substitutes ``m(x1, 0, y1, 0)``.  A :class:`ReducedSymbol`
    is integrated in O(N^3); any other evaluator costs O(N^4).
    """
    if not lam >= 1:
        raise ValueError(f"lambda must be >= 1, got {lam}")
    warning = ""
    if step > box / 8.0:
        warning = f"quadrature step {step} exceeds box/8 = {box / 8.0}; result may be under-resolved"
        warnings.warn(warning)
    count = int(round(box / step))
    t = np.arange(-count, count + 1) * step
    w = step
    A1, A2 = f1(t), f2(t)
    S3 = f3(t[:, None] + t[None, :])  # f3(x1 + y1)
    ph = phi_hat(t)
    B = ph[:, None] * ph[None, :] * phi_hat(t[:, None] + t[None, :])  # [x2, y2]
    scale = 0.0 if lam == math.inf else 1.0 / lam
    if isinstance(m, ReducedSymbol):
        M_eta = m.m_tilde(t[:, None], scale * t[None, :])  # [x1, y2]
        M_xi = m.m_tilde(t[:, None], scale * t[None, :])  # [y1, x2]
        J = M_eta @ B.T @ M_xi.T  # J[x1, y1] = sum m~(x1, y2) B[x2, y2] m~(y1, x2)
        outer = A1[:, None] * A2[None, :] * S3 * m.m0(t[:, None], t[None, :])
        total = np.sum(outer * J) * w**4
    else:
        total = 0.0
        x2, y1, y2 = t[:, None, None], t[None, :, None], t[None, None, :]
        for i, x1 in enumerate(t):
            if A1[i] == 0:
                continue
            vals = m(x1, scale * x2, y1, scale * y2)
            total += A1[i] * np.sum(A2[None, :, None] * S3[i][None, :, None] * B[:, None, :] * vals)
        total *= w**4
    return FormValue(complex(total), warning)


def lambda_scaled_field(f: Callable, phi: Callable, p: float, lam: float, x1: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Samples of ``f(x1) lam^(-1/p) phi(x2 / lam)`` on the grid ``x2 = lam * u``."""
    return f(x1)[:, None] * lam ** (-1.0 / p) * phi(u)[None, :]


@dataclass
class CounterexampleReport:
    lambdas: List[float]
    values: List[complex]
    limit: complex
    discrepancies: List[float]
    monotone: bool
    rate: float
    norm_errors: List[float]
    warnings: List[str]

    def text(self) -> str:
        lines = [f"limit value (lambda = inf): {self.limit.real:.17g} {self.limit.imag:+.17g}i"]
        for lam, v, d in zip(self.lambdas, self.values, self.discrepancies):
            lines.append(f"lambda {lam:g}: value {v.real:.17g} {v.imag:+.17g}i discrepancy {d:.6e}")
        lines.append(f"strictly decreasing: {self.monotone}")
        lines.append(f"fitted decay rate: {self.rate:.6g}")
        lines.append(f"norm factorization errors: {', '.join(f'{v:.3e}' for v in self.norm_errors)}")
        lines.extend(f"warning: {w}" for w in self.warnings)
        return "\n".join(lines) + "\n"


def parse_counterexample_config(text: str) -> dict:
    """Keys: m0 (benign; anything else, e.g. unbounded, is rejected), mtilde (cone | one), aperture,
    eps, lambdas, box, step, exponents (p1:p2:p3)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.read_string("[counterexample]\n" + text)
    s = cp["counterexample"]
    return {
        "m0": s.get("m0", "benign").strip(),
        "mtilde": s.get("mtilde", "cone").strip(),
        "aperture": float(s.get("aperture", "0.25")),
        "eps": float(s.get("eps", "0.25")),
        "lambdas": _floats(s.get("lambdas", "4, 16, 64")),
        "box": float(s.get("box", "16")),
        "step": float(s.get("step", "0.125")),
        "exponents": tuple(float(v) for v in s.get("exponents", "3:3:3").split(":")),
    }


def counterexample_experiment(config: Optional[dict] = None) -> CounterexampleReport:
    """Run the lambda sweep of the reduction and check the norm factorization."""
    cfg = parse_counterexample_config("")
    cfg.update(config or {})
    if cfg["m0"].lower() not in ("benign",):
        raise ValueError(
            f"m0 = {cfg['m0']!r} is not available: the unbounded symbol of the reduction is known only to exist, "
            "so only the benign smooth m0 can be run"
        )
    if cfg["mtilde"] == "cone":
        mt = cone_cutoff(cfg["aperture"])
    elif cfg["mtilde"] == "one":
        mt = unit_cutoff
    else:
        raise ValueError(f"unknown mtilde {cfg['mtilde']!r}; use cone or one")
    m = ReducedSymbol(benign_m0(cfg["eps"]), mt)
    f1, f2, f3 = default_spectra()
    lams = [float(v) for v in cfg["lambdas"]]
    warn = []
    limit = counterexample_form(f1, f2, f3, fejer_profile, m, math.inf, cfg["box"], cfg["step"])
    vals = []
    for lam in lams:
        r = counterexample_form(f1, f2, f3, fejer_profile, m, lam, cfg["box"], cfg["step"])
        vals.append(r.value)
        if r.warning:
            warn.append(r.warning)
    disc = [abs(v - limit.value) for v in vals]
    monotone = all(b < a for a, b in zip(disc, disc[1:]))
    pos = [(math.log(l), math.log(d)) for l, d in zip(lams, disc) if d > 0]
    rate = float(-np.polyfit(*zip(*pos), 1)[0]) if len(pos) >= 2 else math.nan
    norm_errors = _norm_factorization(cfg["exponents"], lams)
    return CounterexampleReport(lams, vals, limit.value, disc, monotone, rate, norm_errors, warn)


def _physical_spectra():
    """Inverse transforms of :func:`default_spectra` in closed form.

    With ``mu = c + 2 pi i x`` the transform of ``x^4 exp(-(x - c)^2 / 2)`` is
    ``sqrt(2 pi) exp(2 pi i c x - 2 pi^2 x^2) (mu^4 + 6 mu^2 + 3)``.
    """

    def shifted(c):
        scale = _peak(c)

        def f(x):
            x = np.asarray(x, dtype=float)
            mu = c + 2j * np.pi * x
            g = math.sqrt(2 * math.pi) * np.exp(-2 * math.pi**2 * x * x + 2j * math.pi * c * x)
            return g * (mu**4 + 6 * mu**2 + 3) / scale

        return f

    f3 = lambda x: math.sqrt(8 * math.pi) * np.exp(-8 * math.pi**2 * np.asarray(x, dtype=float) ** 2)
    return shifted(_SHIFTS[0]), shifted(_SHIFTS[1]), f3


def _norm_factorization(exponents, lams, width: float = 3.0, count: int = 512) -> List[float]:
    """``| ||F_i||_p - ||f_i||_p ||phi||_p |`` for each field and lambda.

    The 2-D norm is a Riemann sum on the grid ``x1 in [-width, width]``,
    ``x2 = lam * u`` with ``u in [-64, 64]``; the 1-D norms use the same x1 and
    u grids.
    """
    x1 = np.linspace(-width, width, count, endpoint=False)
    u = np.linspace(-64.0, 64.0, 8 * count, endpoint=False)
    h1, hu = x1[1] - x1[0], u[1] - u[0]
    errs = []
    for f, p in zip(_physical_spectra(), exponents):
        nf = (np.sum(np.abs(f(x1)) ** p) * h1) ** (1.0 / p)
        nphi = (np.sum(np.abs(fejer_physical(u)) ** p) * hu) ** (1.0 / p)
        for lam in lams:
            F = lambda_scaled_field(f, fejer_physical, p, lam, x1, u)
            nF = (np.sum(np.abs(F) ** p) * h1 * (lam * hu)) ** (1.0 / p)
            errs.append(abs(nF - nf * nphi))
    return errs
