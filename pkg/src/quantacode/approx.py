"""Rational approximation constructions.

Three ways to approximate a source by f/t tables:

* :func:`round_min_max` -- for a fixed denominator t, the table minimizing
  the worst per-symbol error delta_star, by sum-constrained largest-remainder
  rounding (with exact repair when some t*p_i < 1 forces f_i = 1).
* :func:`cf_convergents` -- continued-fraction convergents of a single
  probability, the classical best rational approximations for binary sources.
* :func:`record_scan` -- sweep t upward and keep the denominators whose
  delta_star beats everything smaller ("record" denominators).  Their
  normalized quality (t^2 * delta_star for binary sources, t^(1+1/m) *
  delta_star otherwise) is what the Diophantine existence results constrain,
  so the scan doubles as a desk-scale empirical check of those results.

All record and threshold classifications are decided by exact integer
cross-multiplication (never by floating comparisons): with p_i = P_i / d and
A = max_i |t*P_i - f_i*d|, delta_star = A/(d*t), and e.g.
t^(1+1/m)*delta_star < m/(m+1) is equivalent to
t * A**m * (m+1)**m < m**m * d**m.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from . import _kernels
from .errors import DenominatorTooSmall, InstanceTooLarge, WidthTooSmall
from .precision import working_dps
from .prob_model import FrequencyTable, ProbabilityVector

_CHUNK = 4096


def round_min_max(p: ProbabilityVector, t: int) -> FrequencyTable:
    """The table with denominator t minimizing delta_star, deterministically.

    Floors every t*p_i, rounds up the largest fractional parts until the sum
    is t, forces f_i = 1 wherever t*p_i < 1, and if those forced units exceed
    the available round-ups, sheds the excess from floored symbols in the
    order that grows the maximum error least.  The result is optimal for
    every (p, t); whenever a table with all |t*p_i - f_i| < 1 is feasible
    (always true once t*p_min >= 1), the output satisfies delta_star < 1/t.
    """
    if t < p.m:
        raise DenominatorTooSmall(f"t = {t} < m = {p.m}")
    f, _ = _kernels.minmax_freqs_exact(p.numerators, p.common_denominator, t)
    return FrequencyTable.from_freqs(p, f)


def exhaustive_best(p: ProbabilityVector, t: int) -> FrequencyTable:
    """Brute-force oracle: enumerate every composition of t into m positive
    parts and return the delta_star minimizer (ties: lexicographically
    smallest).  Only for m <= 4 and t <= 64."""
    if p.m > 4 or t > 64:
        raise InstanceTooLarge(f"exhaustive search limited to m <= 4, t <= 64; "
                               f"got m = {p.m}, t = {t}")
    if t < p.m:
        raise DenominatorTooSmall(f"t = {t} < m = {p.m}")
    f, _ = _kernels.exhaustive_min(p.numerators, p.common_denominator, t)
    return FrequencyTable.from_freqs(p, f)


# ---- continued fractions ----------------------------------------------------

def continued_fraction_terms(x: Fraction, max_terms: int = 10_000):
    """Continued-fraction coefficients of a rational x (terminating)."""
    num, den = x.numerator, x.denominator
    terms = []
    while den and len(terms) < max_terms:
        a, rem = divmod(num, den)
        terms.append(a)
        num, den = den, rem
    return terms


def cf_convergents(x: Fraction, max_q: int):
    """Convergents (a, q) of x in (0, 1) with q <= max_q, denominators increasing.

    Each returned a/q is the best rational approximation of x among all
    denominators <= q (so |x - a/q| < 1/q**2).  When the expansion starts
    [0; 1, ...] the zeroth convergent 0/1 is superseded by 1/1 and dropped.
    """
    if not 0 < x < 1:
        raise ValueError(f"x must lie in (0, 1), got {x}")
    if max_q < 1:
        raise ValueError(f"max_q must be >= 1, got {max_q}")
    num, den = x.numerator, x.denominator
    h_prev, h = 1, 0  # numerators
    k_prev, k = 0, 1  # denominators
    out = []
    first = True
    while den:
        a, rem = divmod(num, den)
        if not first:
            h_prev, h = h, a * h + h_prev
            k_prev, k = k, a * k + k_prev
        first = False
        if k > max_q:
            break
        if out and out[-1][1] == k:
            out[-1] = (h, k)  # a1 = 1 repeats q = 1; keep the better one
        else:
            out.append((h, k))
        num, den = den, rem
    return out


# ---- record scans -----------------------------------------------------------

@dataclass(frozen=True)
class RecordEntry:
    """A record denominator: strictly smaller delta_star than every smaller t.

    quality is t**2 * delta_star (exact Fraction) for m = 2, else the
    high-precision real t**(1 + 1/m) * delta_star.
    """

    t: int
    freqs: tuple[int, ...]
    delta_star: Fraction
    quality: object

    def beats(self, other: "RecordEntry") -> bool:
        return self.delta_star < other.delta_star


@dataclass(frozen=True)
class ScanResult:
    """Outcome of a record scan up to t_max."""

    records: list
    fact_hits: list        # every scanned t whose quality beats the fact constant
    t_max: int
    m: int
    threshold_label: str

    @property
    def record_ts(self):
        return [r.t for r in self.records]


def _scan_chunk(nums, d, lo, hi):
    a, _ = _kernels.minmax_scan(nums, d, lo, hi)
    return list(int(v) for v in a)


def _quality_value(m: int, t: int, a: int, d: int, dps: int | None):
    if m == 2:
        return Fraction(t * a, d)
    with mp.workdps(working_dps(dps)):
        return mp.mpf(t) ** (mp.mpf(1) / m) * mp.mpf(a) / d


def _beats_threshold(m: int, t: int, a: int, d: int, kappa_square: Fraction) -> bool:
    """Exact test of t-normalized quality against the existence constant."""
    if m == 2:
        v = t * a
        return v * v * kappa_square.denominator < kappa_square.numerator * d * d
    return t * a**m * (m + 1) ** m < m**m * d**m


def _iter_deltastar(p: ProbabilityVector, t_max: int, jobs: int = 1):
    """Yield (t, A) for t in [m, t_max] with delta_star = A/(d*t), in order."""
    nums, d, m = p.numerators, p.common_denominator, p.m
    if jobs > 1 and not _kernels.fits_int64(nums, d, t_max):
        spans = []
        step = max(1, (t_max - m + 1) // jobs + 1)
        lo = m
        while lo <= t_max:
            hi = min(lo + step - 1, t_max)
            spans.append((lo, hi))
            lo = hi + 1
        with concurrent.futures.ProcessPoolExecutor(jobs) as ex:
            futs = [ex.submit(_scan_chunk, nums, d, lo, hi) for lo, hi in spans]
            for (lo, hi), fut in zip(spans, futs):
                for off, a in enumerate(fut.result()):
                    yield lo + off, a
        return
    lo = m
    while lo <= t_max:
        hi = min(lo + _CHUNK - 1, t_max)
        a_arr, _ = _kernels.minmax_scan(nums, d, lo, hi)
        for off in range(hi - lo + 1):
            yield lo + off, int(a_arr[off])
        lo = hi + 1


def record_scan(p: ProbabilityVector, t_max: int, kappa=None, jobs: int = 1,
                dps: int | None = None) -> ScanResult:
    """Scan t in [m, t_max]; collect record denominators and fact-constant hits.

    A record is a t whose delta_star is strictly below every smaller t's.
    Exact representation (delta_star = 0) is the final record: the entry is
    emitted with quality 0 and the scan stops.  `fact_hits` lists every
    scanned t (record or not) whose quality beats m/(m+1) for m > 2, or the
    binary constant kappa (default generic 2**-1.5; pass
    ``bounds.KAPPA_GOLDEN`` for golden-equivalent sources).
    """
    if t_max < p.m:
        raise DenominatorTooSmall(f"t_max = {t_max} < m = {p.m}")
    m, d = p.m, p.common_denominator
    if m == 2:
        kappa_square = kappa.square if kappa is not None else Fraction(1, 8)
        label = kappa.label if kappa is not None else "generic"
    else:
        kappa_square = None
        label = f"{m}/{m + 1}"
    records: list[RecordEntry] = []
    hits: list[int] = []
    best_a, best_t = None, None
    for t, a in _iter_deltastar(p, t_max, jobs=jobs):
        if a and _beats_threshold(m, t, a, d, kappa_square):
            hits.append(t)
        if best_a is None or a * best_t < best_a * t:
            best_a, best_t = a, t
            f, a2 = _kernels.minmax_freqs_exact(p.numerators, d, t)
            assert a2 == a
            records.append(RecordEntry(
                t, tuple(f), Fraction(a, d * t),
                _quality_value(m, t, a, d, dps) if a else Fraction(0),
            ))
            if a == 0:
                break
    return ScanResult(records, hits, t_max, m, label)


def scan_rows(p: ProbabilityVector, t_max: int, kappa=None, jobs: int = 1,
              dps: int | None = None):
    """Per-denominator scan rows for CSV export.

    Yields (t, delta_star, quality, is_record, beats_fact) with exact
    delta_star; quality as in RecordEntry.  Stops after an exact table.
    """
    if t_max < p.m:
        raise DenominatorTooSmall(f"t_max = {t_max} < m = {p.m}")
    m, d = p.m, p.common_denominator
    kappa_square = None
    if m == 2:
        kappa_square = kappa.square if kappa is not None else Fraction(1, 8)
    best_a, best_t = None, None
    for t, a in _iter_deltastar(p, t_max, jobs=jobs):
        beats = bool(a) and _beats_threshold(m, t, a, d, kappa_square)
        is_rec = best_a is None or a * best_t < best_a * t
        if is_rec:
            best_a, best_t = a, t
        quality = _quality_value(m, t, a, d, dps) if a else Fraction(0)
        yield t, Fraction(a, d * t), quality, is_rec, beats
        if a == 0:
            break


# ---- width-constrained search -----------------------------------------------

def best_table_under_width(p: ProbabilityVector, width_bits: int,
                           objective: str = "min_delta",
                           dps: int | None = None) -> FrequencyTable:
    """Best table over all t in [m, 2**width_bits].

    objective "min_delta" minimizes delta_star exactly; "min_divergence"
    minimizes D(p || f/t), prescreened in float64 and decided among the
    near-minimal candidates at the working precision.  Ties go to the
    smallest t either way.
    """
    if objective not in ("min_delta", "min_divergence"):
        raise ValueError(f"unknown objective {objective!r}")
    t_hi = 1 << width_bits
    if t_hi < p.m:
        raise WidthTooSmall(f"2**{width_bits} < m = {p.m}")
    nums, d, m = p.numerators, p.common_denominator, p.m

    if objective == "min_delta":
        best_a, best_t = None, None
        for t, a in _iter_deltastar(p, t_hi):
            if best_a is None or a * best_t < best_a * t:
                best_a, best_t = a, t
                if a == 0:
                    break
        f, _ = _kernels.minmax_freqs_exact(nums, d, best_t)
        return FrequencyTable.from_freqs(p, f)

    pf = np.array([float(x) for x in p.probs])
    log_pf_term = float(np.dot(pf, np.log(pf)))
    candidates = []  # (d_float, t)
    best_float = math.inf
    lo = m
    while lo <= t_hi:
        hi = min(lo + _CHUNK - 1, t_hi)
        a_arr, f_arr = _kernels.minmax_scan(nums, d, lo, hi, want_freqs=True)
        a_np = np.asarray(a_arr)
        if (a_np == 0).any():
            # an exact table has divergence 0, unbeatable; smallest t wins
            t = lo + int(np.flatnonzero(a_np == 0)[0])
            f, _ = _kernels.minmax_freqs_exact(nums, d, t)
            return FrequencyTable.from_freqs(p, f)
        t_range = np.arange(lo, hi + 1, dtype=np.float64)
        fmat = np.asarray(f_arr, dtype=np.float64)
        d_float = log_pf_term + np.log(t_range) - np.log(fmat) @ pf
        best_float = min(best_float, float(d_float.min()))
        band = best_float + max(abs(best_float) * 1e-9, 1e-12)
        keep = np.flatnonzero(d_float <= band)
        candidates.extend((float(d_float[j]), lo + int(j)) for j in keep)
        lo = hi + 1
    band = best_float + max(abs(best_float) * 1e-9, 1e-12)
    candidates = [c for c in candidates if c[0] <= band]
    candidates.sort(key=lambda c: (c[0], c[1]))
    candidates = candidates[:64]
    wdps = working_dps(dps)
    best = None
    with mp.workdps(wdps):
        pm = [mp.mpf(x.numerator) / x.denominator for x in p.probs]
        for _, t in sorted(candidates, key=lambda c: c[1]):
            f, _ = _kernels.minmax_freqs_exact(nums, d, t)
            dv = mp.fsum(pm[i] * mp.log(pm[i] * t / f[i]) for i in range(m))
            if best is None or dv < best[0]:
                best = (dv, t, f)
    _, t, f = best
    return FrequencyTable.from_freqs(p, f)
