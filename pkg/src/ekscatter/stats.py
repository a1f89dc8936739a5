"""Desk-scale experiments on omega(n_q), A(x) and the exceptional set E(x).

Scans run over ``q = 1 .. x`` in fixed-size ranges. Ranges can be farmed
out to worker processes; results always come back in q order, so every
count and every emitted byte is independent of the worker count.
"""

from __future__ import annotations

import math
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import InvalidArgument, InvariantViolation
from .sieve import FactorTable, _base_primes, multiplicative_columns

CHUNK_SIZE = 1 << 20
MIN_EK_CUTOFF = 16
DEFAULT_PRIME_LIMIT = 10**6


@dataclass(frozen=True, slots=True)
class ArithmeticRecord:
    q: int
    phi: int
    s: int
    n: int
    omega_n: int
    omega_phi: int


class ScanChunk(NamedTuple):
    """Column-wise block of consecutive arithmetic records."""

    q: np.ndarray
    phi: np.ndarray
    s: np.ndarray
    n: np.ndarray
    omega_n: np.ndarray
    omega_phi: np.ndarray

    def records(self) -> Iterator[ArithmeticRecord]:
        for row in zip(*(c.tolist() for c in self)):
            yield ArithmeticRecord(*row)


# ---------------------------------------------------------------- scanning

def _compute_range(t: FactorTable, lo: int, hi: int) -> ScanChunk:
    q = np.arange(lo, hi, dtype=np.int64)
    cols = multiplicative_columns(t, q)
    phi, s = cols.phi, cols.s
    total = phi + s
    if (total & 1).any():
        bad = int(q[np.flatnonzero(total & 1)[0]])
        raise InvariantViolation(f"phi(q) + s_q odd at q={bad}")
    if (s > phi).any():
        bad = int(q[np.flatnonzero(s > phi)[0]])
        raise InvariantViolation(f"s_q > phi(q) at q={bad}")
    n = total >> 1
    omega_n = multiplicative_columns(t, n, omega_only=True).omega.astype(np.int8)
    omega_phi = multiplicative_columns(t, phi, omega_only=True).omega.astype(np.int8)
    # when s_q = 0, n_q = phi(q)/2 and the omegas differ by at most one
    gap = np.abs(omega_n.astype(np.int16) - omega_phi)
    if ((gap > 1) & (s == 0)).any():
        bad = int(q[np.flatnonzero((gap > 1) & (s == 0))[0]])
        raise InvariantViolation(f"exceptional q={bad} has s_q = 0")
    return ScanChunk(q, phi, s, n, omega_n, omega_phi)


_worker_table: FactorTable | None = None


def _init_worker(table):
    global _worker_table
    _worker_table = table


def _worker_range(bounds):
    return _compute_range(_worker_table, *bounds)


def _ranges(x: int, chunk_size: int):
    return [(lo, min(lo + chunk_size, x + 1)) for lo in range(1, x + 1, chunk_size)]


def default_workers() -> int:
    return os.cpu_count() or 1


def scan_columns(t: FactorTable, x: int, *, workers: int = 1,
                 chunk_size: int | None = None) -> Iterator[ScanChunk]:
    """Yield :class:`ScanChunk` blocks covering ``q = 1 .. x`` in order.

    Parity of ``phi + s``, ``s <= phi`` and the containment of E(x) in
    ``{s_q != 0}`` are asserted on every block.
    """
    x = t.check(x, "x")
    workers = int(workers)
    if workers < 1:
        raise InvalidArgument(f"workers must be >= 1, got {workers}")
    ranges = _ranges(x, int(chunk_size or CHUNK_SIZE))
    if workers == 1 or len(ranges) == 1:
        for lo, hi in ranges:
            yield _compute_range(t, lo, hi)
        return
    method = "fork" if "fork" in multiprocessing.get_all_start_methods() else "spawn"
    with ProcessPoolExecutor(max_workers=workers, mp_context=multiprocessing.get_context(method),
                             initializer=_init_worker, initargs=(t,)) as ex:
        yield from ex.map(_worker_range, ranges)


def scan(t: FactorTable, x: int, *, workers: int = 1) -> Iterator[ArithmeticRecord]:
    """Stream one :class:`ArithmeticRecord` per ``q = 1 .. x``."""
    for chunk in scan_columns(t, x, workers=workers):
        yield from chunk.records()


# ---------------------------------------------------------------- counting

def count_A(t: FactorTable, x: int, *, chunk_size: int = CHUNK_SIZE) -> int:
    """A(x): number of ``q <= x`` with ``s_q != 0``."""
    x = t.check(x, "x")
    total = 0
    for lo, hi in _ranges(x, chunk_size):
        s = multiplicative_columns(t, np.arange(lo, hi)).s
        total += int(np.count_nonzero(s))
    return total


def _in_O(t: FactorTable, values: np.ndarray) -> np.ndarray:
    # every prime factor is 1 mod 4; 1 qualifies vacuously
    rem = np.asarray(values, dtype=np.int64).copy()
    ok = np.ones(rem.size, dtype=bool)
    idx = np.flatnonzero(rem > 1)
    while idx.size:
        r = rem[idx]
        p = t.spf[r].astype(np.int64)
        ok[idx] &= (p % 4) == 1
        r //= p
        sub = np.flatnonzero(r % p == 0)
        while sub.size:
            r[sub] //= p[sub]
            sub = sub[r[sub] % p[sub] == 0]
        rem[idx] = r
        idx = idx[(r > 1) & ok[idx]]
    return ok


def count_A_via_O(t: FactorTable, x: int, *, chunk_size: int = CHUNK_SIZE) -> int:
    """Count ``q <= x`` with ``q`` or ``q/2`` in O, the integers built from primes 1 mod 4."""
    x = t.check(x, "x")
    total = 0
    for lo, hi in _ranges(x, chunk_size):
        q = np.arange(lo, hi, dtype=np.int64)
        hit = _in_O(t, q)
        even = q[q % 2 == 0]
        hit[q % 2 == 0] |= _in_O(t, even // 2)
        total += int(np.count_nonzero(hit))
    return total


def count_E(t: FactorTable, x: int, *, workers: int = 1) -> int:
    """|E(x)|: number of ``q <= x`` with ``|omega(n_q) - omega(phi(q))| > 1``."""
    total = 0
    for c in scan_columns(t, x, workers=workers):
        total += int(np.count_nonzero(np.abs(c.omega_n.astype(np.int16) - c.omega_phi) > 1))
    return total


# ---------------------------------------------------------------- alpha

@dataclass(frozen=True)
class AlphaEstimate:
    """Truncated Euler product for the constant in ``A(x) ~ alpha x / sqrt(log x)``.

    The true constant lies in ``[value, value * (1 + tail_bound)]``.
    """

    value: float
    prime_limit: int
    tail_bound: float

    @property
    def upper(self) -> float:
        return self.value * (1.0 + self.tail_bound)


def _alpha_tail_bound(prime_limit: int) -> float:
    # Omitted factors are p > P with p = 1 (mod 4); bound over all such n:
    #   sum_{n >= n0, n = 1 (4)} n^-2 <= 1 / (4 (n0 - 4))
    #   -log(1 - u) <= u / (1 - u),  u <= n0^-2
    # so log(alpha / value) <= S / (2 (1 - n0^-2)), about 1/(8P) < 1/(2P).
    n0 = prime_limit + 1 + (1 - (prime_limit + 1)) % 4
    s = 1.0 / (4.0 * (n0 - 4))
    return math.expm1(0.5 * s / (1.0 - 1.0 / (n0 * n0)))


def alpha_constant(prime_limit: int = DEFAULT_PRIME_LIMIT) -> AlphaEstimate:
    """``(3 / 2pi) * prod_{p <= P, p = 1 (4)} (1 - p^-2)^(-1/2)`` with its tail bound."""
    prime_limit = int(prime_limit)
    if prime_limit < 5:
        raise InvalidArgument(f"prime_limit must be >= 5, got {prime_limit}")
    p = _base_primes(prime_limit)
    p = p[p % 4 == 1].astype(np.float64)
    log_prod = -0.5 * math.fsum(np.log1p(-1.0 / (p * p)).tolist())
    value = 3.0 / (2.0 * math.pi) * math.exp(log_prod)
    return AlphaEstimate(value, prime_limit, _alpha_tail_bound(prime_limit))


def asymptotic_ratio(a_x: int, x: int, alpha: float) -> float:
    """``A(x) / (alpha x / sqrt(log x))``; tends to 1 only like 1/sqrt(log x)."""
    return a_x * math.sqrt(math.log(x)) / (alpha * x)


# ---------------------------------------------------------------- Erdos-Kac

@dataclass(frozen=True)
class EKNormalization:
    """Centering ``f = (ln ln x)^2 / 2`` and scale ``g = (ln ln x)^1.5 / sqrt(3)`` at cutoff x."""

    x: float
    f: float
    g: float

    @classmethod
    def at(cls, x: float) -> "EKNormalization":
        if not x >= MIN_EK_CUTOFF:
            raise InvalidArgument(f"cutoff x must be >= {MIN_EK_CUTOFF}, got {x}")
        ll = math.log(math.log(x))
        return cls(float(x), 0.5 * ll * ll, ll**1.5 / math.sqrt(3.0))


def normalize(omega_value, norm: EKNormalization):
    """``(omega_value - f) / g``; works elementwise on arrays."""
    return (omega_value - norm.f) / norm.g


@dataclass(frozen=True)
class EKSample:
    q: int
    value: float


class EKSamples:
    """Normalized statistic for every ``q = 1 .. x``, stored column-wise.

    The statistic takes one value per distinct omega, so distributional
    summaries work on ``(distinct value, multiplicity)`` pairs.
    """

    def __init__(self, omega: np.ndarray, norm: EKNormalization, which: str = "omega_n"):
        self.omega = np.asarray(omega)
        self.norm = norm
        self.which = which

    def __len__(self):
        return self.omega.size

    def __getitem__(self, i) -> EKSample:
        i = range(len(self))[i]
        return EKSample(i + 1, float(normalize(int(self.omega[i]), self.norm)))

    def __iter__(self) -> Iterator[EKSample]:
        vals = self.values.tolist()
        for q, v in enumerate(vals, start=1):
            yield EKSample(q, v)

    @property
    def values(self) -> np.ndarray:
        return normalize(self.omega.astype(np.float64), self.norm)

    def distinct(self) -> tuple[np.ndarray, np.ndarray]:
        counts = np.bincount(self.omega.astype(np.int64))
        w = np.flatnonzero(counts)
        return normalize(w.astype(np.float64), self.norm), counts[w]

    def mean_var(self) -> tuple[float, float]:
        v, c = self.distinct()
        mean = float(np.dot(v, c) / c.sum())
        return mean, float(np.dot((v - mean) ** 2, c) / c.sum())


def _weighted(samples) -> tuple[np.ndarray, np.ndarray]:
    """Sorted distinct values with multiplicities, from any sample collection."""
    if isinstance(samples, EKSamples):
        v, c = samples.distinct()
    else:
        vals = np.fromiter((s.value if isinstance(s, EKSample) else float(s) for s in samples),
                           dtype=np.float64)
        v, c = np.unique(vals, return_counts=True)
    if c.sum() == 0:
        raise InvalidArgument("no samples")
    return v, c


def ek_omega_columns(t: FactorTable, x: int, *, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """omega(n_q) and omega(phi(q)) for ``q = 1 .. x`` as int8 arrays."""
    on, op = [], []
    for c in scan_columns(t, x, workers=workers):
        on.append(c.omega_n)
        op.append(c.omega_phi)
    return np.concatenate(on), np.concatenate(op)


def ek_samples(t: FactorTable, x: int, which: str = "omega_n", *, workers: int = 1) -> EKSamples:
    """Normalized omega(n_q) (or omega(phi(q))) for every ``q <= x`` at cutoff x."""
    if which not in ("omega_n", "omega_phi"):
        raise InvalidArgument(f"which must be 'omega_n' or 'omega_phi', got {which!r}")
    norm = EKNormalization.at(x)
    x = t.check(x, "x")
    on, op = ek_omega_columns(t, x, workers=workers)
    return EKSamples(on if which == "omega_n" else op, norm, which)


def empirical_cdf(samples, a: float) -> float:
    """Fraction of samples with value ``<= a``."""
    v, c = _weighted(samples)
    return float(c[v <= a].sum() / c.sum())


def std_normal_cdf(a: float) -> float:
    """Standard normal CDF.

    Uses ``0.5 * erfc(-a / sqrt(2))`` from the C math library, which is
    accurate to a few ulps; evaluating through erfc rather than ``1 + erf``
    avoids cancellation in the lower tail.
    """
    return 0.5 * math.erfc(-a / math.sqrt(2.0))


def ks_distance(samples) -> float:
    """Kolmogorov-Smirnov distance between the samples and the standard normal.

    Both one-sided limits of the empirical CDF are compared at every jump.
    """
    v, c = _weighted(samples)
    n = c.sum()
    after = np.cumsum(c) / n
    before = after - c / n
    phi = np.array([std_normal_cdf(a) for a in v.tolist()])
    return float(max(np.abs(after - phi).max(), np.abs(before - phi).max()))


@dataclass(frozen=True)
class HistogramBins:
    """Equal-width bins over ``[lo, lo + width * len(counts))``.

    Samples outside the range are folded into the edge bins and also
    reported in ``underflow`` / ``overflow``.
    """

    lo: float
    width: float
    counts: tuple[int, ...]
    total: int
    underflow: int = 0
    overflow: int = 0

    @property
    def hi(self) -> float:
        return self.lo + self.width * len(self.counts)

    def edges(self) -> list[float]:
        return [self.lo + i * self.width for i in range(len(self.counts))] + [self.hi]

    def densities(self) -> list[float]:
        return [c / (self.total * self.width) for c in self.counts]


def histogram(samples, lo: float, hi: float, bins: int) -> HistogramBins:
    """Density histogram with ``[left, right)`` bins; ties go to the right bin."""
    lo, hi, bins = float(lo), float(hi), int(bins)
    if not lo < hi:
        raise InvalidArgument(f"need lo < hi, got [{lo}, {hi})")
    if bins < 1:
        raise InvalidArgument(f"bins must be >= 1, got {bins}")
    v, c = _weighted(samples)
    width = (hi - lo) / bins
    edges = lo + width * np.arange(bins + 1)
    edges[-1] = hi
    idx = np.searchsorted(edges, v, side="right") - 1
    under = int(c[idx < 0].sum())
    over = int(c[idx >= bins].sum())
    counts = np.bincount(np.clip(idx, 0, bins - 1), weights=c, minlength=bins)
    return HistogramBins(lo, width, tuple(int(k) for k in counts.round()), int(c.sum()), under, over)


def unimodal_inversions(counts: Iterable[int]) -> int:
    """Direction changes beyond the single peak among nonempty bins.

    The statistic is lattice-valued, so bins between lattice points are
    empty; they are skipped. Returns 0 for a unimodal sequence.
    """
    seq = [k for k in counts if k > 0]
    peak = seq.index(max(seq)) if seq else 0
    rising = sum(1 for a, b in zip(seq[:peak], seq[1:peak + 1]) if b < a)
    falling = sum(1 for a, b in zip(seq[peak:], seq[peak + 1:]) if b > a)
    return rising + falling
