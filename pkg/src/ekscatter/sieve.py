"""Smallest-prime-factor table and the arithmetic functions built on it.

A :class:`FactorTable` stores ``spf[m]`` for ``0 <= m <= limit`` as
``uint32``; entries 0 and 1 are placeholders (0 and 1). Memory use is
``4 * (limit + 1)`` bytes, so 10**7 takes 40 MB and 10**8 takes 400 MB.
Limits above ``2**32 - 1`` are rejected.

Scalar queries (:func:`factorize`, :func:`omega`, :func:`totient`,
:func:`s_of_q`) walk the table in O(omega(m) + log m) steps. The bulk
routine :func:`multiplicative_columns` does the same walk for a whole
array of arguments at once and is what the scans use.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidArgument, InvariantViolation, ResourceError

MAX_LIMIT = 2**32 - 1

# Above this the segmented build is used by default.
SEGMENTED_THRESHOLD = 10**8


class PrimeClass(enum.Enum):
    """Residue class of a prime modulo 4."""

    TWO = "two"
    ONE_MOD_4 = "one_mod_4"
    THREE_MOD_4 = "three_mod_4"


def prime_class(p: int) -> PrimeClass:
    """Classify the prime ``p`` by its residue mod 4 (primality is not checked)."""
    if p == 2:
        return PrimeClass.TWO
    if p < 2 or p % 2 == 0:
        raise InvalidArgument(f"{p} is not an odd prime or 2")
    return PrimeClass.ONE_MOD_4 if p % 4 == 1 else PrimeClass.THREE_MOD_4


@dataclass(frozen=True, eq=False)
class FactorTable:
    """Smallest prime factor of every integer in ``[2, limit]``.

    The array is marked read-only, so a table can be shared freely between
    threads or forked worker processes.
    """

    limit: int
    spf: np.ndarray

    def __post_init__(self):
        self.spf.flags.writeable = False

    def __len__(self):
        return self.limit

    def __repr__(self):
        return f"FactorTable(limit={self.limit})"

    def check(self, m, name="m") -> int:
        """Return ``int(m)`` or raise if it is not in ``[1, limit]``."""
        m = int(m)
        if not 1 <= m <= self.limit:
            raise InvalidArgument(f"{name}={m} outside table range [1, {self.limit}]")
        return m


def _allocate(limit: int) -> np.ndarray:
    nbytes = 4 * (limit + 1)
    try:
        return np.zeros(limit + 1, dtype=np.uint32)
    except MemoryError as exc:
        raise ResourceError(
            f"cannot allocate factor table for limit={limit} ({nbytes} bytes)",
            nbytes=nbytes,
        ) from exc


def _base_primes(n: int) -> np.ndarray:
    """Primes <= n by a plain Eratosthenes sieve."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(n + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _finish(spf: np.ndarray) -> None:
    # entries still zero are primes
    zero = np.flatnonzero(spf == 0)
    spf[zero] = zero.astype(np.uint32)
    spf[0] = 0
    spf[1] = 1


def _build_full(limit: int) -> np.ndarray:
    spf = _allocate(limit)
    for p in _base_primes(math.isqrt(limit)).tolist():
        view = spf[p * p :: p]
        view[view == 0] = p
    _finish(spf)
    return spf


def _build_segmented(limit: int, segment: int) -> np.ndarray:
    spf = _allocate(limit)
    base = _base_primes(math.isqrt(limit)).tolist()
    lo = 2
    while lo <= limit:
        hi = min(lo + segment, limit + 1)
        seg = spf[lo:hi]
        for p in base:
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            view = seg[start - lo :: p]
            view[view == 0] = p
        lo = hi
    _finish(spf)
    return spf


def build_factor_table(limit: int, *, segmented: bool | None = None,
                       segment_size: int = 1 << 22) -> FactorTable:
    """Sieve the smallest prime factor of every integer up to ``limit``.

    Parameters
    ----------
    limit : int
        Inclusive upper bound, ``2 <= limit <= 2**32 - 1``.
    segmented : bool, optional
        Sieve in blocks of ``segment_size`` entries. This keeps the
        temporaries small. The resulting table is identical. Defaults to
        True only for limits above 10**8.
    """
    limit = int(limit)
    if limit < 2:
        raise InvalidArgument(f"limit must be >= 2, got {limit}")
    if limit > MAX_LIMIT:
        raise InvalidArgument(f"limit {limit} exceeds supported maximum {MAX_LIMIT}")
    if segmented is None:
        segmented = limit > SEGMENTED_THRESHOLD
    if segmented:
        spf = _build_segmented(limit, max(int(segment_size), 1024))
    else:
        spf = _build_full(limit)
    return FactorTable(limit, spf)


def factorize(t: FactorTable, m: int) -> list[tuple[int, int]]:
    """Prime factorization of ``m`` as ``[(p, e), ...]`` with increasing ``p``."""
    m = t.check(m)
    spf = t.spf
    out = []
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        out.append((p, e))
    return out


def omega(t: FactorTable, m: int) -> int:
    """Number of distinct prime factors; ``omega(1) == 0``."""
    return len(factorize(t, m))


def totient(t: FactorTable, q: int) -> int:
    """Euler's phi, exact integer arithmetic; ``totient(t, 1) == 1``."""
    q = t.check(q, "q")
    result = q
    for p, _ in factorize(t, q):
        result = result // p * (p - 1)
    return result


def s_of_q(t: FactorTable, q: int) -> int:
    """Number of ``p`` in ``[1, q)`` with ``p*p = -1 (mod q)``, and ``s_1 = 1``.

    By the Chinese remainder theorem the count is multiplicative: each odd
    prime power ``p**k`` with ``p = 1 (mod 4)`` contributes 2 roots, the
    factor ``2`` contributes 1, and ``4 | q`` or any prime ``p = 3 (mod 4)``
    makes the count 0.
    """
    q = t.check(q, "q")
    s = 1
    for p, e in factorize(t, q):
        if p == 2:
            if e > 1:
                return 0
        elif p % 4 == 3:
            return 0
        else:
            s *= 2
    return s


def brute_force_s(q: int) -> int:
    """Exhaustive count of square roots of -1 modulo ``q`` (test oracle).

    O(q) time and memory. Squares are formed in uint64, which is exact for
    ``q < 2**32``.
    """
    q = int(q)
    if q < 1:
        raise InvalidArgument(f"q must be positive, got {q}")
    if q == 1:
        return 1
    if q > MAX_LIMIT:
        raise InvalidArgument(f"q={q} too large for the exhaustive count")
    p = np.arange(1, q, dtype=np.uint64)
    return int(np.count_nonzero((p * p) % np.uint64(q) == np.uint64(q - 1)))


def n_of_q(phi: int, s: int) -> int:
    """Number of scattering geodesics with denominator q: ``(phi + s) / 2``."""
    phi, s = int(phi), int(s)
    if (phi + s) % 2:
        raise InvariantViolation(f"phi + s = {phi} + {s} is odd")
    return (phi + s) // 2


class Columns(NamedTuple):
    omega: np.ndarray
    phi: np.ndarray
    s: np.ndarray


def multiplicative_columns(t: FactorTable, values, *, omega_only=False) -> Columns:
    """Vectorized omega, phi and s for every entry of ``values``.

    All entries must lie in ``[1, t.limit]``. Each pass strips one distinct
    prime from every unfinished entry, so the number of passes is the
    largest omega in ``values``. With ``omega_only`` the phi and s arrays
    are returned as None.
    """
    v = np.asarray(values, dtype=np.int64).ravel()
    if v.size and (v.min() < 1 or v.max() > t.limit):
        raise InvalidArgument(f"values outside table range [1, {t.limit}]")
    spf = t.spf
    rem = v.copy()
    om = np.zeros(v.size, dtype=np.int64)
    if not omega_only:
        phi = v.copy()
        k1 = np.zeros(v.size, dtype=np.int64)
        bad = np.zeros(v.size, dtype=bool)
    idx = np.flatnonzero(rem > 1)
    while idx.size:
        r = rem[idx]
        p = spf[r].astype(np.int64)
        om[idx] += 1
        r //= p
        sub = np.flatnonzero(r % p == 0)
        if not omega_only:
            phi[idx] = phi[idx] // p * (p - 1)
            mod4 = p & 3
            k1[idx] += mod4 == 1
            bad[idx] |= mod4 == 3
            bad[idx[sub]] |= p[sub] == 2
        while sub.size:
            r[sub] //= p[sub]
            sub = sub[r[sub] % p[sub] == 0]
        rem[idx] = r
        idx = idx[r > 1]
    if omega_only:
        return Columns(om, None, None)
    s = np.where(bad, 0, np.left_shift(1, k1))
    return Columns(om, phi, s)
