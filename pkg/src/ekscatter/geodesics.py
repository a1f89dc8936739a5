"""Scattering geodesics parameterized by rational cusps p/q in [0, 1).

Two cusps p1/q and p2/q (same denominator) lift geodesics with the same
image on the modular surface exactly when ``q | p1*p2 + 1``. Each
equivalence class on the reduced residues mod q has one or two members:
``p`` is paired with its partner ``y`` defined by ``p*y = -1 (mod q)``, and
``p`` is its own partner precisely when ``p*p = -1 (mod q)``. The family
for q keeps the smaller member of every pair plus all self-paired
residues, giving ``(phi(q) + s_q) / 2`` geodesics, all with sojourn time
``2 log(q * t0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import InvalidArgument, InvariantViolation
from .sieve import FactorTable, multiplicative_columns

DEFAULT_T0 = 2.0


@dataclass(frozen=True)
class RationalCusp:
    """Reduced fraction ``p/q`` in ``[0, 1)``."""

    p: int
    q: int

    def __post_init__(self):
        if self.q < 1 or not 0 <= self.p < self.q:
            raise InvalidArgument(f"{self.p}/{self.q} is not in [0, 1)")
        if math.gcd(self.p, self.q) != 1:
            raise InvalidArgument(f"{self.p}/{self.q} is not reduced")

    def __str__(self):
        return f"{self.p}/{self.q}"


@dataclass(frozen=True)
class GeodesicFamily:
    """All geodesics with denominator ``q``: numerators of G_q and their sojourn time."""

    q: int
    numerators: tuple[int, ...]
    sojourn: float
    t0: float

    def __len__(self):
        return len(self.numerators)

    def cusps(self) -> list[RationalCusp]:
        return [RationalCusp(p, self.q) for p in self.numerators]


def sojourn_time(q: int, t0: float = DEFAULT_T0) -> float:
    """Common sojourn time ``2 log(q * t0)`` of the geodesics with denominator q."""
    if not t0 > 1:
        raise InvalidArgument(f"t0 must be > 1, got {t0}")
    return 2.0 * math.log(q * t0)


def pair_partner(p: int, q: int) -> int:
    """The unique ``y`` in ``[1, q)`` with ``p*y = -1 (mod q)``."""
    p, q = int(p), int(q)
    if q < 2 or not 1 <= p < q:
        raise InvalidArgument(f"need q >= 2 and 1 <= p < q, got p={p}, q={q}")
    try:
        inv = pow(p, -1, q)
    except ValueError:
        raise InvalidArgument(f"gcd({p}, {q}) != 1, no partner exists") from None
    return (-inv) % q


def _inverse_many(p: np.ndarray, q: int) -> np.ndarray:
    """Modular inverses of every entry of ``p`` (all coprime to q), by array-wide extended Euclid."""
    r0 = np.full(p.shape, q, dtype=np.int64)
    r1 = p.astype(np.int64)
    s0 = np.zeros(p.shape, dtype=np.int64)
    s1 = np.ones(p.shape, dtype=np.int64)
    # coefficients stay bounded by q, so int64 is exact for q < 2**32
    while True:
        live = r1 != 0
        if not live.any():
            break
        quo = np.zeros_like(r0)
        np.floor_divide(r0, r1, out=quo, where=live)
        r0, r1 = np.where(live, r1, r0), np.where(live, r0 - quo * r1, r1)
        s0, s1 = np.where(live, s1, s0), np.where(live, s0 - quo * s1, s1)
    if (r0 != 1).any():
        raise InvariantViolation(f"non-invertible residue passed for q={q}")
    return s0 % q


def _family_numerators(q: int) -> np.ndarray:
    if q == 1:
        return np.zeros(1, dtype=np.int64)
    p = np.arange(1, q, dtype=np.int64)
    p = p[np.gcd(p, q) == 1]
    partner = (-_inverse_many(p, q)) % q
    return p[p <= partner]


def enumerate_family(t: FactorTable, q: int, t0: float = DEFAULT_T0) -> GeodesicFamily:
    """Build G_q: smaller member of each partner pair plus the self-paired residues.

    The size is checked against ``(phi(q) + s_q) / 2`` computed from the
    factor table; a mismatch raises :class:`InvariantViolation`.
    """
    q = t.check(q, "q")
    sojourn = sojourn_time(q, t0)
    nums = _family_numerators(q)
    cols = multiplicative_columns(t, [q])
    expected = (int(cols.phi[0]) + int(cols.s[0])) // 2
    if nums.size != expected:
        raise InvariantViolation(f"|G_{q}| = {nums.size}, expected n_q = {expected}")
    return GeodesicFamily(q, tuple(nums.tolist()), sojourn, float(t0))


def same_geodesic(w1: RationalCusp, w2: RationalCusp) -> bool:
    """True iff the vertical geodesics above ``w1`` and ``w2`` have the same image.

    The cusp ``0/1`` is equivalent only to itself.
    """
    for w in (w1, w2):
        if not isinstance(w, RationalCusp):
            raise InvalidArgument(f"expected RationalCusp, got {w!r}")
    if w1 == w2:
        return True
    if w1.q != w2.q or w1.q == 1:
        return False
    return (w1.p * w2.p + 1) % w1.q == 0


def enumerate_up_to(t: FactorTable, q_max: int, t0: float = DEFAULT_T0) -> Iterator[GeodesicFamily]:
    """Yield the families for ``q = 1 .. q_max`` in order."""
    q_max = t.check(q_max, "q_max")
    sojourn_time(1, t0)
    for q in range(1, q_max + 1):
        yield enumerate_family(t, q, t0)
