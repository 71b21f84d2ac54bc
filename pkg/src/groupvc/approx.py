"""Sampling certificates: epsilon-approximations, epsilon-nets, trace classes.

All verification paths compare exact rationals via integer cross
multiplication; floating point never decides a certificate.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InternalCheckError
from .groups import GroupSubset
from .setsystem import SetSystem

DEFAULT_SAMPLE_CONSTANT = Fraction(8)


@dataclass(frozen=True)
class ApproximationCertificate:
    """A point multiset whose empirical frequencies track the counting measure.

    ``verified`` is true iff the exact deviation ``|mu(S) - E(points; S)|`` is
    at most ``epsilon`` for every family set.
    """

    points: tuple[int, ...]
    epsilon: Fraction
    max_deviation: Fraction
    verified: bool
    seed: int | None = None
    attempts: int = 1

    def to_json_dict(self) -> dict:
        return {
            "points": list(self.points),
            "epsilon": _frac_str(self.epsilon),
            "max_deviation": _frac_str(self.max_deviation),
            "max_deviation_decimal": float(self.max_deviation),
            "verified": self.verified,
            "seed": self.seed,
            "attempts": self.attempts,
        }


@dataclass(frozen=True)
class NetCertificate:
    """A point set hitting every family set of measure above ``epsilon``."""

    points: tuple[int, ...]
    epsilon: Fraction
    verified: bool

    def to_json_dict(self) -> dict:
        return {
            "points": list(self.points),
            "epsilon": _frac_str(self.epsilon),
            "verified": self.verified,
        }


@dataclass(frozen=True)
class ApproxCheck:
    max_deviation: Fraction
    worst_index: int


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def sample_size(k: int, epsilon: Fraction, c: Fraction = DEFAULT_SAMPLE_CONSTANT) -> int:
    """ceil(c * k * eps^-2 * ln(e/eps)): points needed at VC dimension k.

    The multiplicative constant is configurable; certificates are verified
    exactly afterwards, so correctness never depends on it.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    lead = Fraction(c) * k / (epsilon * epsilon)
    return math.ceil(float(lead) * (1.0 + math.log(1.0 / float(epsilon))))


def empirical_frequency(points: Sequence[int], s: GroupSubset) -> Fraction:
    """Fraction of the point multiset lying in s."""
    if len(points) == 0:
        raise ValueError("the point multiset is empty")
    hits = sum(1 for p in points if p in s)
    return Fraction(hits, len(points))


def _set_hit_counts(sys: SetSystem, points: Sequence[int]) -> np.ndarray:
    """Per family set, how many of the points (with multiplicity) it contains."""
    m = sys.base_size
    counts = np.bincount(np.asarray(points, dtype=np.int64), minlength=m)
    hits = np.empty(len(sys.bits), dtype=np.int64)
    chunk = max(1, (1 << 26) // max(m, 1))
    mat = None
    for lo in range(0, len(sys.bits), chunk):
        hi = min(lo + chunk, len(sys.bits))
        mat = np.unpackbits(
            sys.packed()[lo:hi], axis=1, count=m, bitorder="little"
        ).astype(np.int64)
        hits[lo:hi] = mat @ counts
    return hits


def verify_approximation(
    sys: SetSystem, points: Sequence[int], epsilon: Fraction
) -> ApproxCheck:
    """Exact max deviation |mu(S) - E(points; S)| over the family.

    Returns the deviation and the least index attaining it.  ``epsilon`` is
    accepted for interface symmetry; the scan itself is threshold-free.
    """
    del epsilon
    if len(points) == 0:
        raise ValueError("the point multiset is empty")
    if not sys.bits:
        raise ValueError("the family is empty")
    r = len(points)
    m = sys.base_size
    hits = _set_hit_counts(sys, points)
    sizes = np.array([b.bit_count() for b in sys.bits], dtype=np.int64)
    # |hits/r - size/m| = |hits*m - size*r| / (r*m), all exact integers
    dev_num = np.abs(hits * m - sizes * r)
    worst = int(np.argmax(dev_num))
    return ApproxCheck(Fraction(int(dev_num[worst]), r * m), worst)


def random_eps_approximation(
    sys: SetSystem,
    epsilon: Fraction,
    seed: int,
    max_attempts: int = 3,
    *,
    k: int,
    c: Fraction = DEFAULT_SAMPLE_CONSTANT,
) -> ApproximationCertificate:
    """Draw seeded uniform points with replacement and verify exactly.

    Retries up to ``max_attempts`` draws from the same seeded stream and
    returns the first verified certificate, else the best-deviation draw
    with ``verified=False``.
    """
    epsilon = Fraction(epsilon)
    if not sys.bits:
        raise ValueError("the family is empty")
    r = sample_size(k, epsilon, c)
    rng = random.Random(seed)
    m = sys.base_size
    best: ApproximationCertificate | None = None
    for attempt in range(1, max(1, max_attempts) + 1):
        points = tuple(rng.randrange(m) for _ in range(r))
        check = verify_approximation(sys, points, epsilon)
        verified = check.max_deviation <= epsilon
        cert = ApproximationCertificate(
            points, epsilon, check.max_deviation, verified, seed, attempt
        )
        if verified:
            return cert
        if best is None or cert.max_deviation < best.max_deviation:
            best = cert
    assert best is not None
    return best


def eps_net(sys: SetSystem, epsilon: Fraction) -> NetCertificate:
    """Greedy hitting set for the family sets of measure > epsilon.

    Each round picks the point covering the most unhit heavy sets, ties by
    least index; the certificate is re-verified exactly after construction.
    """
    epsilon = Fraction(epsilon)
    m = sys.base_size
    p, q = epsilon.numerator, epsilon.denominator
    heavy = [i for i, b in enumerate(sys.bits) if b.bit_count() * q > p * m]
    if not heavy:
        return NetCertificate((), epsilon, True)
    inc = np.unpackbits(
        sys.packed()[heavy], axis=1, count=m, bitorder="little"
    ).astype(bool)
    unhit = np.ones(len(heavy), dtype=bool)
    chosen: list[int] = []
    while unhit.any():
        gains = inc[unhit].sum(axis=0)
        best = int(np.argmax(gains))  # first max = least index
        if gains[best] == 0:
            raise InternalCheckError("net greedy stalled on an unhittable set")
        chosen.append(best)
        unhit &= ~inc[:, best]
    points = tuple(sorted(chosen))
    verified = _verify_net(sys, points, epsilon)
    if not verified:
        raise InternalCheckError("greedy net failed its own verification")
    return NetCertificate(points, epsilon, True)


def _verify_net(sys: SetSystem, points: Sequence[int], epsilon: Fraction) -> bool:
    m = sys.base_size
    p, q = epsilon.numerator, epsilon.denominator
    mask = 0
    for x in points:
        mask |= 1 << int(x)
    for b in sys.bits:
        if b.bit_count() * q > p * m and b & mask == 0:
            return False
    return True


def trace_class_partition(points: Sequence[int], sys: SetSystem) -> list[list[int]]:
    """Group family indices by identical trace on the points.

    Within a class every set contains exactly the same sample points, so the
    empirical frequency is constant on each class.
    """
    if len(points) == 0:
        raise ValueError("the point multiset is empty")
    distinct = sorted({int(x) for x in points})
    classes: dict[tuple[bool, ...], list[int]] = {}
    for i, b in enumerate(sys.bits):
        key = tuple((b >> x) & 1 == 1 for x in distinct)
        classes.setdefault(key, []).append(i)
    return list(classes.values())  # insertion order: by least family index


def measure_level_set(
    sys: SetSystem,
    lo: Fraction,
    hi: Fraction,
    mode: str = "exact",
    certificate: ApproximationCertificate | None = None,
) -> list[int]:
    """Family indices whose measure lies in [lo, hi].

    Exact mode is the ground truth.  Approx mode uses a verified
    epsilon-approximation and keeps every set whose empirical frequency is
    within the certificate's epsilon of the interval; that is always a
    superset of the exact answer, which is asserted.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if not 0 <= lo <= hi <= 1:
        raise ValueError("need 0 <= lo <= hi <= 1")
    m = sys.base_size
    exact = [i for i, b in enumerate(sys.bits) if lo <= Fraction(b.bit_count(), m) <= hi]
    if mode == "exact":
        return exact
    if mode != "approx":
        raise ValueError(f"mode must be 'exact' or 'approx', got {mode!r}")
    if certificate is None or not certificate.verified:
        raise ValueError("approx mode requires a verified approximation certificate")
    r = len(certificate.points)
    eps = certificate.epsilon
    hits = _set_hit_counts(sys, certificate.points)
    out = []
    for i in range(len(sys.bits)):
        emp = Fraction(int(hits[i]), r)
        dist = max(Fraction(0), lo - emp, emp - hi)
        if dist <= eps:
            out.append(i)
    missing = set(exact) - set(out)
    if missing:
        raise InternalCheckError(
            f"approx level set lost exact members {sorted(missing)}"
        )
    return out
