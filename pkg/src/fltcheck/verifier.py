"""Two-stage check that p**2 never divides H_p(x, y) for coprime x, y.

By homogeneity it is enough to look at H_p(X, 1) for residues X.  Stage 1
walks one representative of each pair ``{X, p-1-X}`` modulo p (the classes
0 and -1 give H = 1) and keeps the residues where H vanishes mod p.  Stage 2
lifts those to mod p**2: every lift for conjecture 1, only the lift with
``X**(p-1) = 1 (mod p**2)`` for conjecture 2.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

from .modmath import NotInvertible, inv_mod, is_prime, p_adic_valuation, pow_mod_array
from .poly import epsilon_for, h_coeffs_mod, horner

VERIFIED = "verified"
COUNTEREXAMPLE = "counterexample"


class DenominatorNotInvertible(NotInvertible):
    """X (X+1) (X**2+X+1) is not a unit; use :func:`eval_h_horner` instead."""


@dataclass(frozen=True)
class SuspiciousResidue:
    X: int
    h_mod_p: int = 0


@dataclass
class ConjectureReport:
    p: int
    conjecture: int
    status: str
    suspicious: list[SuspiciousResidue] = field(default_factory=list)
    residues_scanned: int = 0
    duration_ms: float = 0.0
    lift: int | None = None

    @property
    def verified(self) -> bool:
        return self.status == VERIFIED


@dataclass(frozen=True)
class WieferichRecord:
    p: int
    valuation: int

    @property
    def violates_corollary(self) -> bool:
        return self.valuation >= 3


def _check_k(k: int) -> None:
    if k not in (1, 2):
        raise ValueError(f"k must be 1 or 2, got {k}")


def eval_h_direct(p: int, X: int, k: int) -> int:
    """H_p(X, 1) mod p**k from the closed form, in O(log p) multiplications."""
    _check_k(k)
    eps = epsilon_for(p)
    m = p**k
    X %= m
    den = X * (X + 1) % m * pow(X * X + X + 1, eps, m) % m
    try:
        inv = inv_mod(den, m)
    except NotInvertible:
        raise DenominatorNotInvertible(den, m) from None
    big = m * p
    num = (pow(X + 1, p, big) - pow(X, p, big) - 1) % big
    return num // p * inv % m


@lru_cache(maxsize=64)
def _h_coeffs(p: int, k: int) -> tuple[int, ...]:
    return h_coeffs_mod(p, k).coeffs


def eval_h_horner(p: int, X: int, k: int) -> int:
    """H_p(X, 1) mod p**k from its coefficients; defined for every X."""
    _check_k(k)
    m = p**k
    return horner(_h_coeffs(p, k), X, m)


def eval_h(p: int, X: int, k: int) -> int:
    try:
        return eval_h_direct(p, X, k)
    except DenominatorNotInvertible:
        return eval_h_horner(p, X, k)


def eval_h_at_f_root(p: int, X: int) -> int:
    """H_p(X, 1) mod p at a root X of X**2+X+1 modulo p.

    Expand both sides of ``F_p(x, 1) / p = x (x+1) f(x)**eps H_p(x, 1)`` at
    ``x = X + t`` over GF(p).  Since f(X + t) = f'(X) t + t**2, the lowest
    surviving term on the right is ``X (X+1) f'(X)**eps H_p(X) t**eps``; on the
    left it is ``C(p, eps) / p * ((X+1)**(p-eps) - X**(p-eps)) t**eps``.
    """
    eps = epsilon_for(p)
    X %= p
    if (X * X + X + 1) % p:
        raise ValueError(f"{X} is not a root of x^2+x+1 mod {p}")
    top = comb(p, eps) // p * (pow(X + 1, p - eps, p) - pow(X, p - eps, p))
    den = X * (X + 1) * pow(2 * X + 1, eps, p)
    return top * inv_mod(den % p, p) % p


def stage1_scan(p: int, lo: int = 1, hi: int | None = None) -> list[SuspiciousResidue]:
    """Representatives X in ``[lo, hi]`` (default ``[1, (p-1)/2]``) with p | H_p(X, 1).

    Where the denominator is a unit mod p, ``H = 0 (mod p)`` is the same as
    ``(X+1)**p - X**p - 1 = 0 (mod p**2)``, so no inversion is needed and the
    powers are computed for the whole block at once.  Roots of X**2+X+1 go
    through :func:`eval_h_at_f_root`.
    """
    epsilon_for(p)
    half = (p - 1) // 2
    hi = half if hi is None else min(hi, half)
    lo = max(lo, 1)
    if lo > hi:
        return []
    m = p * p
    xs = np.arange(lo, hi + 2, dtype=np.int64)
    powers = pow_mod_array(xs, p, m)
    zero = (powers[1:] - powers[:-1] - 1) % m == 0
    roots = (xs[:-1] * xs[:-1] + xs[:-1] + 1) % p == 0
    hits = set(xs[:-1][zero & ~roots].tolist())
    for X in xs[:-1][roots].tolist():
        if eval_h_at_f_root(p, X) == 0:
            hits.add(X)
    return [SuspiciousResidue(X) for X in sorted(hits)]


def teichmuller_lift(p: int, X: int) -> int:
    """The lift of X mod p to mod p**2 whose (p-1)-th power is 1."""
    if X % p == 0:
        raise ValueError(f"{X} is divisible by {p}")
    return pow(X, p, p * p)


def lifts_for(p: int, X: int, conjecture: int) -> list[int]:
    if conjecture == 1:
        return list(range(X, X + p * p, p))
    if conjecture == 2:
        return [teichmuller_lift(p, X)]
    raise ValueError(f"conjecture must be 1 or 2, got {conjecture}")


def _first_zero_lift(p: int, X: int, conjecture: int) -> int | None:
    lifts = lifts_for(p, X, conjecture)
    m3 = p**3
    if m3.bit_length() > 61 or X * (X + 1) * (X * X + X + 1) % p == 0:
        for lifted in lifts:
            if eval_h(p, lifted, 2) == 0:
                return lifted
        return None
    # every lift is congruent to X mod p, so its denominator is a unit mod p**2
    # and p**2 | H iff p**3 | (X'+1)**p - X'**p - 1
    xs = np.asarray(lifts, dtype=np.int64)
    num = (pow_mod_array(xs + 1, p, m3) - pow_mod_array(xs, p, m3) - 1) % m3
    hits = np.flatnonzero(num == 0)
    return int(xs[hits[0]]) if hits.size else None


def stage2_lift(p: int, suspicious: list[SuspiciousResidue], conjecture: int) -> int | None:
    """First lift (in scan order) with p**2 | H_p(X', 1), or None."""
    for s in suspicious:
        found = _first_zero_lift(p, s.X, conjecture)
        if found is not None:
            return found
    return None


def verify_conjecture(p: int, conjecture: int) -> ConjectureReport:
    if conjecture not in (1, 2):
        raise ValueError(f"conjecture must be 1 or 2, got {conjecture}")
    start = time.perf_counter()
    suspicious = stage1_scan(p)
    lift = stage2_lift(p, suspicious, conjecture) if suspicious else None
    return ConjectureReport(
        p=p,
        conjecture=conjecture,
        status=VERIFIED if lift is None else COUNTEREXAMPLE,
        suspicious=suspicious,
        residues_scanned=(p - 1) // 2,
        duration_ms=(time.perf_counter() - start) * 1000,
        lift=lift,
    )


def wieferich_check(p: int) -> WieferichRecord:
    """Valuation of ``2**(p-1) - 1`` at p."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return WieferichRecord(2, 0)
    m3 = p**3
    r = pow(2, p - 1, m3)
    if r % (p * p) != 1:
        return WieferichRecord(p, 1)
    if r != 1:
        return WieferichRecord(p, 2)
    # never observed; find the exact valuation
    k = 6
    while pow(2, p - 1, p**k) == 1:
        k *= 2
    return WieferichRecord(p, p_adic_valuation(pow(2, p - 1, p**k) - 1, p))
