"""Exact big-integer oracles.

Nothing here touches the modular pipeline's construction of H_p: the
polynomial comes from ``math.comb`` and integer long division, and scalar
values come straight from ``(x+y)**p - x**p - y**p``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb, gcd

from .modmath import is_prime
from .poly import F_QUAD, BigPoly, InexactDivision, epsilon_for, exact_quotient, horner, poly_pow
from .verifier import DenominatorNotInvertible, eval_h_direct, eval_h_horner

ORACLE_MAX_P = 61


class Lemma3Violation(AssertionError):
    """x**2+xy+y**2 has a prime factor congruent to 5 mod 6."""


def _check_p(p: int) -> int:
    if not (3 < p <= ORACLE_MAX_P and is_prime(p)):
        raise ValueError(f"oracle needs a prime in (3, {ORACLE_MAX_P}], got {p}")
    return epsilon_for(p)


def h_value_exact(p: int, x: int, y: int) -> int:
    """H_p(x, y) as an exact integer."""
    eps = _check_p(p)
    if x == 0 or y == 0 or x + y == 0:
        raise ValueError("x, y and x + y must be nonzero")
    if gcd(x, y) != 1:
        raise ValueError(f"x and y must be coprime, got {x}, {y}")
    num = (x + y) ** p - x**p - y**p
    den = p * x * y * (x + y) * (x * x + x * y + y * y) ** eps
    q, r = divmod(num, den)
    if r:
        raise InexactDivision(f"H_{p}({x}, {y}) is not an integer")
    return q


def h_poly_exact(p: int) -> BigPoly:
    """H_p(x, 1) by dividing the binomial expansion of F_p(x, 1) over Z."""
    eps = _check_p(p)
    f = [comb(p, j) if 0 < j < p else 0 for j in range(p + 1)]
    if any(c % p for c in f):
        raise InexactDivision(f"F_{p} not divisible by {p}")
    g = exact_quotient([c // p for c in f], [0, 1, 1])  # x (x + 1), monic
    return BigPoly(exact_quotient(g, poly_pow(F_QUAD, eps)))


def lemma1_check(x: int, y: int, n: int) -> bool:
    """``gcd(x+y, (x**n + y**n)/(x+y)) == gcd(x+y, n)`` for coprime x, y and odd n."""
    if x == 0 or y == 0 or x + y == 0 or gcd(x, y) != 1:
        raise ValueError(f"need coprime nonzero x, y with x + y != 0, got {x}, {y}")
    if n < 1 or n % 2 == 0:
        raise ValueError(f"n must be a positive odd integer, got {n}")
    s = x + y
    q, r = divmod(x**n + y**n, s)
    if r:
        raise InexactDivision(f"{s} does not divide {x}^{n} + {y}^{n}")
    return gcd(s, q) == gcd(s, n)


def random_lemma1_triples(count: int, seed: int = 0, bound: int = 10**6, max_n: int = 99):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        x = rng.randint(-bound, bound)
        y = rng.randint(-bound, bound)
        if x == 0 or y == 0 or x + y == 0 or gcd(x, y) != 1:
            continue
        out.append((x, y, rng.randrange(1, max_n + 1, 2)))
    return out


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization of a positive integer."""
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


@dataclass(frozen=True)
class Lemma3Case:
    x: int
    y: int
    f_value: int
    factors: dict

    @property
    def eta(self) -> int:
        return self.x + self.y


def lemma3_scan(limit: int) -> list[Lemma3Case]:
    """Factor x**2+xy+y**2 for all coprime 1 <= x <= y <= limit.

    Raises :class:`Lemma3Violation` on a prime factor = 5 (mod 6).
    """
    if limit < 1:
        raise ValueError(f"limit must be positive, got {limit}")
    cases = []
    for y in range(1, limit + 1):
        for x in range(1, y + 1):
            if gcd(x, y) != 1:
                continue
            f = x * x + x * y + y * y
            factors = factorize(f)
            bad = [q for q in factors if q % 6 == 5]
            if bad:
                raise Lemma3Violation(f"x={x}, y={y}: {f} has factors {bad} = 5 (mod 6)")
            cases.append(Lemma3Case(x, y, f, factors))
    return cases


def crosscheck_modular(p: int, k: int) -> bool:
    """Horner, direct and exact evaluations of H_p(X, 1) agree for every X mod p**k."""
    _check_p(p)
    if k not in (1, 2):
        raise ValueError(f"k must be 1 or 2, got {k}")
    m = p**k
    exact = h_poly_exact(p).coeffs
    for X in range(m):
        want = horner(exact, X) % m
        if eval_h_horner(p, X, k) != want:
            return False
        if X and h_value_exact(p, X, 1) % m != want:
            return False
        try:
            if eval_h_direct(p, X, k) != want:
                return False
        except DenominatorNotInvertible:
            if X * (X + 1) * (X * X + X + 1) % p:
                return False
    return True


def corollary3_relation_check(p: int) -> bool:
    """H_p(1, 1) * 3**eps * p == 2**(p-1) - 1."""
    eps = _check_p(p)
    return h_value_exact(p, 1, 1) * 3**eps * p == 2 ** (p - 1) - 1
