"""The polynomials F_n, G_p and H_p, exactly and modulo p**k.

Everything is specialized at ``y = 1``: the polynomials are homogeneous, so
the univariate form ``P(x, 1)`` carries all the information.  Coefficient
lists are indexed by degree and the zero polynomial is the empty list.

Two independent constructions of G_p exist here:

* the modular production path (``g_coeffs_mod``), which starts from
  ``C(p, j) / p`` built by a multiplicative recurrence and divides out
  ``x (x + 1)`` synthetically, and
* the exact path (``g_exact``), which rebuilds G_p from the W-table
  recurrence in the mixed basis ``x**i (x + 1)**(n - 2i - 3)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

from .modmath import inv_mod, is_prime

EXACT_LIMIT = 101

# x**2 + x + 1, low degree first
F_QUAD = (1, 1, 1)


class InexactDivision(ArithmeticError):
    """A division the identities guarantee to be exact left a remainder.

    Seeing this means there is a bug, not a mathematical surprise.
    """


def epsilon_for(p: int) -> int:
    """Multiplicity of ``x**2 + x + 1`` in G_p: 1 if p = 5 (mod 6), 2 if p = 1 (mod 6)."""
    if p <= 3 or not is_prime(p):
        raise ValueError(f"p must be a prime > 3, got {p}")
    return 1 if p % 6 == 5 else 2


@dataclass(frozen=True)
class PrimeCase:
    p: int
    class6: int
    epsilon: int

    @classmethod
    def of(cls, p: int) -> "PrimeCase":
        eps = epsilon_for(p)
        return cls(p, -1 if eps == 1 else 1, eps)

    @property
    def h_degree(self) -> int:
        return self.p - 3 - 2 * self.epsilon


# -- coefficient-list helpers ------------------------------------------------


def trim(coeffs: Sequence[int]) -> list[int]:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return out


def poly_add(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return trim(out)


def poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return trim(out)


def poly_pow(a: Sequence[int], e: int) -> list[int]:
    out = [1]
    for _ in range(e):
        out = poly_mul(out, a)
    return out


def divmod_monic(num: Sequence[int], den: Sequence[int], m: int | None = None):
    """Long division by a monic ``den``; exact over Z when ``m`` is None, else mod m.

    Returns ``(quotient, remainder)`` as trimmed coefficient lists.
    """
    den = trim(den)
    if not den or den[-1] != 1:
        raise ValueError("divisor must be monic")
    rem = list(num)
    d = len(den) - 1
    if len(rem) <= d:
        return [], trim([c % m for c in rem] if m else rem)
    q = [0] * (len(rem) - d)
    for i in range(len(rem) - 1, d - 1, -1):
        c = rem[i] % m if m else rem[i]
        if c:
            q[i - d] = c
            for j in range(d + 1):
                rem[i - d + j] -= c * den[j]
        rem[i] = 0
    if m:
        rem = [c % m for c in rem]
        q = [c % m for c in q]
    return trim(q), trim(rem[:d])


def exact_quotient(num, den, m: int | None = None) -> list[int]:
    q, r = divmod_monic(num, den, m)
    if r:
        raise InexactDivision(f"remainder {r} dividing by {list(den)}" + (f" mod {m}" if m else ""))
    return q


def horner(coeffs: Sequence[int], x: int, m: int | None = None) -> int:
    acc = 0
    if m is None:
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc
    x %= m
    for c in reversed(coeffs):
        acc = (acc * x + c) % m
    return acc


# -- typed wrappers ----------------------------------------------------------


@dataclass(frozen=True)
class BigPoly:
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(trim(self.coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: int) -> int:
        return horner(self.coeffs, x)

    def reduce(self, m: int) -> "ModPoly":
        return ModPoly(m, self.coeffs)


@dataclass(frozen=True)
class ModPoly:
    modulus: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(trim(c % self.modulus for c in self.coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: int) -> int:
        return horner(self.coeffs, x, self.modulus)

    def is_palindromic(self) -> bool:
        return self.coeffs == self.coeffs[::-1]


# -- the W table -------------------------------------------------------------


def _binom(a: int, b: int) -> int:
    # C(a, b) = 0 outside 0 <= b <= a
    if a < 0 or b < 0 or b > a:
        return 0
    return comb(a, b)


@dataclass(frozen=True)
class WTable:
    n: int
    W: tuple[int, ...]
    w: tuple[int, ...] | None = None


def w_table(n: int) -> WTable:
    """Coefficients of F_n in the basis ``x**(i-1) y**(i-1) (x+y)**(n-2i-1)``.

    Built with the exact O(n**2) recurrence.  When ``n`` is prime the reduced
    coefficients ``w_j = W_j / n`` are filled in too.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError(f"n must be odd and >= 3, got {n}")
    W: list[int] = []
    for j in range((n - 1) // 2):
        acc = comb(n, j + 1)
        for k in range(1, j + 1):
            acc -= (-1) ** (j + k) * comb(n, k) + _binom(n - 2 * j + 2 * k - 3, k) * W[j - k]
        W.append(acc)
    w = None
    if is_prime(n):
        if any(c % n for c in W):
            raise InexactDivision(f"W table of prime {n} not divisible by {n}")
        w = tuple(c // n for c in W)
    return WTable(n, tuple(W), w)


def _check_exact(n: int, limit: int) -> None:
    if n > limit:
        raise ValueError(f"exact arithmetic capped at n <= {limit}, got {n}")


def f_exact(n: int) -> BigPoly:
    """F_n(x, 1) = (x + 1)**n - x**n - 1."""
    return BigPoly([comb(n, j) if 0 < j < n else 0 for j in range(n + 1)])


def identity_rhs(table: WTable) -> BigPoly:
    n = table.n
    total: list[int] = []
    for i in range(1, (n - 1) // 2 + 1):
        term = [0] * (i - 1) + poly_pow((1, 1), n - 2 * i - 1)
        total = poly_add(total, [table.W[i - 1] * c for c in term])
    return BigPoly(poly_mul([0, 1, 1], total))


def verify_identity_eq2(n: int, limit: int = EXACT_LIMIT) -> bool:
    """Does the W table re-expand to exactly (x+1)**n - x**n - 1?"""
    _check_exact(n, limit)
    return identity_rhs(w_table(n)) == f_exact(n)


def g_exact(p: int, limit: int = EXACT_LIMIT) -> BigPoly:
    """G_p(x, 1) over Z, from the reduced W table."""
    _check_exact(p, limit)
    epsilon_for(p)
    w = w_table(p).w
    total: list[int] = []
    for i in range(1, (p - 1) // 2 + 1):
        term = [0] * (i - 1) + poly_pow((1, 1), p - 2 * i - 1)
        total = poly_add(total, [w[i - 1] * c for c in term])
    return BigPoly(total)


def h_exact(p: int, limit: int = EXACT_LIMIT) -> BigPoly:
    eps = epsilon_for(p)
    return BigPoly(exact_quotient(g_exact(p, limit).coeffs, poly_pow(F_QUAD, eps)))


def epsilon_division_check(p: int, limit: int = EXACT_LIMIT) -> bool:
    """f**eps divides G_p(x, 1) over Z and f**(eps + 1) does not."""
    eps = epsilon_for(p)
    g = g_exact(p, limit).coeffs
    _, r = divmod_monic(g, poly_pow(F_QUAD, eps))
    _, r_next = divmod_monic(g, poly_pow(F_QUAD, eps + 1))
    return not r and bool(r_next)


# -- modular production path -------------------------------------------------


def _check_k(k: int, allowed=(1, 2, 3)) -> None:
    if k not in allowed:
        raise ValueError(f"k must be one of {allowed}, got {k}")


def f_p_over_p_coeffs(p: int, k: int) -> ModPoly:
    """F_p(x, 1) / p mod p**k: coefficients ``C(p, j) / p`` for j = 1..p-1."""
    epsilon_for(p)
    _check_k(k)
    m = p**k
    coeffs = [0] * p
    c = 1
    coeffs[1] = 1
    for j in range(2, p):
        # C(p,j)/p = C(p,j-1)/p * (p-j+1)/j ; j < p so j is a unit
        c = c * (p - j + 1) % m * inv_mod(j, m) % m
        coeffs[j] = c
    return ModPoly(m, coeffs)


def g_coeffs_mod(p: int, k: int) -> ModPoly:
    _check_k(k, (1, 2))
    top = f_p_over_p_coeffs(p, k)
    m = top.modulus
    return ModPoly(m, exact_quotient(top.coeffs[1:], (1, 1), m))


def h_coeffs_mod(p: int, k: int) -> ModPoly:
    eps = epsilon_for(p)
    g = g_coeffs_mod(p, k)
    return ModPoly(g.modulus, exact_quotient(g.coeffs, poly_pow(F_QUAD, eps), g.modulus))
