"""Modular arithmetic kernels and deterministic prime generation.

Residues are canonical (``0 <= r < m``); signed inputs are normalized on
entry.  Moduli are capped below ``2**63`` so the same routines would fit a
fixed 128-bit intermediate; Python integers make the cap a contract rather
than a necessity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, isqrt

import numpy as np

MAX_MODULUS = 1 << 63

# Deterministic Miller-Rabin witnesses valid for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class NotInvertible(ArithmeticError):
    """Raised when a residue shares a factor with the modulus."""

    def __init__(self, a: int, m: int):
        super().__init__(f"{a} is not invertible modulo {m} (gcd={gcd(a, m)})")
        self.a = a
        self.m = m


def _check_modulus(m: int) -> None:
    if not 2 <= m < MAX_MODULUS:
        raise ValueError(f"modulus must satisfy 2 <= m < 2**63, got {m}")


def mul_mod(a: int, b: int, m: int) -> int:
    _check_modulus(m)
    return (a % m) * (b % m) % m


def pow_mod(base: int, exp: int, m: int) -> int:
    """``base**exp mod m`` with ``0**0 == 1``."""
    _check_modulus(m)
    if exp < 0:
        raise ValueError("exponent must be non-negative")
    return pow(base % m, exp, m)


def inv_mod(a: int, m: int) -> int:
    """Inverse of ``a`` modulo ``m``; raises :class:`NotInvertible` when gcd > 1."""
    _check_modulus(m)
    a %= m
    # extended Euclid
    old_r, r = a, m
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    if old_r != 1:
        raise NotInvertible(a, m)
    return old_s % m


def p_adic_valuation(n: int, p: int) -> int:
    """Largest ``v`` with ``p**v`` dividing ``n``."""
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    if p < 2:
        raise ValueError(f"p must be a prime, got {p}")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeRange:
    lo: int
    hi: int
    primes: tuple[int, ...] = field(default=())

    def __iter__(self):
        return iter(self.primes)

    def __len__(self):
        return len(self.primes)


def _base_primes(limit: int) -> list[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytes(len(range(i * i, limit + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


def primes_in_range(lo: int, hi: int, segment: int = 1 << 16) -> PrimeRange:
    """All primes in ``[lo, hi]`` by a segmented sieve of Eratosthenes."""
    if lo < 2:
        raise ValueError(f"lo must be >= 2, got {lo}")
    if hi < lo:
        return PrimeRange(lo, hi, ())
    base = _base_primes(isqrt(hi))
    out: list[int] = []
    for start in range(lo, hi + 1, segment):
        stop = min(start + segment, hi + 1)
        seg = bytearray([1]) * (stop - start)
        for q in base:
            first = max(q * q, (start + q - 1) // q * q)
            if first >= stop:
                continue
            seg[first - start :: q] = bytes(len(range(first, stop, q)))
        out.extend(start + i for i, flag in enumerate(seg) if flag)
    return PrimeRange(lo, hi, tuple(out))


def _mulmod_array(a, b, m: int):
    """Elementwise ``a*b mod m`` on int64 arrays without overflow."""
    bits = m.bit_length()
    if bits * 2 <= 62:
        return a * b % m
    if bits <= 50:
        # float64 quotient is off by at most one; the int64 products wrap
        # mod 2**64 but their difference is the true remainder in (-m, 2m)
        q = np.floor(a.astype(np.float64) * b.astype(np.float64) / m).astype(np.int64)
        return (a * b - q * m) % m
    # split b into limbs small enough that a*limb fits in 63 bits
    s = 62 - bits
    if s < 1:
        raise ValueError(f"modulus too large for array kernel: {m}")
    mask = (1 << s) - 1
    nlimbs = -(-bits // s)
    acc = np.zeros_like(a)
    for i in reversed(range(nlimbs)):
        limb = (b >> (i * s)) & mask
        acc = ((acc << s) % m + a * limb % m) % m
    return acc


def pow_mod_array(bases, exp: int, m: int):
    """Elementwise ``bases**exp mod m`` for an integer array, by square-and-multiply."""
    _check_modulus(m)
    if m.bit_length() > 61:
        raise ValueError(f"modulus too large for array kernel: {m}")
    base = np.asarray(bases, dtype=np.int64) % m
    result = np.ones_like(base) % m
    while exp:
        if exp & 1:
            result = _mulmod_array(result, base, m)
        exp >>= 1
        if exp:
            base = _mulmod_array(base, base, m)
    return result
