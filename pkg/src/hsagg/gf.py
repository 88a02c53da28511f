"""Arithmetic in the prime field GF(q) with canonical least-nonnegative residues."""

from __future__ import annotations

from dataclasses import dataclass

import sympy

MAX_MODULUS = (1 << 61) - 1


class NotPrime(ValueError):
    """Raised when a requested modulus is composite or below 2."""


class DivisionByZero(ZeroDivisionError):
    """Raised on inversion of the zero element."""


@dataclass(frozen=True)
class FieldSpec:
    """A prime field GF(q). Construct through make_field so primality is checked."""

    modulus: int

    def reduce(self, a: int) -> int:
        return a % self.modulus

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.modulus

    def neg(self, a: int) -> int:
        return (-a) % self.modulus


def make_field(q: int) -> FieldSpec:
    """Return FieldSpec(q) for a prime q in [2, 2^61 - 1].

    Primality is checked deterministically (sympy.isprime is exact for all
    inputs this size).
    """
    if q < 2 or q > MAX_MODULUS or not sympy.isprime(q):
        raise NotPrime(f"modulus must be a prime in [2, 2^61-1], got {q}")
    return FieldSpec(q)


def f_inv(field: FieldSpec, a: int) -> int:
    """Multiplicative inverse of a nonzero element, via extended Euclid."""
    a %= field.modulus
    if a == 0:
        raise DivisionByZero("0 has no multiplicative inverse")
    # Iterative extended Euclid; only the Bezout coefficient of a is tracked.
    r0, r1 = field.modulus, a
    t0, t1 = 0, 1
    while r1:
        quot = r0 // r1
        r0, r1 = r1, r0 - quot * r1
        t0, t1 = t1, t0 - quot * t1
    return t0 % field.modulus


def f_pow(field: FieldSpec, b: int, e: int) -> int:
    """b^e mod q for e >= 0, with the empty-product convention 0^0 = 1."""
    if e < 0:
        raise ValueError("exponent must be non-negative")
    return pow(b % field.modulus, e, field.modulus)
