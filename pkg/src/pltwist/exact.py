"""Exact scalar arithmetic and number-theoretic helpers.

Rationals are ``fractions.Fraction`` (arbitrary precision, always in
lowest terms); this module adds the dyadic/power-of-two views and the
small solvers the decision procedures consume.  No floating point is
used anywhere in the package.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional, Tuple

Rat = Fraction


def rat(n, d=1) -> Rat:
    return Fraction(n, d)


def rat_str(x: Rat) -> str:
    """Canonical text form ``num/den`` in lowest terms."""
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s: str) -> Rat:
    s = s.strip()
    if "/" in s:
        a, b = s.split("/", 1)
        num = int(a)
        den = int(b)
        if den == 0:
            raise ValueError(f"zero denominator in rational {s!r}")
        return Fraction(num, den)
    return Fraction(int(s))


class Dyadic:
    """Dyadic rational m * 2^e with odd (or zero) mantissa."""

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa: int, exponent: int = 0):
        while mantissa != 0 and mantissa % 2 == 0:
            mantissa //= 2
            exponent += 1
        if mantissa == 0:
            exponent = 0
        self.mantissa = mantissa
        self.exponent = exponent

    @staticmethod
    def from_rat(x: Rat) -> "Dyadic":
        d = x.denominator
        e = 0
        while d % 2 == 0:
            d //= 2
            e += 1
        if d != 1:
            raise ValueError(f"{x} is not dyadic")
        return Dyadic(x.numerator, -e)

    def to_rat(self) -> Rat:
        if self.exponent >= 0:
            return Fraction(self.mantissa * 2**self.exponent)
        return Fraction(self.mantissa, 2**-self.exponent)

    def __eq__(self, other):
        return (
            isinstance(other, Dyadic)
            and self.mantissa == other.mantissa
            and self.exponent == other.exponent
        )

    def __hash__(self):
        return hash((self.mantissa, self.exponent))

    def __repr__(self):
        return f"{self.mantissa}*2^{self.exponent}"


def is_dyadic(x: Rat) -> bool:
    d = x.denominator
    return d & (d - 1) == 0


class Pow2:
    """Strictly positive power of two, closed under product and inverse."""

    __slots__ = ("exponent",)

    def __init__(self, exponent: int):
        self.exponent = exponent

    @staticmethod
    def from_rat(x: Rat) -> "Pow2":
        e = log2_exact(x)
        if e is None:
            raise ValueError(f"{x} is not a power of 2")
        return Pow2(e)

    def to_rat(self) -> Rat:
        if self.exponent >= 0:
            return Fraction(2**self.exponent)
        return Fraction(1, 2**-self.exponent)

    def __mul__(self, other: "Pow2") -> "Pow2":
        return Pow2(self.exponent + other.exponent)

    def inverse(self) -> "Pow2":
        return Pow2(-self.exponent)

    def __eq__(self, other):
        return isinstance(other, Pow2) and self.exponent == other.exponent

    def __hash__(self):
        return hash(("Pow2", self.exponent))

    def __repr__(self):
        return f"2^{self.exponent}"


def log2_exact(x: Rat) -> Optional[int]:
    """e with x = 2^e, or None when x is not a power of two."""
    if x <= 0:
        return None
    n, d = x.numerator, x.denominator
    if n == 1:
        if d & (d - 1) == 0:
            return -(d.bit_length() - 1)
        return None
    if d == 1:
        if n & (n - 1) == 0:
            return n.bit_length() - 1
        return None
    return None


def decompose_odd(alpha: Rat) -> Tuple[int, int, int]:
    """Write alpha = 2^t * m / n with m, n odd and coprime.

    Zero is returned as the tagged triple (0, 0, 1); callers treat it as
    a point like any dyadic.
    """
    if alpha == 0:
        return (0, 0, 1)
    num, den = alpha.numerator, alpha.denominator
    t = 0
    while num % 2 == 0:
        num //= 2
        t += 1
    while den % 2 == 0:
        den //= 2
        t -= 1
    return (t, num, den)


def mult_order_2(n: int) -> int:
    """Multiplicative order of 2 modulo odd n >= 1."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("modulus must be odd and positive")
    if n == 1:
        return 1
    r = 1
    v = 2 % n
    while v != 1:
        v = (v * 2) % n
        r += 1
    return r


def two_power_residue(m: int, p: int, n: int) -> Optional[int]:
    """Least R >= 0 with p = 2^R * m (mod n), or None.

    Search is bounded by the multiplicative order of 2 mod n, so absence
    is decided exactly.
    """
    if n <= 0 or n % 2 == 0:
        raise ValueError("modulus must be odd and positive")
    if gcd(m, n) != 1 or gcd(p, n) != 1:
        raise ValueError("m and p must be units modulo n")
    if n == 1:
        return 0
    target = p % n
    v = m % n
    for r in range(mult_order_2(n)):
        if v == target:
            return r
        v = (v * 2) % n
    return None


class DiophSolution:
    """Solutions of k*a + l*b = c over Z^2.

    kind is one of ``empty``, ``all`` (a = b = c = 0), or ``line``: the
    family (k0 + j*dk, l0 + j*dl) for j in Z.
    """

    __slots__ = ("kind", "base", "direction")

    def __init__(self, kind, base=None, direction=None):
        self.kind = kind
        self.base = base
        self.direction = direction

    def __iter__(self):
        yield self.kind
        yield self.base
        yield self.direction

    def contains(self, k: int, l: int) -> bool:
        if self.kind == "empty":
            return False
        if self.kind == "all":
            return True
        k0, l0 = self.base
        dk, dl = self.direction
        if dk != 0:
            if (k - k0) % dk:
                return False
            j = (k - k0) // dk
            return l0 + j * dl == l
        if dl != 0:
            if (l - l0) % dl:
                return False
            j = (l - l0) // dl
            return k0 + j * dk == k
        return k == k0 and l == l0

    def __repr__(self):
        if self.kind == "line":
            return f"DiophSolution(line, base={self.base}, dir={self.direction})"
        return f"DiophSolution({self.kind})"


def ext_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
        old_t, t = t, old_t - qt * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def lin_dioph(a: int, b: int, c: int) -> DiophSolution:
    """Classify integer solutions of k*a + l*b = c."""
    if a == 0 and b == 0:
        return DiophSolution("all") if c == 0 else DiophSolution("empty")
    g, x, y = ext_gcd(a, b)
    if c % g:
        return DiophSolution("empty")
    mul = c // g
    k0, l0 = x * mul, y * mul
    # direction generating the kernel of (a, b)
    dk, dl = b // g, -a // g
    return DiophSolution("line", (k0, l0), (dk, dl))
