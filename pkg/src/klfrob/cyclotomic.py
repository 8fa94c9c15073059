"""Exact arithmetic in Z[zeta_m] for prime m.

A :class:`CycInt` stores coordinates in the basis ``1, zeta, ..., zeta^{m-2}``;
``zeta^{m-1}`` is eliminated with ``1 + zeta + ... + zeta^{m-1} = 0``.  For
``m = 2`` this is just Z with ``zeta = -1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .finite_field import is_prime

INF = float("inf")


def _reduce_full(m: int, full: Sequence[int]) -> tuple[int, ...]:
    """Reduce a length-m vector (coefficients of zeta^0..zeta^{m-1})."""
    top = full[m - 1]
    return tuple(int(full[i]) - int(top) for i in range(m - 1))


@dataclass(frozen=True)
class CycInt:
    m: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.m - 1:
            raise ValueError(f"expected {self.m - 1} coordinates for m={self.m}")

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, m: int) -> "CycInt":
        return cls(m, (0,) * (m - 1))

    @classmethod
    def from_int(cls, m: int, n: int) -> "CycInt":
        return cls(m, (int(n),) + (0,) * (m - 2))

    @classmethod
    def one(cls, m: int) -> "CycInt":
        return cls.from_int(m, 1)

    @classmethod
    def zeta(cls, m: int, t: int = 1) -> "CycInt":
        full = [0] * m
        full[t % m] = 1
        return cls(m, _reduce_full(m, full))

    @classmethod
    def from_counts(cls, m: int, counts: Sequence[int]) -> "CycInt":
        """``sum_t counts[t] * zeta^t`` for t in Z/m."""
        if len(counts) != m:
            raise ValueError("counts must have length m")
        return cls(m, _reduce_full(m, [int(c) for c in counts]))

    @classmethod
    def from_json(cls, data: dict) -> "CycInt":
        return cls(int(data["m"]), tuple(int(c) for c in data["coeffs"]))

    def to_json(self) -> dict:
        return {"m": self.m, "coeffs": list(self.coeffs)}

    # -- helpers -----------------------------------------------------------
    def full(self) -> list[int]:
        return list(self.coeffs) + [0]

    def _coerce(self, other) -> "CycInt":
        if isinstance(other, CycInt):
            if other.m != self.m:
                raise ValueError(f"mixed orders {self.m} and {other.m}")
            return other
        if isinstance(other, int):
            return CycInt.from_int(self.m, other)
        return NotImplemented

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycInt(self.m, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.m, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycInt(self.m, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return CycInt(self.m, tuple(a * other for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        m = self.m
        full = [0] * m
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        full[(i + j) % m] += a * b
        return CycInt(m, _reduce_full(m, full))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "CycInt":
        if e < 0:
            raise ValueError("negative powers are not integral")
        result = CycInt.one(self.m)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def is_integer(self) -> bool:
        return not any(self.coeffs[1:])

    def __int__(self) -> int:
        if not self.is_integer():
            raise ValueError(f"{self} is not a rational integer")
        return self.coeffs[0]

    def divisible_by(self, n: int) -> bool:
        return all(c % n == 0 for c in self.coeffs)

    def exact_div(self, n: int) -> "CycInt":
        if not self.divisible_by(n):
            raise ArithmeticError(f"{self} is not divisible by {n}")
        return CycInt(self.m, tuple(c // n for c in self.coeffs))

    def galois(self, c: int) -> "CycInt":
        """Apply the automorphism zeta -> zeta^c."""
        m = self.m
        if c % m == 0:
            raise ValueError("exponent must be prime to m")
        full = [0] * m
        for i, a in enumerate(self.coeffs):
            full[(i * c) % m] += a
        return CycInt(m, _reduce_full(m, full))

    def conj(self) -> "CycInt":
        return self.galois(-1)

    def norm(self) -> int:
        """Absolute norm: product of all Galois conjugates (a rational integer)."""
        acc = CycInt.one(self.m)
        for c in range(1, self.m):
            acc = acc * self.galois(c)
        return int(acc)

    def complex_embed(self, j: int = 1) -> complex:
        return complex_embed(self, j)

    def lambda_valuation(self):
        return lambda_valuation(self)

    def __repr__(self) -> str:
        if self.m == 2 or self.is_integer():
            return f"{self.coeffs[0]}"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*z^{i}")
        return "(" + (" + ".join(terms) or "0") + ")"


def cyc_sum(values: Iterable[CycInt], m: int) -> CycInt:
    acc = [0] * (m - 1)
    for v in values:
        for i, c in enumerate(v.coeffs):
            acc[i] += c
    return CycInt(m, tuple(acc))


def cyc_arith(a: CycInt, b: CycInt, op: str) -> CycInt:
    if a.m != b.m:
        raise ValueError(f"mixed orders {a.m} and {b.m}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def complex_embed(a: CycInt, j: int = 1) -> complex:
    m = a.m
    if math.gcd(j, m) != 1:
        raise ValueError(f"embedding index {j} not prime to {m}")
    w = cmath.exp(2j * math.pi * j / m)
    return sum(c * w**i for i, c in enumerate(a.coeffs))


def divide_by_one_minus_zeta(a: CycInt) -> CycInt | None:
    """Return b with a = (1 - zeta) b, or None when (1 - zeta) does not divide a."""
    m = a.m
    full = a.full()
    s = sum(full)
    if s % m:
        return None
    # subtract (s/m) * (1 + zeta + ... + zeta^{m-1}), which is zero in Z[zeta]
    k = s // m
    full = [c - k for c in full]
    # now full(1) = 0; synthetic division of full(x) by (1 - x) = -(x - 1)
    deg = m - 1
    quot = [0] * deg
    carry = 0
    for i in range(deg, 0, -1):
        carry += full[i]
        quot[i - 1] = carry
    assert carry + full[0] == 0
    # full(x) = (x - 1) * quot(x), hence a = (1 - zeta) * (-quot)
    qfull = [-c for c in quot] + [0] * (m - deg)
    return CycInt(m, _reduce_full(m, qfull[:m]))


def lambda_valuation(a: CycInt) -> Fraction | float:
    """v_p(a) normalized by v_p(p) = 1, via repeated division by (1 - zeta_p)."""
    m = a.m
    if not is_prime(m):
        raise ValueError("lambda valuation needs prime m")
    if not a:
        return INF
    count = 0
    while True:
        b = divide_by_one_minus_zeta(a)
        if b is None:
            break
        a = b
        count += 1
    return Fraction(count, m - 1)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaledCyc:
    """The number ``num * (-sqrt(q))^{-k}``, kept with k reduced by 2 while q | num."""

    num: CycInt
    k: int
    q: int

    @classmethod
    def make(cls, num: CycInt, k: int, q: int) -> "ScaledCyc":
        if k < 0:
            # (-sqrt q)^{-k} with k even is a power of q; odd negative k is rejected
            if k % 2:
                raise ValueError("odd negative scaling exponent")
            num = num * (q ** (-k // 2))
            k = 0
        while k >= 2 and num and num.divisible_by(q):
            num = num.exact_div(q)
            k -= 2
        if not num:
            k = 0
        return cls(num, k, q)

    def canonical(self) -> "ScaledCyc":
        return ScaledCyc.make(self.num, self.k, self.q)

    def to_json(self) -> dict:
        d = self.num.to_json()
        d.update({"k": self.k, "q": self.q})
        return d

    @classmethod
    def from_json(cls, data: dict) -> "ScaledCyc":
        return cls.make(CycInt.from_json(data), int(data["k"]), int(data["q"]))

    def complex_value(self, j: int = 1) -> complex:
        return complex_embed(self.num, j) * (-math.sqrt(self.q)) ** (-self.k)

    def __mul__(self, other: "ScaledCyc") -> "ScaledCyc":
        if other.q != self.q:
            raise ValueError("different q")
        return ScaledCyc.make(self.num * other.num, self.k + other.k, self.q)


def _isqrt_exact(n: int) -> int | None:
    r = math.isqrt(n)
    return r if r * r == n else None


def scaled_equal(a: ScaledCyc, b: ScaledCyc, rel_tol: float = 1e-6) -> tuple[bool, dict]:
    """Compare two scaled values exactly; returns ``(equal, certificate)``."""
    if a.q != b.q:
        raise ValueError("scaled values with different q")
    q = a.q
    a, b = a.canonical(), b.canonical()
    cert: dict = {"q": q, "k_a": a.k, "k_b": b.k}
    if (a.k - b.k) % 2 == 0:
        # a.num * q^{(K - a.k)/2} == b.num * q^{(K - b.k)/2}
        K = max(a.k, b.k)
        lhs = a.num * q ** ((K - a.k) // 2)
        rhs = b.num * q ** ((K - b.k) // 2)
        cert["path"] = "same-parity"
        return lhs == rhs, cert
    root = _isqrt_exact(q)
    if root is not None:
        # (-sqrt q) is the integer -root: clear denominators exactly
        K = max(a.k, b.k)
        lhs = a.num * ((-root) ** (K - a.k))
        rhs = b.num * ((-root) ** (K - b.k))
        cert["path"] = "integral-sqrt"
        return lhs == rhs, cert
    # squared equality: num_a^2 q^{k_b} == num_b^2 q^{k_a}
    sq_ok = a.num * a.num * q**b.k == b.num * b.num * q**a.k
    va, vb = a.complex_value(1), b.complex_value(1)
    scale = max(abs(va), abs(vb), 1e-300)
    sign_ok = abs(va - vb) <= rel_tol * scale
    cert.update({"path": "squared+sign", "squared_equal": sq_ok, "sign_agrees": sign_ok,
                 "embedded_a": [va.real, va.imag], "embedded_b": [vb.real, vb.imag]})
    return sq_ok and sign_ok, cert
