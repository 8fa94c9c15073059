"""Finite fields F_{p^s} in a polynomial basis.

Elements are encoded as integers ``c_0 + c_1 p + ... + c_{s-1} p^{s-1}`` where
``c_0 + c_1 t + ... + c_{s-1} t^{s-1}`` is the residue class modulo the field's
defining polynomial.  :class:`FqElem` wraps such a code together with its
:class:`FieldDesc` for convenient operator syntax; the integer-level helpers
are what the vectorized sum kernels use.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

MAX_FIELD_SIZE = 2**20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# polynomials over F_p as little-endian lists without trailing zeros


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _poly_divmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    a = list(a)
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    while len(_trim(a)) >= len(b):
        shift = len(a) - len(b)
        c = (a[-1] * inv) % p
        quot[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = (a[shift + i] - c * y) % p
        _trim(a)
    return _trim(quot), a


def _poly_sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _poly_gcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_divmod(a, b, p)[1]
    return a


def _poly_powmod(base: Sequence[int], e: int, mod: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _poly_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _poly_divmod(_poly_mul(result, base, p), mod, p)[1]
        base = _poly_divmod(_poly_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Rabin-style test: x^{p^s} = x mod f and gcd(x^{p^k} - x, f) = 1 for k < s."""
    f = _trim([c % p for c in modulus])
    s = len(f) - 1
    if s < 1:
        return False
    if s == 1:
        return True
    x = [0, 1]
    power = x
    for k in range(1, s):
        power = _poly_powmod(power, p, f, p)
        if len(_poly_gcd(f, _poly_sub(power, x, p), p)) > 1:
            return False
    power = _poly_powmod(power, p, f, p)
    return _poly_sub(power, x, p) == []


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldDesc:
    """Descriptor of F_q, q = p^s; ``modulus`` is ``(c_0, ..., c_{s-1}, 1)``."""

    p: int
    s: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.s

    def to_json(self) -> dict:
        return {"p": self.p, "s": self.s, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, data: dict) -> "FieldDesc":
        return make_field(data["p"], data["s"], data["modulus"])

    def __call__(self, value) -> "FqElem":
        return elem(self, value)

    def __repr__(self) -> str:
        return f"F_{self.q}(modulus={list(self.modulus)})"


@functools.lru_cache(maxsize=None)
def make_field(p: int, s: int = 1, modulus: Sequence[int] | None = None) -> FieldDesc:
    """Build F_{p^s}.

    Without an explicit modulus the monic irreducible polynomial of degree ``s``
    with the smallest code ``sum c_i p^i`` is used (lexicographically least when
    the coefficients are read from the top down).  For ``s = 1`` the modulus is
    ``x`` so prime-field elements are their own constant coefficient.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if s < 1:
        raise ValueError("extension degree must be >= 1")
    if p**s > MAX_FIELD_SIZE:
        raise ValueError(f"field size {p}^{s} exceeds the cap {MAX_FIELD_SIZE}")
    if modulus is not None:
        mod = tuple(int(c) % p for c in modulus)
        if len(mod) != s + 1 or mod[-1] != 1:
            raise ValueError("modulus must be monic of degree s")
        if not is_irreducible(mod, p):
            raise ValueError(f"modulus {list(mod)} is reducible over F_{p}")
        return FieldDesc(p, s, mod)
    if s == 1:
        return FieldDesc(p, 1, (0, 1))
    for code in range(p**s):
        low = [(code // p**i) % p for i in range(s)]
        if low[0] == 0:
            continue
        cand = tuple(low) + (1,)
        if is_irreducible(cand, p):
            return FieldDesc(p, s, cand)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------
# integer-code arithmetic


def to_coeffs(field: FieldDesc, x: int) -> list[int]:
    p = field.p
    out = []
    for _ in range(field.s):
        x, r = divmod(x, p)
        out.append(r)
    return out


def from_coeffs(field: FieldDesc, coeffs: Sequence[int]) -> int:
    p = field.p
    value = 0
    for c in reversed(list(coeffs)[: field.s]):
        value = value * p + (c % p)
    return value


def add(field: FieldDesc, x: int, y: int) -> int:
    p = field.p
    if p == 2:
        return x ^ y
    if field.s == 1:
        return (x + y) % p
    out, scale = 0, 1
    while x or y:
        out += ((x % p + y % p) % p) * scale
        x //= p
        y //= p
        scale *= p
    return out


def neg(field: FieldDesc, x: int) -> int:
    p = field.p
    if p == 2:
        return x
    if field.s == 1:
        return (-x) % p
    out, scale = 0, 1
    while x:
        out += ((-(x % p)) % p) * scale
        x //= p
        scale *= p
    return out


def sub(field: FieldDesc, x: int, y: int) -> int:
    return add(field, x, neg(field, y))


@functools.lru_cache(maxsize=None)
def _reduction_rows(field: FieldDesc) -> tuple[tuple[int, ...], ...]:
    """Coefficient vectors of t^{s+i} mod modulus for 0 <= i < s-1."""
    p, s = field.p, field.s
    low = [(-c) % p for c in field.modulus[:s]]
    rows = [tuple(low)]
    for _ in range(s - 2):
        prev = rows[-1]
        top = prev[-1]
        nxt = [0] + list(prev[:-1])
        nxt = [(nxt[i] + top * low[i]) % p for i in range(s)]
        rows.append(tuple(nxt))
    return tuple(rows)


def mul(field: FieldDesc, x: int, y: int) -> int:
    p, s = field.p, field.s
    if s == 1:
        return (x * y) % p
    a = to_coeffs(field, x)
    b = to_coeffs(field, y)
    prod = [0] * (2 * s - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    out = prod[:s]
    for i, row in enumerate(_reduction_rows(field)):
        c = prod[s + i]
        if c:
            for j in range(s):
                out[j] += c * row[j]
    return from_coeffs(field, out)


def power(field: FieldDesc, x: int, e: int) -> int:
    q = field.q
    if e < 0:
        x = inv(field, x)
        e = -e
    if x == 0:
        return 0 if e else 1
    e %= q - 1
    result = 1
    while e:
        if e & 1:
            result = mul(field, result, x)
        x = mul(field, x, x)
        e >>= 1
    return result


def inv(field: FieldDesc, x: int) -> int:
    if x == 0:
        raise ZeroDivisionError("inverse of zero in a finite field")
    return power(field, x, field.q - 2)


def frobenius(field: FieldDesc, x: int, k: int = 1) -> int:
    return power(field, x, field.p**k) if x else 0


def trace(field: FieldDesc, x: int) -> int:
    """Absolute trace Tr_{F_q/F_p}(x) as an integer in [0, p)."""
    if field.s == 1:
        return x % field.p
    basis = _trace_basis(field)
    return sum(c * t for c, t in zip(to_coeffs(field, x), basis)) % field.p


@functools.lru_cache(maxsize=None)
def _trace_basis(field: FieldDesc) -> tuple[int, ...]:
    out = []
    for i in range(field.s):
        x = field.p**i  # code of t^i
        total = 0
        y = x
        for _ in range(field.s):
            total = add(field, total, y)
            y = power(field, y, field.p)
        assert total < field.p
        out.append(total)
    return tuple(out)


def norm(field: FieldDesc, x: int, sub_degree: int = 1) -> int:
    """Norm to the subfield of degree ``sub_degree``; the result is a code of F_q."""
    if field.s % sub_degree:
        raise ValueError(f"{sub_degree} does not divide {field.s}")
    if x == 0:
        return 0
    sub_q = field.p**sub_degree
    return power(field, x, (field.q - 1) // (sub_q - 1))


def is_square(field: FieldDesc, x: int) -> bool:
    if x == 0 or field.p == 2:
        return True
    return power(field, x, (field.q - 1) // 2) == 1


def units(field: FieldDesc) -> range:
    return range(1, field.q)


def units_iter(field: FieldDesc) -> Iterator["FqElem"]:
    for v in range(1, field.q):
        yield FqElem(field, v)


def teichmuller_digit(x: "FqElem | int", field: FieldDesc | None = None) -> int:
    if isinstance(x, FqElem):
        field, value = x.field, x.value
    else:
        value = x
    if field is not None and field.s != 1:
        raise ValueError("Teichmueller digits are only defined on the prime field")
    return int(value)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FqElem:
    field: FieldDesc
    value: int

    @property
    def coeffs(self) -> list[int]:
        return to_coeffs(self.field, self.value)

    def _other(self, other) -> int:
        if isinstance(other, FqElem):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other.value
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return FqElem(self.field, add(self.field, self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return FqElem(self.field, sub(self.field, self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        return FqElem(self.field, sub(self.field, o, self.value))

    def __neg__(self):
        return FqElem(self.field, neg(self.field, self.value))

    def __mul__(self, other):
        o = self._other(other)
        return FqElem(self.field, mul(self.field, self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return FqElem(self.field, mul(self.field, self.value, inv(self.field, o)))

    def __rtruediv__(self, other):
        o = self._other(other)
        return FqElem(self.field, mul(self.field, o, inv(self.field, self.value)))

    def __pow__(self, e: int):
        return FqElem(self.field, power(self.field, self.value, e))

    def __bool__(self) -> bool:
        return self.value != 0

    def trace(self) -> int:
        return trace(self.field, self.value)

    def norm(self, sub_degree: int = 1) -> "FqElem":
        return FqElem(self.field, norm(self.field, self.value, sub_degree))

    def __repr__(self) -> str:
        if self.field.s == 1:
            return f"{self.value}"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else (f"{c}*t" if i == 1 else f"{c}*t^{i}"))
        return " + ".join(reversed(terms)) or "0"


def elem(field: FieldDesc, value) -> FqElem:
    if isinstance(value, FqElem):
        return value
    if isinstance(value, (list, tuple)):
        return FqElem(field, from_coeffs(field, value))
    v = int(value)
    if field.s == 1:
        v %= field.p
    elif not 0 <= v < field.q:
        raise ValueError(f"code {v} out of range for {field}")
    return FqElem(field, v)


# ---------------------------------------------------------------------------
# discrete-log tables


@dataclass(frozen=True)
class FieldTables:
    """Exponential/logarithm/trace tables with respect to a fixed generator.

    ``exp[l]`` is the code of g^l for 0 <= l < q-1, ``log[code]`` the inverse
    map (``log[0] = -1``) and ``trace[l] = Tr(g^l)``.
    """

    field: FieldDesc
    generator: int
    exp: np.ndarray
    log: np.ndarray
    trace: np.ndarray

    @property
    def order(self) -> int:
        return self.field.q - 1

    def log_of(self, x: int) -> int:
        if x == 0:
            raise ValueError("log of zero")
        return int(self.log[x])


def primitive_element(field: FieldDesc) -> int:
    q = field.q
    if q == 2:
        return 1
    ells = prime_factors(q - 1)
    for g in range(1, q):
        if all(power(field, g, (q - 1) // ell) != 1 for ell in ells):
            return g
    raise AssertionError("no generator")  # pragma: no cover


@functools.lru_cache(maxsize=32)
def field_tables(field: FieldDesc) -> FieldTables:
    p, s, q = field.p, field.s, field.q
    g = primitive_element(field)
    L = q - 1
    # multiplication by g as an F_p-linear map on coefficient vectors
    mat = np.zeros((s, s), dtype=np.int64)
    for j in range(s):
        col = to_coeffs(field, mul(field, g, p**j))
        mat[:, j] = col
    digits = np.zeros((L, s), dtype=np.int64)
    v = np.zeros(s, dtype=np.int64)
    v[0] = 1
    for l in range(L):
        digits[l] = v
        v = (mat @ v) % p
    weights = p ** np.arange(s, dtype=np.int64)
    exp = digits @ weights
    log = np.full(q, -1, dtype=np.int64)
    log[exp] = np.arange(L, dtype=np.int64)
    tb = np.array(_trace_basis(field), dtype=np.int64)
    tr = (digits @ tb) % p
    return FieldTables(field, g, exp, log, tr.astype(np.int64))


# ---------------------------------------------------------------------------
# extensions


@dataclass(frozen=True)
class Extension:
    """F_{q^m} together with an explicit embedding of F_q."""

    base: FieldDesc
    big: FieldDesc
    degree: int
    root: int  # image of the base generator t (code in big)

    def embed(self, x: int) -> int:
        if self.base.s == 1:
            return x % self.base.p
        out = 0
        pw = 1
        for c in to_coeffs(self.base, x):
            if c:
                out = add(self.big, out, mul(self.big, c % self.base.p, pw))
            pw = mul(self.big, pw, self.root)
        return out


@functools.lru_cache(maxsize=None)
def extension(field: FieldDesc, m: int) -> Extension:
    big = make_field(field.p, field.s * m)
    if field.s == 1:
        return Extension(field, big, m, 0)
    if m == 1:
        return Extension(field, field, 1, field.p)
    tabs = field_tables(big)
    step = (big.q - 1) // (field.q - 1)
    mod = field.modulus
    for j in range(field.q - 1):
        beta = int(tabs.exp[(j * step) % tabs.order])
        acc = 0
        for c in reversed(mod):
            acc = add(big, mul(big, acc, beta), c)
        if acc == 0:
            return Extension(field, big, m, beta)
    raise AssertionError("no root of the base modulus in the extension")  # pragma: no cover
