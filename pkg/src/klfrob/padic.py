"""Truncated arithmetic in Z_p[pi]/(pi^M) with pi^{p-1} = -p.

An element is kept in coordinate form ``sum_{j<e} c_j pi^j`` (e = p-1) with
integer coordinates; the ideal (pi^M) is generated by ``p^{N_j} pi^j`` with
``N_j = ceil((M - j)/e)``, so each coordinate is reduced mod ``p^{N_j}``.  The
canonical digit expansion ``sum_i d_i pi^i`` with ``0 <= d_i < p`` is derived on
demand and is what serialization uses.

:class:`PiRational` is the exact field Q(pi) used where divisions by p occur;
values are reduced into :class:`PadicNum` once they are known to be integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cyclotomic import CycInt
from .finite_field import FieldDesc, is_prime, teichmuller_digit

INF = float("inf")


def vp(x, p: int) -> float:
    """p-adic valuation of an int or Fraction (inf for 0)."""
    if x == 0:
        return INF
    x = Fraction(x)
    n, d = x.numerator, x.denominator
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


@dataclass(frozen=True)
class PadicCfg:
    p: int
    M: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.M < 1:
            raise ValueError("precision M must be >= 1")

    @property
    def e(self) -> int:
        return self.p - 1

    def moduli(self) -> tuple[int, ...]:
        e, p, M = self.e, self.p, self.M
        return tuple(p ** max(0, -(-(M - j) // e)) for j in range(e))


def _reduce(cfg: PadicCfg, coords: Sequence[int]) -> tuple[int, ...]:
    return tuple(int(c) % m for c, m in zip(coords, cfg.moduli()))


@dataclass(frozen=True)
class PadicNum:
    cfg: PadicCfg
    coords: tuple[int, ...]

    # -- constructors ------------------------------------------------------
    @classmethod
    def make(cls, cfg: PadicCfg, coords: Sequence[int]) -> "PadicNum":
        coords = list(coords) + [0] * (cfg.e - len(coords))
        return cls(cfg, _reduce(cfg, coords))

    @classmethod
    def from_int(cls, cfg: PadicCfg, n: int) -> "PadicNum":
        return cls.make(cfg, [n])

    @classmethod
    def zero(cls, cfg: PadicCfg) -> "PadicNum":
        return cls.from_int(cfg, 0)

    @classmethod
    def one(cls, cfg: PadicCfg) -> "PadicNum":
        return cls.from_int(cfg, 1)

    @classmethod
    def pi(cls, cfg: PadicCfg) -> "PadicNum":
        if cfg.e == 1:
            return cls.from_int(cfg, -cfg.p)
        return cls.make(cfg, [0, 1])

    @classmethod
    def from_fraction(cls, cfg: PadicCfg, x) -> "PadicNum":
        x = Fraction(x)
        if vp(x, cfg.p) < 0:
            raise ArithmeticError(f"{x} is not p-integral")
        return cls.from_int(cfg, x.numerator) * cls.from_int(cfg, x.denominator).inv()

    @classmethod
    def from_digits(cls, cfg: PadicCfg, digits: Sequence[int]) -> "PadicNum":
        acc = cls.zero(cfg)
        pi = cls.pi(cfg)
        for d in reversed(list(digits)):
            acc = acc * pi + cls.from_int(cfg, d)
        return acc

    @classmethod
    def from_json(cls, data: dict) -> "PadicNum":
        return cls.from_digits(PadicCfg(int(data["p"]), int(data["M"])), data["digits"])

    def to_json(self) -> dict:
        return {"p": self.cfg.p, "M": self.cfg.M, "digits": self.digits}

    # -- structure ---------------------------------------------------------
    @property
    def digits(self) -> list[int]:
        """Little-endian base-p digits in pi (length M)."""
        cfg = self.cfg
        p, e = cfg.p, cfg.e
        c = list(self.coords)
        out = []
        for _ in range(cfg.M):
            d = c[0] % p
            out.append(d)
            c[0] -= d
            # divide by pi: c_0 / pi = (c_0 / p) * (p / pi) = -(c_0 / p) pi^{e-1}
            head = c[0] // p
            c = c[1:] + [0]
            c[e - 1] -= head
        return out

    def _coerce(self, other) -> "PadicNum":
        if isinstance(other, PadicNum):
            if other.cfg != self.cfg:
                raise ValueError("mixed p-adic configurations")
            return other
        if isinstance(other, int):
            return PadicNum.from_int(self.cfg, other)
        if isinstance(other, Fraction):
            return PadicNum.from_fraction(self.cfg, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicNum.make(self.cfg, [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self):
        return PadicNum.make(self.cfg, [-a for a in self.coords])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicNum.make(self.cfg, [a - b for a, b in zip(self.coords, o.coords)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        e, p = self.cfg.e, self.cfg.p
        out = [0] * e
        for i, a in enumerate(self.coords):
            if not a:
                continue
            for j, b in enumerate(o.coords):
                if not b:
                    continue
                k = i + j
                if k >= e:
                    out[k - e] -= p * a * b
                else:
                    out[k] += a * b
        return PadicNum.make(self.cfg, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PadicNum":
        if n < 0:
            return self.inv() ** (-n)
        result = PadicNum.one(self.cfg)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        o = self._coerce(other) if not isinstance(other, PadicNum) else other
        if o is NotImplemented:
            return NotImplemented
        return self.cfg == o.cfg and self.coords == o.coords

    def __hash__(self) -> int:
        return hash((self.cfg, self.coords))

    def __bool__(self) -> bool:
        return any(self.coords)

    def valuation(self) -> float:
        """pi-adic valuation; inf for zero mod pi^M."""
        e, p = self.cfg.e, self.cfg.p
        best = INF
        for j, c in enumerate(self.coords):
            if c:
                best = min(best, e * vp(c, p) + j)
        return best

    def is_unit(self) -> bool:
        return self.coords[0] % self.cfg.p != 0

    def inv(self) -> "PadicNum":
        if not self.is_unit():
            raise ArithmeticError("inverse of a non-unit")
        cfg = self.cfg
        x = PadicNum.from_int(cfg, pow(self.coords[0] % cfg.p, -1, cfg.p))
        prec = 1
        while prec < cfg.M:
            x = x * (2 - self * x)
            prec *= 2
        x = x * (2 - self * x)
        return x

    def divide_by_pi_power(self, v: int) -> "PadicNum":
        """self / pi^v when exactly divisible; the result lives at precision M - v."""
        if self.valuation() < v:
            raise ArithmeticError("not divisible by the requested power of pi")
        digits = self.digits[v:]
        return PadicNum.from_digits(PadicCfg(self.cfg.p, self.cfg.M - v), digits)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.is_unit():
            return self * o.inv()
        v = o.valuation()
        if v == INF:
            raise ZeroDivisionError("division by zero mod pi^M")
        if self.valuation() < v:
            raise ArithmeticError("inexact division by a non-unit")
        a = self.divide_by_pi_power(int(v))
        b = o.divide_by_pi_power(int(v))
        return a * b.inv()

    def to_precision(self, M: int) -> "PadicNum":
        return PadicNum.make(PadicCfg(self.cfg.p, M), self.coords)

    def __repr__(self) -> str:
        return f"PadicNum(p={self.cfg.p}, M={self.cfg.M}, digits={self.digits})"


def padic_arith(a: PadicNum, b: PadicNum | None, op: str) -> PadicNum:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inv()
    raise ValueError(f"unknown op {op!r}")


def teichmuller(a, cfg: PadicCfg) -> PadicNum:
    """Root of x^{p-1} = 1 congruent to a mod pi, by iterating x -> x^p."""
    if isinstance(a, int):
        d = a % cfg.p
    else:
        if getattr(a, "field", None) is not None and a.field.p != cfg.p:
            raise ValueError("characteristic mismatch")
        d = teichmuller_digit(a.field, a.value) if hasattr(a, "value") else int(a)
    if d == 0:
        return PadicNum.zero(cfg)
    x = PadicNum.from_int(cfg, d)
    for _ in range(cfg.M + 1):
        y = x ** cfg.p
        if y == x:
            return x
        x = y
    raise ArithmeticError("Teichmuller iteration did not stabilize")


# ---------------------------------------------------------------------------
# exact Q(pi)


@dataclass(frozen=True)
class PiRational:
    """sum_{j<e} c_j pi^j with rational c_j and pi^{p-1} = -p."""

    p: int
    coords: tuple[Fraction, ...]

    @classmethod
    def make(cls, p: int, coords: Sequence) -> "PiRational":
        e = p - 1
        c = [Fraction(x) for x in coords] + [Fraction(0)] * (e - len(coords))
        return cls(p, tuple(c))

    @classmethod
    def from_rational(cls, p: int, x) -> "PiRational":
        return cls.make(p, [x])

    @classmethod
    def pi_power(cls, p: int, k: int) -> "PiRational":
        """pi^k for k >= 0."""
        e = p - 1
        q, r = divmod(k, e)
        c = [Fraction(0)] * e
        c[r] = Fraction((-p) ** q)
        if e == 1:
            # pi = -p
            return cls(p, (Fraction((-p) ** k),))
        return cls(p, tuple(c))

    def _coerce(self, o) -> "PiRational":
        if isinstance(o, PiRational):
            return o
        if isinstance(o, (int, Fraction)):
            return PiRational.from_rational(self.p, o)
        return NotImplemented

    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return PiRational(self.p, tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return PiRational(self.p, tuple(-a for a in self.coords))

    def __sub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return PiRational(self.p, tuple(a - b for a, b in zip(self.coords, o.coords)))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            if o == 0:
                return PiRational(self.p, (Fraction(0),) * len(self.coords))
            return PiRational(self.p, tuple(a * o for a in self.coords))
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        e, p = self.p - 1, self.p
        if e == 1:
            return PiRational(p, (self.coords[0] * o.coords[0],))
        out = [Fraction(0)] * e
        for i, a in enumerate(self.coords):
            if not a:
                continue
            for j, b in enumerate(o.coords):
                if not b:
                    continue
                k = i + j
                if k >= e:
                    out[k - e] -= p * a * b
                else:
                    out[k] += a * b
        return PiRational(p, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction)):
            return PiRational(self.p, tuple(a / o for a in self.coords))
        return self * o.inv()

    def __bool__(self) -> bool:
        return any(self.coords)

    def __eq__(self, o) -> bool:
        o = self._coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return self.p == o.p and self.coords == o.coords

    def __hash__(self) -> int:
        return hash((self.p, self.coords))

    def valuation(self) -> float:
        """pi-adic valuation; terms c_j pi^j have distinct valuations mod e."""
        e = self.p - 1
        return min((e * vp(c, self.p) + j for j, c in enumerate(self.coords) if c), default=INF)

    def inv(self) -> "PiRational":
        """Inverse via the multiplication matrix of self on the basis pi^j."""
        e, p = self.p - 1, self.p
        if not self:
            raise ZeroDivisionError("inverse of zero")
        if e == 1:
            return PiRational(p, (1 / self.coords[0],))
        # columns: self * pi^j
        cols = []
        for j in range(e):
            cols.append((self * PiRational.pi_power(p, j)).coords)
        mat = [[cols[j][i] for j in range(e)] + [Fraction(1 if i == 0 else 0)] for i in range(e)]
        sol = solve_rational(mat)
        return PiRational(p, tuple(sol))

    def to_padic(self, cfg: PadicCfg) -> PadicNum:
        if cfg.p != self.p:
            raise ValueError("characteristic mismatch")
        if self.valuation() < 0:
            raise ArithmeticError("element is not integral")
        acc = PadicNum.zero(cfg)
        for j, c in enumerate(self.coords):
            if c:
                acc = acc + PadicNum.from_fraction(cfg, c) * (PadicNum.pi(cfg) ** j)
        return acc

    def __repr__(self) -> str:
        return f"PiRational(p={self.p}, {[str(c) for c in self.coords]})"


def solve_rational(aug: list[list[Fraction]]) -> list[Fraction]:
    """Solve a square linear system given as an augmented matrix over Q."""
    n = len(aug)
    m = [row[:] for row in aug]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ArithmeticError("singular system")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def dwork_exponential_coeffs(p: int, count: int) -> list[PiRational]:
    """Coefficients of exp(pi (t - t^p)) in t, exactly in Q(pi)."""
    out = []
    pis = [PiRational.pi_power(p, k) for k in range(count + 1)]
    for n in range(count):
        acc = PiRational.from_rational(p, 0)
        for j in range(n // p + 1):
            i = n - p * j
            coef = Fraction((-1) ** j, math.factorial(i) * math.factorial(j))
            acc = acc + pis[i + j] * coef
        out.append(acc)
    return out


def zeta_p(cfg: PadicCfg) -> PadicNum:
    """The p-th root of unity congruent to 1 + pi mod pi^2.

    Computed as Dwork's exponential exp(pi (t - t^p)) at t = 1, whose n-th
    coefficient has pi-adic valuation at least n (p-1)^2 / p^2, and then
    checked against Phi_p.
    """
    if cfg.M < 2:
        raise ValueError("the embedding of zeta_p needs M >= 2")
    p = cfg.p
    count = math.ceil((cfg.M + 1) * p * p / (p - 1) ** 2) + p + 1
    coeffs = dwork_exponential_coeffs(p, count)
    tail = min(c.valuation() for c in coeffs[-p:])
    if tail < cfg.M:
        raise ArithmeticError("Dwork exponential truncated too early")
    z = PadicNum.zero(cfg)
    for c in coeffs:
        if c.valuation() < cfg.M:
            z = z + c.to_padic(cfg)
    one = PadicNum.one(cfg)
    phi = PadicNum.zero(cfg)
    for k in range(p):
        phi = phi + z**k
    if phi:
        raise ArithmeticError("zeta_p lift failed the cyclotomic check")
    if (z - one - PadicNum.pi(cfg)).valuation() < 2:
        raise ArithmeticError("zeta_p lift has the wrong residue mod pi^2")
    return z


_ZETA_CACHE: dict[PadicCfg, PadicNum] = {}


def embed_zeta(c: CycInt, cfg: PadicCfg) -> PadicNum:
    """Image of c under zeta_p -> the root of unity congruent to 1 + pi."""
    if c.m != cfg.p:
        raise ValueError("cyclotomic order must equal p")
    z = _ZETA_CACHE.get(cfg)
    if z is None:
        z = _ZETA_CACHE[cfg] = zeta_p(cfg)
    acc = PadicNum.zero(cfg)
    zk = PadicNum.one(cfg)
    for coef in c.coeffs:
        if coef:
            acc = acc + zk * coef
        zk = zk * z
    return acc


# ---------------------------------------------------------------------------
# matrices and power series


class PadicMat:
    """Small dense square matrix over PadicNum."""

    def __init__(self, rows: Sequence[Sequence[PadicNum]]):
        self.rows = [list(r) for r in rows]
        self.r = len(self.rows)

    @classmethod
    def zero(cls, cfg: PadicCfg, r: int) -> "PadicMat":
        return cls([[PadicNum.zero(cfg) for _ in range(r)] for _ in range(r)])

    @classmethod
    def identity(cls, cfg: PadicCfg, r: int) -> "PadicMat":
        z = cls.zero(cfg, r)
        for i in range(r):
            z.rows[i][i] = PadicNum.one(cfg)
        return z

    def __add__(self, o: "PadicMat") -> "PadicMat":
        return PadicMat([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, o.rows)])

    def __sub__(self, o: "PadicMat") -> "PadicMat":
        return PadicMat([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, o.rows)])

    def __mul__(self, o):
        if isinstance(o, PadicMat):
            r = self.r
            out = []
            for i in range(r):
                row = []
                for j in range(r):
                    acc = self.rows[i][0] * o.rows[0][j]
                    for k in range(1, r):
                        acc = acc + self.rows[i][k] * o.rows[k][j]
                    row.append(acc)
                out.append(row)
            return PadicMat(out)
        return PadicMat([[a * o for a in row] for row in self.rows])

    __rmul__ = __mul__

    def __eq__(self, o) -> bool:
        return isinstance(o, PadicMat) and self.rows == o.rows

    def trace(self) -> PadicNum:
        acc = self.rows[0][0]
        for i in range(1, self.r):
            acc = acc + self.rows[i][i]
        return acc

    def valuation(self) -> float:
        return min(x.valuation() for row in self.rows for x in row)

    def to_json(self) -> list:
        return [[x.digits for x in row] for row in self.rows]


@dataclass
class PSeries:
    """Power series sum_k coeffs[k] x^k truncated at degree D = len(coeffs) - 1.

    Coefficients are PadicNum (scalar series) or PadicMat (matrix series).
    """

    coeffs: list

    @property
    def D(self) -> int:
        return len(self.coeffs) - 1

    def _zero_like(self):
        c = self.coeffs[0]
        if isinstance(c, PadicMat):
            return PadicMat.zero(c.rows[0][0].cfg, c.r)
        return PadicNum.zero(c.cfg)

    def __add__(self, o: "PSeries") -> "PSeries":
        D = min(self.D, o.D)
        return PSeries([self.coeffs[k] + o.coeffs[k] for k in range(D + 1)])

    def __sub__(self, o: "PSeries") -> "PSeries":
        D = min(self.D, o.D)
        return PSeries([self.coeffs[k] - o.coeffs[k] for k in range(D + 1)])

    def __mul__(self, o: "PSeries") -> "PSeries":
        D = min(self.D, o.D)
        out = []
        for k in range(D + 1):
            acc = self.coeffs[0] * o.coeffs[k]
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * o.coeffs[k - i]
            out.append(acc)
        return PSeries(out)

    def compose_xp(self, p: int) -> "PSeries":
        """f(x^p), truncated at the same degree."""
        z = self._zero_like()
        out = [z] * (self.D + 1)
        for k in range(0, self.D // p + 1):
            out[p * k] = self.coeffs[k]
        return PSeries(out)

    def delta(self) -> "PSeries":
        """x d/dx."""
        return PSeries([c * k for k, c in enumerate(self.coeffs)])

    def evaluate(self, x: PadicNum):
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc


def series_ops(f: PSeries, g: PSeries | None, op: str, p: int | None = None) -> PSeries:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "compose-xp":
        return f.compose_xp(p)
    if op == "delta":
        return f.delta()
    raise ValueError(f"unknown op {op!r}")
