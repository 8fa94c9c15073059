"""Frobenius structures on Bessel connections as truncated matrix power series.

A connection ``d + A(x) dx/x`` with ``A(x) = A0 + A1 x`` (A0 the single-chain
nilpotent, A1 a multiple of ``(-pi)^h``) carries a Frobenius matrix phi(x)
satisfying

    delta(phi) + phi A(x) = p A(x^p) phi,        delta = x d/dx.

In degree k this reads ``k phi_k + phi_k A0 - p A0 phi_k = p A1 phi_{k-p} -
phi_{k-1} A1``.  The operator ``X -> X A0 - p A0 X`` is nilpotent, so each step
is a finite Neumann series.  Degree 0 forces ``phi_0 A0 = p A0 phi_0``, whose
solutions are ``Dg P(A0)`` with ``Dg = diag(p^{r-1}, ..., p, 1)`` and P any
polynomial.  Only one choice of P gives an overconvergent series; it is found
by solving all r basis series and choosing the combination whose top-degree
coefficients vanish (the other directions blow up p-adically).

All arithmetic in the solver is exact in Q(pi); results are reduced into
``Z_p[pi]/(pi^M)`` at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from . import finite_field as ff
from .cyclotomic import CycInt
from .padic import (INF, PadicCfg, PadicMat, PadicNum, PiRational, embed_zeta,
                    teichmuller)

Entry = tuple[int, int, Fraction]  # (row, column, coefficient)

LABELS = ("GLn", "SO2n1", "scalar-hypergeometric")


@dataclass(frozen=True)
class ConnectionSpec:
    """A(x) = A0 + A1 x with A1 = (-pi)^h * (integer or rational matrix) times ``a1_scale``."""

    label: str
    n: int
    p: int
    r: int
    A0: tuple[Entry, ...]
    A1: tuple[Entry, ...]
    h: int
    a1_scale: int = 1  # overall sign multiplying (-pi)^h
    pi_power: int | None = None  # exponent of pi in A1 when it is not (-pi)^h
    scalar_rank: int = 0
    scalar_poly: tuple[Fraction, ...] = ()  # P(delta) in delta^r y = K x P(delta) y

    @property
    def lam_h(self) -> PiRational:
        """The scalar multiplying the integer pattern of A1."""
        if self.pi_power is not None:
            return PiRational.pi_power(self.p, self.pi_power) * self.a1_scale
        return PiRational.pi_power(self.p, self.h) * ((-1) ** self.h * self.a1_scale)

    def a1_entries(self) -> list[tuple[int, int, PiRational]]:
        lam = self.lam_h
        return [(i, j, lam * c) for i, j, c in self.A1]

    def dense(self, which: str) -> list[list[Fraction]]:
        src = self.A0 if which == "A0" else self.A1
        m = [[Fraction(0)] * self.r for _ in range(self.r)]
        for i, j, c in src:
            m[i][j] += c
        return m

    def to_json(self) -> dict:
        return {"label": self.label, "n": self.n, "p": self.p, "r": self.r, "h": self.h,
                "A0": [[i, j, str(c)] for i, j, c in self.A0],
                "A1_pattern": [[i, j, str(c)] for i, j, c in self.A1],
                "A1_scalar": [str(c) for c in self.lam_h.coords]}


def _chain(r: int) -> tuple[Entry, ...]:
    return tuple((i, i + 1, Fraction(1)) for i in range(r - 1))


def connection_preset(label: str, n: int, p: int) -> ConnectionSpec:
    if not ff.is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n < 1:
        raise ValueError("n must be >= 1")
    if label == "GLn":
        # N + (-pi)^n x E_{n,1}; scalar form delta^n y = (-pi)^n x y
        return ConnectionSpec(label, n, p, n, _chain(n), ((n - 1, 0, Fraction(1)),), h=n,
                              scalar_rank=n, scalar_poly=(Fraction(1),))
    if label == "SO2n1":
        # N + (-pi)^{2n} x E, E = 2 at the 1-indexed positions (2n, 1) and (2n+1, 2)
        r = 2 * n + 1
        a1 = ((r - 2, 0, Fraction(2)), (r - 1, 1, Fraction(2)))
        return ConnectionSpec(label, n, p, r, _chain(r), a1, h=2 * n,
                              scalar_rank=r, scalar_poly=(Fraction(2), Fraction(4)))
    if label == "scalar-hypergeometric":
        # delta^n - (-1)^{n+p} pi^{n-1} x (delta - 1/2), companion form on (y, delta y, ...)
        if p == 2:
            raise ValueError("the quadratic parameter 1/2 needs odd p")
        if n < 2:
            raise ValueError("need n >= 2 for one quadratic parameter")
        sign = (-1) ** (n + p)
        a1 = ((n - 1, 0, Fraction(-1, 2)), (n - 1, 1, Fraction(1)))
        return ConnectionSpec(label, n, p, n, _chain(n), a1, h=n - 1, a1_scale=sign,
                              pi_power=n - 1, scalar_rank=n,
                              scalar_poly=(Fraction(-1, 2), Fraction(1)))
    raise ValueError(f"unsupported connection label {label!r}")


# ---------------------------------------------------------------------------
# scalar solution at 0


@dataclass
class ODESeries:
    spec: ConnectionSpec
    exact: list[PiRational]
    residual_zero: bool
    min_valuation: float

    def padic(self, cfg: PadicCfg) -> list[PadicNum]:
        return [c.to_padic(cfg) for c in self.exact]


def ode_solution_series(spec: ConnectionSpec, D: int) -> ODESeries:
    """Holomorphic solution with y(0) = 1 of delta^r y = K x P(delta) y."""
    p = spec.p
    K = spec.lam_h
    poly = spec.scalar_poly
    rank = spec.scalar_rank

    def P(t: int) -> Fraction:
        return sum((c * t**i for i, c in enumerate(poly)), Fraction(0))

    coeffs = [PiRational.from_rational(p, 1)]
    for r in range(1, D + 1):
        coeffs.append(coeffs[-1] * K * (P(r - 1) / Fraction(r) ** rank))
    # verify the equation coefficientwise: r^rank y_r - K P(r-1) y_{r-1} = 0
    ok = all(coeffs[r] * (r**rank) - coeffs[r - 1] * K * P(r - 1) == 0 for r in range(1, D + 1))
    vmin = min(c.valuation() for c in coeffs)
    if vmin < 0:
        raise ArithmeticError(f"non-integral solution coefficient (valuation {vmin}); "
                              "check the preset normalization")
    return ODESeries(spec, coeffs, ok, vmin)


# ---------------------------------------------------------------------------
# exact solver


def _zero_mat(p: int, r: int) -> list[list[PiRational]]:
    z = PiRational.from_rational(p, 0)
    return [[z] * r for _ in range(r)]


def _is_zero(m) -> bool:
    return not any(x for row in m for x in row)


class _Stepper:
    def __init__(self, spec: ConnectionSpec):
        self.spec = spec
        self.p = spec.p
        self.r = spec.r
        self.a0 = [(i, j, c) for i, j, c in spec.A0]
        self.a1 = spec.a1_entries()

    def sylvester_op(self, X):
        """X A0 - p A0 X."""
        r, p = self.r, self.p
        out = _zero_mat(p, r)
        for i, j, c in self.a0:
            # (X A0)[a][j] += X[a][i] c ; (A0 X)[i][b] += c X[j][b]
            for a in range(r):
                if X[a][i]:
                    out[a][j] = out[a][j] + X[a][i] * c
            for b in range(r):
                if X[j][b]:
                    out[i][b] = out[i][b] - X[j][b] * (p * c)
        return out

    def rhs(self, phis, k: int):
        r, p = self.r, self.p
        out = _zero_mat(p, r)
        prev = phis[k - 1]
        for i, j, c in self.a1:
            for a in range(r):
                if prev[a][i]:
                    out[a][j] = out[a][j] - prev[a][i] * c
        if k >= p:
            back = phis[k - p]
            for i, j, c in self.a1:
                for b in range(r):
                    if back[j][b]:
                        out[i][b] = out[i][b] + c * back[j][b] * p
        return out

    def step(self, phis, k: int):
        R = self.rhs(phis, k)
        term = [[x / k for x in row] for row in R]
        X = term
        for _ in range(2 * self.r):
            t = self.sylvester_op(term)
            term = [[-x / k for x in row] for row in t]
            if _is_zero(term):
                break
            X = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(X, term)]
        else:
            if not _is_zero(term):
                raise ArithmeticError("Sylvester step did not terminate")
        return X

    def solve(self, phi0, D: int):
        phis = [phi0]
        for k in range(1, D + 1):
            phis.append(self.step(phis, k))
        return phis


def initial_basis(spec: ConnectionSpec) -> list[list[list[PiRational]]]:
    """Dg A0^d for d = 0..r-1, Dg = diag(p^{r-1}, ..., 1): all solutions of phi0 A0 = p A0 phi0."""
    p, r = spec.p, spec.r
    out = []
    for d in range(r):
        m = _zero_mat(p, r)
        for i in range(r - d):
            m[i][i + d] = PiRational.from_rational(p, p ** (r - 1 - i))
        out.append(m)
    return out


def _combine(bases, c: Sequence[PiRational], k: int):
    r = len(bases[0][0])
    out = [row[:] for row in bases[0][k]]
    for d in range(1, len(bases)):
        if not c[d - 1]:
            continue
        for i in range(r):
            for j in range(r):
                x = bases[d][k][i][j]
                if x:
                    out[i][j] = out[i][j] + c[d - 1] * x
    return out


def _fit(bases, K: int, p: int) -> list[PiRational]:
    """Coefficients c_1..c_{r-1} making sum_d c_d Phi^{(d)}_K vanish (c_0 = 1).

    Uses the r^2 entries of the degree-K coefficient as equations and Gaussian
    elimination with full pivoting on least pi-adic valuation, so the chosen
    pivots are the p-adically dominant directions.
    """
    nb = len(bases) - 1
    if nb == 0:
        return []
    r = len(bases[0][0])
    rows = []
    for i in range(r):
        for j in range(r):
            rows.append([bases[d][K][i][j] for d in range(1, nb + 1)] + [-bases[0][K][i][j]])
    cols = list(range(nb))
    pivots = []
    for _ in range(nb):
        best = None
        for ri, row in enumerate(rows):
            if ri in [pr for pr, _ in pivots]:
                continue
            for ci in cols:
                if row[ci]:
                    v = row[ci].valuation()
                    if best is None or v < best[0]:
                        best = (v, ri, ci)
        if best is None:
            raise ArithmeticError("degenerate fit: basis series are dependent at the fit degree")
        _, ri, ci = best
        piv_row = rows[ri]
        inv = piv_row[ci].inv()
        piv_row = [x * inv for x in piv_row]
        rows[ri] = piv_row
        for rj, row in enumerate(rows):
            if rj != ri and row[ci]:
                f = row[ci]
                rows[rj] = [x - f * y for x, y in zip(row, piv_row)]
        pivots.append((ri, ci))
        cols.remove(ci)
    sol = [None] * nb
    for ri, ci in pivots:
        sol[ci] = rows[ri][nb]
    return sol


def _series_at(phis, x: PiRational):
    r = len(phis[0])
    p = x.p
    acc = _zero_mat(p, r)
    xk = PiRational.from_rational(p, 1)
    for m in phis:
        for i in range(r):
            for j in range(r):
                if m[i][j]:
                    acc[i][j] = acc[i][j] + m[i][j] * xk
        xk = xk * x
    return acc


@dataclass
class FrobSeries:
    spec: ConnectionSpec
    D: int
    M: int
    phi: list  # exact PiRational matrices, degree 0..D
    phi0: list
    fit_coeffs: list[PiRational]
    alt_fit_coeffs: list[PiRational]
    fit_degrees: tuple[int, int]
    coeff_valuations: list[float]
    growth_slope: float
    residual_zero: bool = False
    alt_phi: list = dc_field(default_factory=list, repr=False)

    @property
    def cfg(self) -> PadicCfg:
        return PadicCfg(self.spec.p, self.M)

    def padic_coeff(self, k: int) -> PadicMat:
        return PadicMat([[x.to_padic(self.cfg) for x in row] for row in self.phi[k]])

    def padic_series(self) -> list[PadicMat]:
        return [self.padic_coeff(k) for k in range(self.D + 1)]

    def summary(self) -> dict:
        return {"spec": self.spec.to_json(), "D": self.D, "M": self.M,
                "phi0": [[str(x.coords[0]) if x.p == 2 else [str(c) for c in x.coords]
                          for x in row] for row in self.phi0],
                "fit_coefficient_valuations": [c.valuation() for c in self.fit_coeffs],
                "fit_degrees": list(self.fit_degrees),
                "coefficient_valuations": self.coeff_valuations,
                "growth_slope": self.growth_slope,
                "residual_zero": self.residual_zero}


def _min_val(m) -> float:
    return min((x.valuation() for row in m for x in row if x), default=INF)


def _growth(vals: list[float], lo: int, hi: int) -> float:
    pts = [(k, v) for k, v in enumerate(vals) if lo <= k <= hi and v != INF]
    if len(pts) < 2:
        return 0.0
    n = len(pts)
    mx = sum(k for k, _ in pts) / n
    my = sum(v for _, v in pts) / n
    num = sum((k - mx) * (v - my) for k, v in pts)
    den = sum((k - mx) ** 2 for k, _ in pts)
    return num / den


def residual_check(spec: ConnectionSpec, phi: Sequence, M: int) -> bool:
    """delta(phi) + phi A(x) - p A(x^p) phi == 0 mod (pi^M, x^{D+1}) with dense p-adic products."""
    cfg = PadicCfg(spec.p, M)
    r, p = spec.r, spec.p
    A0 = PadicMat([[PadicNum.from_fraction(cfg, x) for x in row] for row in spec.dense("A0")])
    lam = spec.lam_h.to_padic(cfg)
    A1 = PadicMat([[PadicNum.from_fraction(cfg, x) * lam for x in row] for row in spec.dense("A1")])
    mats = [PadicMat([[x.to_padic(cfg) for x in row] for row in m]) for m in phi]
    for k, m in enumerate(mats):
        res = m * k + m * A0 - A0 * m * p
        if k >= 1:
            res = res + mats[k - 1] * A1
        if k >= p:
            res = res - A1 * mats[k - p] * p
        if any(x for row in res.rows for x in row):
            return False
    return True


def solve_frobenius(spec: ConnectionSpec, cfg: PadicCfg | int = 24, D: int = 64,
                    delta: int | None = None, check_residual: bool = True) -> FrobSeries:
    """Solve for the overconvergent Frobenius matrix to x-degree D.

    ``delta`` is the offset of the second fit degree used to estimate the
    achieved precision (default max(4, D // 8)).
    """
    M = cfg.M if isinstance(cfg, PadicCfg) else int(cfg)
    if isinstance(cfg, PadicCfg) and cfg.p != spec.p:
        raise ValueError("characteristic mismatch between spec and cfg")
    if D < 2 * spec.r:
        raise ValueError("degree D too small for the fit")
    stepper = _Stepper(spec)
    bases = [stepper.solve(b0, D) for b0 in initial_basis(spec)]
    delta = delta if delta is not None else max(4, D // 8)
    c = _fit(bases, D, spec.p)
    c_alt = _fit(bases, D - delta, spec.p)
    phi = [_combine(bases, c, k) for k in range(D + 1)]
    alt = [_combine(bases, c_alt, k) for k in range(D + 1)]
    vals = [_min_val(m) for m in phi]
    fs = FrobSeries(spec, D, M, phi, phi[0], c, c_alt, (D, D - delta), vals,
                    _growth(vals, D // 4, (3 * D) // 4), alt_phi=alt)
    if check_residual:
        fs.residual_zero = residual_check(spec, phi, M) if min(vals) >= 0 else False
    return fs


@dataclass
class PointValue:
    a: int
    matrix_exact: list
    matrix: PadicMat | None
    precision: int
    trace: PadicNum | None
    det_valuation: float

    def to_json(self) -> dict:
        return {"a": self.a, "precision": self.precision,
                "trace_digits": self.trace.digits if self.trace is not None else None,
                "matrix": self.matrix.to_json() if self.matrix is not None else None,
                "det_valuation": self.det_valuation}


def _teich_rational(p: int, a: int) -> PiRational | None:
    a %= p
    if a == 1:
        return PiRational.from_rational(p, 1)
    if a == p - 1:
        return PiRational.from_rational(p, -1)
    return None


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    total = None
    for j in range(n):
        if not m[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else m[0][0] * 0


def frobenius_at_point(fs: FrobSeries, a) -> PointValue:
    """phi(teichmuller(a)) for a in F_p^x, with an achieved-precision estimate.

    The estimate is the least of M, the valuation of the difference between
    the two fits, and the valuation of the last computed coefficient (tail).
    """
    p = fs.spec.p
    a_int = a.value if hasattr(a, "value") else int(a)
    if a_int % p == 0:
        raise ValueError("a must be nonzero")
    cfg = fs.cfg
    x = _teich_rational(p, a_int)
    if x is not None:
        val = _series_at(fs.phi, x)
        alt = _series_at(fs.alt_phi, x)
        diff = min((y - z).valuation() for r1, r2 in zip(val, alt) for y, z in zip(r1, r2))
        exact = val
    else:
        # Teichmuller points outside Q: evaluate in Z_p[pi]/pi^M
        t = teichmuller(a_int, cfg)
        ser = fs.padic_series()
        acc = PadicMat.zero(cfg, fs.spec.r)
        tk = PadicNum.one(cfg)
        alt_acc = PadicMat.zero(cfg, fs.spec.r)
        for k, m in enumerate(ser):
            acc = acc + m * tk
            alt_acc = alt_acc + PadicMat([[x.to_padic(cfg) for x in row] for row in fs.alt_phi[k]]) * tk
            tk = tk * t
        diff = (acc - alt_acc).valuation()
        exact = None
    tail = fs.coeff_valuations[-1]
    prec = int(min(fs.M, diff, tail if tail != INF else fs.M))
    if exact is not None:
        if _min_val(exact) < 0:
            mat = None
        else:
            mat = PadicMat([[y.to_padic(cfg) for y in row] for row in exact])
        dv = _det(exact).valuation()
    else:
        mat = acc
        dv = INF
    tr = mat.trace().to_precision(max(prec, 1)) if mat is not None else None
    return PointValue(a_int, exact, mat, prec, tr, dv)


def trace_target(spec: ConnectionSpec, a: int, cfg: PadicCfg) -> tuple[CycInt, PadicNum]:
    """The exponential sum that Tr phi(a) should equal, in Z[zeta_p] and embedded."""
    from .expsums import kloosterman_raw, so2n1_unnormalized

    field = ff.make_field(spec.p, 1)
    if spec.label == "GLn":
        val = kloosterman_raw(field, spec.n, a) * ((-1) ** (spec.n - 1))
    elif spec.label == "SO2n1":
        val = so2n1_unnormalized(field, spec.n, a)
    else:
        raise ValueError("no trace target for this preset")
    return val, embed_zeta(val, cfg)


@dataclass
class TraceCheckRow:
    label: str
    n: int
    p: int
    a: int
    precision: int
    required: int
    agreement: float
    passed: bool
    sum_value: CycInt
    trace_digits: list

    def to_json(self) -> dict:
        return {"label": self.label, "n": self.n, "p": self.p, "a": self.a,
                "precision": self.precision, "required": self.required,
                "agreement_valuation": self.agreement, "pass": self.passed,
                "sum": self.sum_value.to_json(), "trace_digits": self.trace_digits}


def trace_check(fs: FrobSeries, required: int = 16) -> list[TraceCheckRow]:
    rows = []
    p = fs.spec.p
    for a in range(1, p):
        pv = frobenius_at_point(fs, a)
        val, emb = trace_target(fs.spec, a, fs.cfg)
        if pv.trace is None:
            rows.append(TraceCheckRow(fs.spec.label, fs.spec.n, p, a, pv.precision, required,
                                      -INF, False, val, []))
            continue
        agree = (pv.trace - emb.to_precision(pv.trace.cfg.M)).valuation()
        ok = pv.precision >= required and agree >= required
        rows.append(TraceCheckRow(fs.spec.label, fs.spec.n, p, a, pv.precision, required,
                                  agree, ok, val, pv.trace.digits))
    return rows


def slope_set_at_point(spec: ConnectionSpec, field, a) -> list[Fraction]:
    """Frobenius slopes at a (v(q) = 1) from extension power sums, not from the solver."""
    from .lfunction import frobenius_slopes

    group = {"GLn": "kl", "SO2n1": "so"}.get(spec.label)
    if group is None:
        raise ValueError("slopes are available for GLn and SO2n1 presets")
    return frobenius_slopes(group, spec.n, field, a)
