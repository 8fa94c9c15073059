"""Characteristic polynomials and L-functions from power sums, and Newton polygons.

Polynomials are lists of :class:`CycInt` coefficients in increasing degree.
Valuations are normalized so that v(q) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

from . import finite_field as ff
from .cyclotomic import INF, CycInt, lambda_valuation
from .finite_field import FieldDesc


@dataclass
class PowerSumSeq:
    values: list[CycInt]
    q: int

    def __post_init__(self):
        if not self.values:
            raise ValueError("empty power-sum sequence")


def charpoly_from_power_sums(ts: PowerSumSeq, r: int) -> list[CycInt]:
    """Monic degree-r polynomial prod (X - alpha_i) with sum alpha_i^m = t_m.

    Newton's identities k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} t_i; every
    division by k must be exact in Z[zeta_p].
    """
    if r > len(ts.values):
        raise ValueError("not enough power sums for the requested degree")
    m = ts.values[0].m
    e = [CycInt.one(m)]
    for k in range(1, r + 1):
        acc = CycInt.zero(m)
        for i in range(1, k + 1):
            term = e[k - i] * ts.values[i - 1]
            acc = acc + term if i % 2 == 1 else acc - term
        if not acc.divisible_by(k):
            raise ArithmeticError(f"inexact division by {k} at degree {k}: wrong degree or normalization")
        e.append(acc.exact_div(k))
    # X^r - e1 X^{r-1} + e2 X^{r-2} - ...
    coeffs = [CycInt.zero(m)] * (r + 1)
    for k in range(r + 1):
        coeffs[r - k] = e[k] if k % 2 == 0 else -e[k]
    return coeffs


def lpoly_from_sums(ts: PowerSumSeq, D: int) -> list[CycInt]:
    """Coefficients l_0..l_D of exp(sum_m t_m T^m / m), via k l_k = sum_m t_m l_{k-m}.

    Power sums beyond D (if supplied) must produce vanishing coefficients;
    otherwise the degree claim is wrong and an error is raised.
    """
    n = len(ts.values)
    if n < D:
        raise ValueError("need at least D power sums")
    m = ts.values[0].m
    coeffs = [CycInt.one(m)]
    for k in range(1, n + 1):
        acc = CycInt.zero(m)
        for j in range(1, k + 1):
            acc = acc + ts.values[j - 1] * coeffs[k - j]
        if not acc.divisible_by(k):
            raise ArithmeticError(f"inexact division by {k}: not a polynomial of the expected shape")
        coeffs.append(acc.exact_div(k))
    if any(coeffs[k] for k in range(D + 1, n + 1)):
        raise ArithmeticError("nonzero coefficient beyond the expected degree")
    if not coeffs[D]:
        raise ArithmeticError("leading coefficient vanishes: degree is smaller than expected")
    return coeffs[:D + 1]


def companion_power_sums(poly: Sequence[CycInt], count: int) -> list[CycInt]:
    """Power sums of the roots of a monic polynomial (inverse Newton identities)."""
    r = len(poly) - 1
    m = poly[0].m
    # e_k = (-1)^k coeff of X^{r-k}
    e = [poly[r - k] * ((-1) ** k) for k in range(r + 1)]
    out = []
    for k in range(1, count + 1):
        acc = CycInt.zero(m)
        for i in range(1, min(k - 1, r) + 1):
            term = e[i] * out[k - i - 1]
            acc = acc + term if i % 2 == 1 else acc - term
        if k <= r:
            term = e[k] * k
            acc = acc + term if k % 2 == 1 else acc - term
        out.append(acc)
    return out


@dataclass
class NewtonPolygon:
    points: list[tuple[int, float]]
    hull: list[tuple[int, Fraction]]
    slopes: list[Fraction]
    kind: str
    normalization: str = "v(q)=1"

    def to_json(self) -> dict:
        return {"coeff_valuations": [None if v == INF else str(v) for _, v in self.points],
                "hull": [[i, str(v)] for i, v in self.hull],
                "slopes": [str(s) for s in self.slopes],
                "kind": self.kind, "normalization": self.normalization}


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    hull: list[tuple[int, Fraction]] = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the segment hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_polygon(poly: Sequence[CycInt], s: int = 1, kind: str = "charpoly") -> NewtonPolygon:
    """Lower convex hull of (i, v(c_i)) with v(q) = 1 for q = p^s.

    ``kind="charpoly"``: slopes are root valuations of sum c_i X^i (negated
    segment slopes).  ``kind="lpoly"``: slopes are the valuations of the
    reciprocal roots of sum c_i T^i (segment slopes).
    """
    if not any(poly):
        raise ValueError("zero polynomial")
    pts_all = []
    for i, c in enumerate(poly):
        v = lambda_valuation(c)
        pts_all.append((i, v if v == INF else Fraction(v) / s))
    pts = [(i, v) for i, v in pts_all if v != INF]
    hull = _lower_hull(pts)
    seg = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y2 - y1) / (x2 - x1)
        seg.extend([slope] * (x2 - x1))
    if kind == "charpoly":
        slopes = sorted(-x for x in seg)
    elif kind == "lpoly":
        slopes = sorted(seg)
    else:
        raise ValueError(f"unknown polygon kind {kind!r}")
    return NewtonPolygon(pts_all, hull, slopes, kind)


def hodge_polygon_preset(family: str, n: int, d: int = 1) -> list[Fraction]:
    """Slope multisets: f_d(n, d) -> {k/d : 0 <= k < d(2n+1)}; hyp(n) -> {1/2, ..., 2n+1/2};
    kl(n) -> {0, ..., n-1}; so(n) -> {0, ..., 2n}."""
    if family == "f_d":
        return [Fraction(k, d) for k in range(d * (2 * n + 1))]
    if family == "hyp":
        return [Fraction(2 * k + 1, 2) for k in range(2 * n + 1)]
    if family == "kl":
        return [Fraction(k) for k in range(n)]
    if family == "so":
        return [Fraction(k) for k in range(2 * n + 1)]
    raise ValueError(f"unsupported family {family!r}")


# ---------------------------------------------------------------------------
# power sums of the families


def frobenius_power_sums(group: str, n: int, field: FieldDesc, a, count: int) -> PowerSumSeq:
    """Traces of the unnormalized Frobenius at a over F_{q^m}, m = 1..count.

    kl: (-1)^{n-1} S_n(a).  so: Q^n Kl_{SO_{2n+1}}(a), Q = q^m.
    """
    from .expsums import kloosterman_over_extension, so_unnormalized_over_extension

    vals = []
    for m in range(1, count + 1):
        if group == "kl":
            vals.append(kloosterman_over_extension(field, n, a, m) * ((-1) ** (n - 1)))
        elif group == "so":
            vals.append(so_unnormalized_over_extension(field, n, a, m))
        else:
            raise ValueError(f"unsupported group {group!r}")
    return PowerSumSeq(vals, field.q)


def rank_of(group: str, n: int) -> int:
    return n if group == "kl" else 2 * n + 1


def frobenius_charpoly(group: str, n: int, field: FieldDesc, a) -> list[CycInt]:
    r = rank_of(group, n)
    return charpoly_from_power_sums(frobenius_power_sums(group, n, field, a, r), r)


def frobenius_slopes(group: str, n: int, field: FieldDesc, a) -> list[Fraction]:
    poly = frobenius_charpoly(group, n, field, a)
    return newton_polygon(poly, field.s, "charpoly").slopes


def f_d_power_sums(field: FieldDesc, n: int, d: int, a, count: int, workers: int = 1) -> PowerSumSeq:
    from .expsums import f_d_family, toric_sum_Sm

    f = f_d_family(field, n, d, a)
    return PowerSumSeq([toric_sum_Sm(f, field, m, workers=workers) for m in range(1, count + 1)],
                       field.q)


def hyp_power_sums(field: FieldDesc, n: int, a, count: int) -> PowerSumSeq:
    """Frobenius traces on Hyp(2n+1; rho): -H(2n+1; rho)(a) over F_{q^m}."""
    from .expsums import hyp_over_extension

    return PowerSumSeq([-hyp_over_extension(field, 2 * n + 1, a, m) for m in range(1, count + 1)],
                       field.q)


@dataclass
class OrdinarityRow:
    family: str
    a: list[int]
    newton: list[Fraction]
    hodge: list[Fraction]
    ordinary: bool
    coeff_valuations: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        return {"family": self.family, "a": self.a, "slopes": [str(x) for x in self.newton],
                "hodge": [str(x) for x in self.hodge], "ordinary": self.ordinary,
                "coeff_valuations": self.coeff_valuations}


def ordinarity_check(family: str, p: int, s: int = 1, n: int = 1, d: int = 1,
                     a_range: Iterable[int] | None = None, workers: int = 1,
                     extra_sums: int = 0) -> list[OrdinarityRow]:
    """Compare Newton and Hodge slope multisets at each a.

    Families: ``f_d`` (L-function of the toric family, degree d(2n+1)),
    ``hyp`` (Hyp(2n+1; rho), weight-shifted slopes), ``kl`` and ``so``
    (Frobenius at a, unnormalized slopes against {0, ..., r-1}).
    """
    field = ff.make_field(p, s)
    a_vals = list(a_range) if a_range is not None else list(range(1, field.q))
    rows = []
    for a in a_vals:
        if family == "f_d":
            if (p - 1) % d:
                raise ValueError("need d | p - 1")
            deg = d * (2 * n + 1)
            ts = f_d_power_sums(field, n, d, a, deg + extra_sums, workers=workers)
            poly = lpoly_from_sums(ts, deg)
            np_ = newton_polygon(poly, s, "lpoly")
            hp = hodge_polygon_preset("f_d", n, d)
        elif family == "hyp":
            if p == 2:
                raise ValueError("hyp needs odd p")
            r = 2 * n + 1
            ts = hyp_power_sums(field, n, a, r)
            poly = charpoly_from_power_sums(ts, r)
            np_ = newton_polygon(poly, s, "charpoly")
            hp = hodge_polygon_preset("hyp", n)
        elif family in ("kl", "so"):
            poly = frobenius_charpoly(family, n, field, a)
            np_ = newton_polygon(poly, s, "charpoly")
            hp = hodge_polygon_preset(family, n)
        else:
            raise ValueError(f"unsupported family {family!r}")
        rows.append(OrdinarityRow(family, ff.to_coeffs(field, a), np_.slopes, hp,
                                  sorted(np_.slopes) == sorted(hp),
                                  [None if v == INF else str(v) for _, v in np_.points]))
    return rows


# ---------------------------------------------------------------------------
# unit root of a characteristic polynomial


def unit_root(poly: Sequence[CycInt], cfg) -> "object":
    """The unique slope-0 root of a monic polynomial, by Newton iteration in Z_p[pi].

    Requires exactly one root of valuation 0, i.e. the reduction mod pi has a
    simple nonzero root (which then lies in F_p).
    """
    from .padic import PadicNum, embed_zeta

    coeffs = [embed_zeta(c, cfg) for c in poly]
    p = cfg.p
    np_ = newton_polygon(poly, 1, "charpoly")
    if sum(1 for x in np_.slopes if x == 0) != 1:
        raise ArithmeticError("polynomial does not have a unique unit root")

    def ev(cs, x):
        acc = cs[-1]
        for c in reversed(cs[:-1]):
            acc = acc * x + c
        return acc

    dcs = [c * i for i, c in enumerate(coeffs)][1:]
    seeds = [d for d in range(1, p) if ev(coeffs, PadicNum.from_int(cfg, d)).valuation() > 0
             and ev(dcs, PadicNum.from_int(cfg, d)).is_unit()]
    if len(seeds) != 1:
        raise ArithmeticError("no unique simple unit root mod pi")
    x = PadicNum.from_int(cfg, seeds[0])
    for _ in range(cfg.M + 2):
        x = x - ev(coeffs, x) * ev(dcs, x).inv()
    if ev(coeffs, x):
        raise ArithmeticError("Newton iteration did not converge")
    return x
