"""Vectorized exact kernels for character sums over F_q.

Every sum in this package has the shape ``sum_x w(x) psi(Tr f(x))`` where the
argument of psi is a sum of monomials.  Since the trace is additive, the value
is determined by the histogram of ``sum_j Tr(c_j x^{e_j}) mod p`` over the torus,
and each monomial trace is a single lookup in the discrete-log trace table.
Histograms are integer counts, so everything here is exact.

Two kernel families live here:

* :func:`torus_histogram` enumerates ``(F_q^x)^v`` with the innermost two
  coordinates vectorized and an outer range that can be split across workers.
* :func:`convolve` / :func:`kloosterman_table` compute multiplicative
  convolutions over F_q^x for every argument at once using floating FFTs on
  small integer limbs.  Results are rounded, the rounding margin is checked,
  and an exact checksum is compared against Python integer arithmetic.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import numpy as np

from .finite_field import FieldDesc, FieldTables, field_tables

Monomial = tuple[int, tuple[int, ...]]  # (nonzero coefficient code, exponent vector)

_INNER_BLOCK = 1 << 21


def _monomial_logs(tables: FieldTables, monomials: Sequence[Monomial]):
    out = []
    for coef, exps in monomials:
        if coef == 0:
            continue
        out.append((int(tables.log[coef]), tuple(int(e) for e in exps)))
    return out


def _histogram_chunk(field: FieldDesc, monomials, nvars: int, signed: tuple[int, ...],
                     outer_points: list[tuple[int, ...]]) -> np.ndarray:
    tables = field_tables(field)
    p, L = field.p, tables.order
    T = tables.trace
    mons = _monomial_logs(tables, monomials)
    hist = np.zeros(2 * p, dtype=np.int64)
    inner = min(nvars, 2)
    n_outer = nvars - inner
    ar = np.arange(L, dtype=np.int64)
    for outer in outer_points:
        bases = []
        for lc, exps in mons:
            b = lc + sum(e * l for e, l in zip(exps[:n_outer], outer))
            bases.append((b % L, exps[n_outer:]))
        sign_base = sum(outer[i] for i in signed if i < n_outer)
        if inner == 0:
            t = sum(int(T[b]) for b, _ in bases) % p
            hist[t + (p if sign_base % 2 else 0)] += 1
            continue
        if inner == 1:
            blocks = [(None, ar)]
        else:
            rows = max(1, _INNER_BLOCK // L)
            blocks = [(ar[i:i + rows, None], ar[None, :]) for i in range(0, L, rows)]
        for la, lb in blocks:
            if inner == 1:
                acc = np.zeros(L, dtype=np.int64)
                for b, ex in bases:
                    acc += T[(b + ex[0] * lb) % L]
                par = (sign_base + (lb if (n_outer in signed) else 0)) % 2
            else:
                shape = (la.shape[0], L)
                acc = np.zeros(shape, dtype=np.int64)
                for b, ex in bases:
                    acc += T[(b + ex[0] * la + ex[1] * lb) % L]
                par = np.full(shape, sign_base, dtype=np.int64)
                if n_outer in signed:
                    par = par + la
                if n_outer + 1 in signed:
                    par = par + lb
                par = par % 2
            idx = (acc % p) + p * par
            hist += np.bincount(np.ravel(idx), minlength=2 * p)
    return hist


def torus_histogram(field: FieldDesc, monomials: Sequence[Monomial], nvars: int,
                    signed: Sequence[int] = (), workers: int = 1,
                    chunks: int | None = None) -> np.ndarray:
    """Signed histogram of ``sum_j Tr(c_j x^{e_j}) mod p`` over ``(F_q^x)^nvars``.

    ``signed`` lists variable indices y whose quadratic character rho(y) weights
    the point.  The result has length p: entry t is the signed number of points
    with trace value t.  The outermost loop is split into ``chunks`` pieces that
    run on ``workers`` processes; partial histograms are added exactly.
    """
    signed = tuple(sorted(set(int(i) for i in signed)))
    if signed and field.p == 2:
        raise ValueError("quadratic characters need odd q")
    for _, exps in monomials:
        if len(exps) != nvars:
            raise ValueError("exponent vector length differs from number of variables")
    L = field.q - 1
    n_outer = max(nvars - 2, 0)
    outer_all = list(itertools.product(range(L), repeat=n_outer))
    nchunks = chunks or max(1, workers)
    size = max(1, math.ceil(len(outer_all) / nchunks))
    parts = [outer_all[i:i + size] for i in range(0, len(outer_all), size)]
    mons = [(int(c), tuple(e)) for c, e in monomials]
    if workers > 1 and len(parts) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(_histogram_chunk, field, mons, nvars, signed, part) for part in parts]
            hists = [f.result() for f in futs]
    else:
        hists = [_histogram_chunk(field, mons, nvars, signed, part) for part in parts]
    total = np.sum(hists, axis=0)
    p = field.p
    return total[:p] - total[p:]


# ---------------------------------------------------------------------------
# exact cyclic convolution over Z/L x Z/p


def _limbs(x: np.ndarray, bits: int) -> list[np.ndarray]:
    out = []
    mask = (1 << bits) - 1
    while True:
        out.append((x & mask).astype(np.float64))
        x = x >> bits
        if not x.any():
            return out


def _bits_for(n: int) -> int:
    return max(6, int((44 - math.log2(max(n, 2))) // 2))


def convolve(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Exact cyclic convolution of two int64 arrays over the group Z/L x Z/p."""
    if f.shape != g.shape:
        raise ValueError("shape mismatch")
    f = np.asarray(f, dtype=np.int64)
    g = np.asarray(g, dtype=np.int64)
    N = f.size
    # shift to nonnegative values; conv(f, g + c) = conv(f, g) + c * sum(f)
    cf = int(-min(f.min(), 0))
    cg = int(-min(g.min(), 0))
    fp, gp = f + cf, g + cg
    bits = _bits_for(N)
    fl = [np.fft.fft2(x) for x in _limbs(fp, bits)]
    gl = [np.fft.fft2(x) for x in _limbs(gp, bits)]
    out = np.zeros(f.shape, dtype=np.int64)
    worst = 0.0
    for i, a in enumerate(fl):
        for j, b in enumerate(gl):
            h = np.fft.ifft2(a * b).real
            r = np.rint(h)
            worst = max(worst, float(np.max(np.abs(h - r))) if h.size else 0.0)
            out += r.astype(np.int64) << (bits * (i + j))
    if worst > 0.2:
        raise ArithmeticError(f"FFT rounding margin too small ({worst:.3f})")
    # undo the shifts: conv(fp, gp) = conv(f,g) + cg*sum(f) + cf*sum(g) + cf*cg*N
    sf, sg = int(f.sum()), int(g.sum())
    out -= cg * sf + cf * sg + cf * cg * N
    if int(out.sum()) != sf * sg:
        raise ArithmeticError("convolution checksum mismatch")
    return out


def reduce_cyclotomic(arr: np.ndarray) -> np.ndarray:
    """Normalize rows so the zeta^{p-1} coordinate is zero (canonical Z[zeta_p] form)."""
    return arr - arr[:, -1:]


def psi_table(field: FieldDesc, b: int = 1, sign: int = 1) -> np.ndarray:
    """One-hot table of x -> psi(sign * b * x) indexed by log x."""
    tables = field_tables(field)
    p, L = field.p, tables.order
    shift = int(tables.log[b])
    if sign == -1 and p != 2:
        shift += L // 2
    arr = np.zeros((L, p), dtype=np.int64)
    arr[np.arange(L), tables.trace[(np.arange(L) + shift) % L]] = 1
    return arr


def kloosterman_table(field: FieldDesc, n: int, b: int = 1) -> np.ndarray:
    """S_n(c) for every c in F_q^x (row log c), coordinates of zeta^0..zeta^{p-1}.

    S_n(c) = sum over x_1 ... x_n = c of psi_b(x_1 + ... + x_n).
    """
    base = psi_table(field, b)
    acc = reduce_cyclotomic(base.copy())
    for _ in range(n - 1):
        acc = reduce_cyclotomic(convolve(base, acc))
    return acc


def convolve_at(f: np.ndarray, g: np.ndarray, rows: Sequence[int]) -> np.ndarray:
    """Selected rows of the cyclic convolution, computed directly in O(L p^2) each."""
    L, p = f.shape
    ar = np.arange(L)
    out = np.zeros((len(rows), p), dtype=object)
    for k, beta in enumerate(rows):
        gr = g[(beta - ar) % L]
        acc = np.zeros(p, dtype=object)
        for t1 in range(p):
            w = f[:, t1]
            if not w.any():
                continue
            col = (w[:, None].astype(object) * gr.astype(object)).sum(axis=0)
            acc += np.roll(col, t1)
        out[k] = acc
    return out
