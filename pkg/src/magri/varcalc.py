"""Variational derivatives, Frechet derivatives, and exact integration.

Vectors of differential functions are plain tuples.  A vector F is a
variational gradient exactly when its Frechet derivative is a
self-adjoint matrix operator; :func:`integrate_exact` reconstructs a
density h with variational_derivative(h) == F, combining a homotopy
formula in the polynomial variables with a small weight-homogeneous
ansatz for the Laurent part in v.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

from . import diffalg as da
from . import diffop as dop
from . import linsolve
from .diffalg import (
    DiffFunction,
    LocalFunctional,
    QQ,
    ZERO,
    EMPTY_MONO,
    LOG_VAR,
    U,
    V,
    mono_exp,
)
from .errors import NoSolution, NotClosed


def variational_derivative(f, nvars=2):
    """The vector of Euler derivatives of a density.

    Accepts a DiffFunction or a LocalFunctional; the representative is
    irrelevant because the Euler operators kill total derivatives.
    """
    if isinstance(f, LocalFunctional):
        f = f.rep
    return tuple(da.euler_derivative(f, var) for var in range(nvars))


def frechet(vec):
    """Frechet derivative of a vector: entry (i, j) is sum_n dF_i/du_j^(n) d^n."""
    vec = tuple(vec)
    nvars = len(vec)
    rows = []
    for fi in vec:
        row = []
        for var in range(nvars):
            top = da.max_order(fi, var)
            terms = {}
            if top is not None:
                for n in range(top + 1):
                    c = da.partial_derivative(fi, (var, n))
                    if c:
                        terms[n] = c
            row.append(dop.ScalarDiffOp.from_dict(terms))
        rows.append(row)
    return dop.MatrixDiffOp(rows)


@dataclass(frozen=True)
class ClosednessReport:
    """Outcome of the self-adjointness test for a Frechet derivative."""

    closed: bool
    witness: tuple | None = None  # 1-based (i, j) entry where D and D* differ

    def __bool__(self):
        return self.closed


def is_closed(vec):
    """Whether a vector is a variational gradient (exact self-adjointness)."""
    d = frechet(vec)
    dstar = dop.adjoint(d)
    n, m = d.shape
    for i in range(n):
        for j in range(m):
            if d.entries[i][j] != dstar.entries[i][j]:
                return ClosednessReport(False, (i + 1, j + 1))
    return ClosednessReport(True)


def evolutionary_commutator(p, q):
    """Commutator of evolutionary vector fields: D_Q(P) - D_P(Q)."""
    p, q = tuple(p), tuple(q)
    a = dop.apply(frechet(q), p)
    b = dop.apply(frechet(p), q)
    return tuple(x - y for x, y in zip(a, b))


# -- integration of exact vectors -------------------------------------------


def _u_degree(mono):
    return sum(e for var, _n, e in mono if var == U)


def _poly_homotopy(vec):
    """Density for an exact vector via scaling of every generator.

    Valid when every component stays polynomial (no negative v powers,
    no log); each monomial m of F_i contributes x_i * m / (deg m + 1).
    """
    h = ZERO
    gens = (da.u_jet(0), da.v_jet(0))
    for i, fi in enumerate(vec):
        for m, c in fi.terms:
            deg = sum(e for _v, _n, e in m)
            h = h + gens[i] * DiffFunction([(m, c / (deg + 1))])
    return h


def _u_homotopy(f):
    """u-dependent density part: u * f with each monomial scaled by 1/(deg_u + 1)."""
    h = ZERO
    uu = da.u_jet(0)
    for m, c in f.terms:
        h = h + uu * DiffFunction([(m, c / (_u_degree(m) + 1))])
    return h


def _v_only(f):
    return all(var != U for m, _ in f.terms for var, _n, _e in m)


def _v_candidates(wt, order_bound, v_floor, include_log):
    """Monomials in v jets only: weight wt, order <= order_bound, v-exp >= v_floor.

    Positive jets v', v'', ... carry nonnegative exponents; v itself may
    go down to v_floor and up as far as the weight allows.  With
    include_log, log-linear candidates log(v)*m are added.
    """
    out = []
    jets = list(range(1, max(order_bound, 0) + 1))

    def rec(idx, remaining, acc):
        if idx == len(jets):
            # close with a v power: exponent e contributes 2e
            if remaining % 2 == 0:
                e = remaining // 2
                if e >= v_floor:
                    m = tuple(acc) if not e else tuple(sorted(acc + [(V, 0, e)]))
                    out.append(tuple(sorted(m, key=lambda g: (g[0], g[1]))))
            return
        n = jets[idx]
        w = n + 2
        e = 0
        while True:
            used = e * w
            # remaining weight can always be absorbed by a low v power,
            # but never raised: positive-weight generators only add
            if v_floor * 2 > remaining - used:
                break
            rec(idx + 1, remaining - used, acc + ([(V, n, e)] if e else []))
            e += 1

    rec(0, wt, [])
    cands = [m for m in out]
    if include_log:
        log_g = (LOG_VAR, 0, 1)
        for m in list(cands):
            if mono_exp(m, V, 0) == 0:
                cands.append(tuple(sorted(m + (log_g,), key=lambda g: (g[0], g[1]))))
    cands = sorted(set(cands))
    return cands


def _split_by_weight(vec):
    buckets = {}
    for i, f in enumerate(vec):
        for m, c in f.terms:
            w = da.mono_weight(m)
            buckets.setdefault(w, {})[(i, m)] = c
    out = {}
    for w, terms in buckets.items():
        comps = []
        for i in range(len(vec)):
            comps.append(
                DiffFunction.from_dict(
                    {m: c for (j, m), c in terms.items() if j == i}
                )
            )
        out[w] = tuple(comps)
    return out


def default_widen_cap():
    try:
        return max(0, int(os.environ.get("LENARD_WIDEN_CAP", "2")))
    except ValueError:
        return 2


_EULER_MONO = {}


def _euler_mono(m, var):
    """Euler derivative of a single monomial, cached across calls."""
    key = (m, var)
    out = _EULER_MONO.get(key)
    if out is None:
        f = DiffFunction([(m, QQ(1))])
        acc = ZERO
        top = da.max_order(f, var)
        if top is not None:
            for n in range(top + 1):
                p = da.partial_derivative(f, (var, n))
                if p:
                    p = da.total_derivative(p, n)
                    acc = acc - p if n % 2 else acc + p
        _EULER_MONO[key] = out = acc
    return out


def _v_degree(m):
    return sum(e for var, _n, e in m if var == V)


def _solve_v_density(g, widen_cap):
    """Solve euler_v(h0) = g for a density in v jets (and maybe log v).

    The Euler operator in v lowers the total v degree of a v-only
    monomial by exactly one, so the linear system splits into
    independent blocks indexed by v degree.
    """
    if not g:
        return ZERO
    wt = da.weight(g)
    assert wt is not da.INHOMOGENEOUS
    base_order = da.max_order(g, V) or 0
    order_bound = max(1, (base_order + 1) // 2 + 1)
    v_floor = min(da.min_v_exponent(g) + 1, 0)
    for _round in range(widen_cap + 1):
        cands = _v_candidates(wt + 2, order_bound, v_floor, include_log=True)
        by_deg = {}
        for m in cands:
            e = _euler_mono(m, V)
            if e:
                by_deg.setdefault(_v_degree(m), []).append((m, e))
        rhs_by_deg = {}
        for m, c in g.terms:
            rhs_by_deg.setdefault(_v_degree(m) + 1, {})[m] = c
        parts = {}
        failed = False
        for deg, rhs in sorted(rhs_by_deg.items()):
            block = by_deg.get(deg, [])
            cols = [{mm: cc for mm, cc in e.terms} for _m, e in block]
            xs = linsolve.solve(cols, rhs)
            if xs is None:
                failed = True
                break
            for (m, _e), x in zip(block, xs):
                if x:
                    parts[m] = x
        if not failed:
            return DiffFunction.from_dict(parts)
        order_bound += 2
        v_floor -= 2
    raise NoSolution("no density found for the v-only part within the widening cap")


def integrate_exact(vec, widen_cap=None):
    """A density h with variational_derivative(h) == vec, exactly.

    Requires the vector to be closed (self-adjoint Frechet derivative).
    Purely polynomial vectors integrate by the full homotopy formula;
    otherwise the u-dependence is integrated by a homotopy in the u
    variables alone (u enters polynomially always) and the remaining
    v-only problem is solved against a weight-homogeneous candidate
    space, widened at most ``widen_cap`` times (order bound +2, Laurent
    floor -2 per round).  Raises NotClosed or NoSolution.
    """
    vec = tuple(vec)
    rep = is_closed(vec)
    if not rep:
        raise NotClosed(f"vector is not a variational gradient; entry {rep.witness}")
    if widen_cap is None:
        widen_cap = default_widen_cap()
    if all(da.subalgebra_member(f, da.V_PLUS) for f in vec):
        h = _poly_homotopy(vec)
    else:
        if len(vec) != 2:
            raise NoSolution("Laurent integration works on (u, v) vectors")
        h = ZERO
        for _w, (fw, gw) in sorted(_split_by_weight(vec).items()):
            hu = _u_homotopy(fw)
            gtil = gw - da.euler_derivative(hu, V)
            if not _v_only(gtil):
                raise NoSolution("residual v-problem still involves u")
            h = h + hu + _solve_v_density(gtil, widen_cap)
    got = variational_derivative(h, len(vec))
    if tuple(got) != vec:
        raise NoSolution("reconstructed density fails to reproduce the gradient")
    return LocalFunctional(h)
