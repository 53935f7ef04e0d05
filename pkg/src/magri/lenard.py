"""Lenard-Magri recursion for the built-in compatible pair.

Starting from a Casimir gradient of H_eps, each step solves

    H_eps xi_{n+1} = H_{1-eps} xi_n

for the next gradient, normalized against the two-dimensional kernel of
H_eps by zeroing the coefficients of the kernel marker monomials.  Two
interchangeable solvers are provided: a back-substitution through the
triangular component identities of the built-in operators (default),
and a linear solve over an explicit weight-homogeneous candidate space.
Conserved densities are reconstructed by exact integration, and every
step re-verifies the defining relation before returning.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import diffalg as da
from . import diffop as dop
from . import linsolve
from . import pva
from . import varcalc as vc
from .diffalg import DiffFunction, LocalFunctional, QQ, ZERO, ONE, U, V, LOG_VAR
from .errors import EmptyAnsatz, MagriError, NoSolution, NotClosed

H0, H1 = dop.builtin_pair()

scaled_v_plus = da.scaled_v_plus
_member = da.subalgebra_member


@dataclass(frozen=True)
class HierarchySeed:
    """A Casimir of one structure, as a gradient/density pair."""

    eps: int
    alpha: int
    gradient: tuple
    density: LocalFunctional


def _seed_data():
    u = da.u_jet(0)
    v = da.v_jet(0)
    vp = da.v_jet(1)
    xi00 = (ZERO, ONE)
    h00 = v
    xi01 = (
        da.v_pow(-1),
        -u * da.v_pow(-2)
        - QQ(3, 2) * vp * vp * da.v_pow(-4)
        + da.v_jet(2) * da.v_pow(-3),
    )
    h01 = u * da.v_pow(-1) - vp * vp * da.v_pow(-3) / 2
    xi10 = (ONE, ZERO)
    h10 = u
    xi11 = (da.u_jet(2) + 4 * u * u, v * v / 2)
    h11 = u * da.u_jet(2) / 2 + QQ(4, 3) * u ** 3 + v ** 3 / 6
    return {
        (0, 0): (xi00, h00),
        (0, 1): (xi01, h01),
        (1, 0): (xi10, h10),
        (1, 1): (xi11, h11),
    }


_SEEDS = _seed_data()


def seed(eps, alpha):
    """The (eps, alpha) starting Casimir, verified on construction."""
    if (eps, alpha) not in _SEEDS:
        raise MagriError("eps and alpha must each be 0 or 1")
    grad, dens = _SEEDS[(eps, alpha)]
    h = H0 if eps == 0 else H1
    if not dop.kernel_verify(h, grad):
        raise MagriError("seed gradient is not a Casimir of its structure")
    if vc.variational_derivative(dens) != grad:
        raise MagriError("seed density does not produce the seed gradient")
    return HierarchySeed(eps, alpha, grad, LocalFunctional(dens))


def structure(eps):
    return H0 if eps == 0 else H1


# -- candidate spaces --------------------------------------------------------


@dataclass(frozen=True)
class AnsatzSpace:
    """A finite, deterministic list of candidate monomials."""

    weight: int
    order_bound: int
    membership: da.SubalgebraTag
    include_log: bool = False
    v_floor: int | None = None
    monomials: tuple = field(default=(), compare=False)


def ansatz_space(weight, order_bound, membership, include_log=False, v_floor=None):
    """Enumerate the monomials of one weight inside a tagged subspace.

    Order runs over all jets up to order_bound; the zeroth v power is
    constrained by the tag, bounded below by ``v_floor`` for the
    v-negative tags (default: weight//2 - order_bound - 2, deep enough
    for the gradients this package produces).  Raises EmptyAnsatz when
    nothing qualifies.
    """
    tag = membership
    if v_floor is None:
        if tag.kind in ("minus", "scaled_minus", "affine_scaled", "zero"):
            v_floor = weight // 2 - order_bound - 2
        else:
            v_floor = 0
    lo, hi = _v_exp_range(tag, v_floor, weight)
    gens = [(U, n) for n in range(order_bound + 1)] + [
        (V, n) for n in range(1, order_bound + 1)
    ]
    found = []

    def rec(idx, remaining, acc):
        if idx == len(gens):
            if remaining % 2:
                return
            e = remaining // 2
            if lo <= e <= hi if hi is not None else lo <= e:
                if e:
                    mono = tuple(sorted(acc + [(V, 0, e)], key=lambda g: (g[0], g[1])))
                else:
                    mono = tuple(acc)
                if _tag_allows(tag, mono):
                    found.append(mono)
            return
        var, n = gens[idx]
        w = n + 2
        e = 0
        while remaining - e * w >= 2 * lo:
            rec(idx + 1, remaining - e * w, acc + ([(var, n, e)] if e else []))
            e += 1

    rec(0, weight, [])
    out = sorted(set(found))
    if include_log:
        log_g = (LOG_VAR, 0, 1)
        extra = [
            tuple(sorted(m + (log_g,), key=lambda g: (g[0], g[1])))
            for m in out
            if da.mono_exp(m, V, 0) == 0
        ]
        out = sorted(set(out) | set(extra))
    if not out:
        raise EmptyAnsatz(
            f"no monomials of weight {weight} under {tag.kind} with order <= {order_bound}"
        )
    return AnsatzSpace(weight, order_bound, tag, include_log, v_floor, tuple(out))


def _v_exp_range(tag, v_floor, weight):
    if tag.kind == "plus":
        return 0, None
    if tag.kind == "scaled_plus":
        return tag.power, None
    if tag.kind == "zero":
        return 0, 0
    if tag.kind == "minus":
        return v_floor, 0
    if tag.kind == "scaled_minus":
        return v_floor, -tag.power
    if tag.kind == "affine_scaled":
        # scaled part plus the affine power; _tag_allows filters the gap
        return v_floor, max(-tag.power, 1 - tag.power)
    raise MagriError(f"unknown subalgebra tag {tag!r}")


def _tag_allows(tag, mono):
    return da.subalgebra_member(DiffFunction([(mono, QQ(1))]), tag)


# -- the recursion step ------------------------------------------------------


_KERNELS = {
    0: (_SEEDS[(0, 0)][0], _SEEDS[(0, 1)][0]),
    1: (_SEEDS[(1, 0)][0], _SEEDS[(1, 1)][0]),
}


def _marker(vec):
    for i, comp in enumerate(vec):
        if comp:
            m, c = comp.terms[0]
            return i, m, c
    return None


def _normalize_kernel(eps, vec):
    """Zero the kernel marker coefficients by subtracting kernel gradients."""
    out = list(vec)
    for ker in _KERNELS[eps]:
        i, m, kc = _marker(ker)
        c = out[i].coeff(m)
        if c:
            s = c / kc
            out = [a - s * b for a, b in zip(out, ker)]
    return tuple(out)


def _vec_weight(vec):
    w = None
    for comp in vec:
        if not comp:
            continue
        cw = da.weight(comp)
        if cw is da.INHOMOGENEOUS or (w is not None and cw != w):
            return da.INHOMOGENEOUS
        w = cw
    return w


def _h0_row1(f):
    # (d^3 + d.u + u d) f
    return dop.apply_scalar(H0.entries[0][0], f)


def _step_recursion(eps, b):
    u = da.u_jet(0)
    if eps == 0:
        a = da.antiderivative(b[1])
        if a is None:
            raise NoSolution("second component of the step is not a total derivative")
        f = a * da.v_pow(-1)
        rhs = (b[0] - _h0_row1(f)) * da.v_pow(-1)
        g = da.antiderivative(rhs)
        if g is None:
            raise NoSolution("first component of the step is not a total derivative")
        return (f, g)
    a = da.antiderivative(b[0])
    if a is None:
        raise NoSolution("first component of the step is not a total derivative")
    g = a * da.v_pow(2)
    q = dop.builtin_q()
    rhs = b[1] * da.v_pow(2) + dop.apply_scalar(q, a)
    f = da.antiderivative(rhs)
    if f is None:
        raise NoSolution("second component of the step is not a total derivative")
    return (f, g)


def _step_ansatz(eps, b, order_bounds, v_floor, widen_cap):
    h = structure(eps)
    wb = _vec_weight(b)
    if wb is da.INHOMOGENEOUS:
        raise NoSolution("ansatz stepping needs a weight-homogeneous right side")
    wt = wb - 3 if eps == 0 else wb + 3
    b_ord = da.differential_order(b) or 0
    if order_bounds is None:
        order_bounds = (b_ord + 3, b_ord + 3)
    if v_floor is None:
        v_floor = min(da.min_v_exponent(b[0]), da.min_v_exponent(b[1]), 0) - 2
    if eps == 0:
        tags = (da.scaled_v_minus(1), da.affine_scaled(1))
    else:
        tags = (da.V_PLUS, scaled_v_plus(2))
    for _ in range(widen_cap + 1):
        cols = []
        labels = []
        for comp, (tag, bound) in enumerate(zip(tags, order_bounds)):
            try:
                space = ansatz_space(wt, bound, tag, v_floor=v_floor)
            except EmptyAnsatz:
                continue
            for m in space.monomials:
                vec = [ZERO, ZERO]
                vec[comp] = DiffFunction([(m, QQ(1))])
                col = dop.apply(h, vec)
                entries = {}
                for ci, f in enumerate(col):
                    for mm, cc in f.terms:
                        entries[(ci, mm)] = cc
                if entries:
                    cols.append(entries)
                    labels.append((comp, m))
        rhs = {}
        for ci, f in enumerate(b):
            for mm, cc in f.terms:
                rhs[(ci, mm)] = cc
        xs = linsolve.solve(cols, rhs) if cols else None
        if xs is not None:
            comps = [dict(), dict()]
            for (comp, m), x in zip(labels, xs):
                if x:
                    comps[comp][m] = x
            return tuple(DiffFunction.from_dict(c) for c in comps)
        order_bounds = tuple(x + 2 for x in order_bounds)
        v_floor -= 2
    raise NoSolution("no gradient found in the candidate spaces within the widening cap")


def lm_step(eps, grad, method="recursion", order_bounds=None, v_floor=None, widen_cap=None):
    """One recursion step: the next gradient xi' with H_eps xi' = H_{1-eps} xi.

    The input must be a variational gradient (closed); the output is
    normalized against the kernel of H_eps and verified exactly before
    being returned.
    """
    grad = tuple(grad)
    if len(grad) != 2:
        raise MagriError("gradients here have two components")
    rep = vc.is_closed(grad)
    if not rep:
        raise NotClosed(f"gradient input is not closed; entry {rep.witness}")
    if widen_cap is None:
        widen_cap = vc.default_widen_cap()
    b = dop.apply(structure(1 - eps), grad)
    if not any(b):
        return (ZERO, ZERO)
    if method == "recursion":
        nxt = _step_recursion(eps, b)
    elif method == "ansatz":
        nxt = _step_ansatz(eps, b, order_bounds, v_floor, widen_cap)
    else:
        raise MagriError(f"unknown stepping method {method!r}")
    nxt = _normalize_kernel(eps, nxt)
    if dop.apply(structure(eps), nxt) != b:
        raise NoSolution("candidate gradient fails the defining relation")
    return nxt


# -- whole hierarchies -------------------------------------------------------


@dataclass
class HierarchyRun:
    """The computed data of one chain: gradients, densities, flows, orders."""

    eps: int
    alpha: int
    steps: int
    method: str
    gradients: list
    densities: list
    flows: list
    orders: list
    flow_orders: list
    checks: dict


def _dot(a, b):
    acc = ZERO
    for x, y in zip(a, b):
        acc = acc + x * y
    return acc


def run_hierarchy(eps, alpha, steps, method="recursion", with_densities=True, widen_cap=None):
    """Iterate the recursion from a seed and package the verified chain.

    Returns gradients xi_0 .. xi_N, densities integral(h_n) with
    variational gradient xi_n, and flows P_n = H_{1-eps} xi_n (each also
    equal to H_eps xi_{n+1}, which lm_step verifies).  Runtime checks
    record closedness, subspace memberships, density consistency and
    Casimir conservation for the alpha = 1 chains.
    """
    s = seed(eps, alpha)
    gradients = [s.gradient]
    densities = [s.density] if with_densities else []
    flows = []
    checks = {"memberships": True, "densities": True, "casimir_pairing": True}
    for n in range(1, steps + 1):
        nxt = lm_step(eps, gradients[-1], method=method, widen_cap=widen_cap)
        flows.append(dop.apply(structure(1 - eps), gradients[-1]))
        gradients.append(nxt)
        if eps == 0:
            ok = da.subalgebra_member(nxt[0], da.scaled_v_minus(1)) and da.subalgebra_member(
                nxt[1], da.affine_scaled(1)
            )
        else:
            ok = _member(nxt[0], da.V_PLUS) and _member(nxt[1], scaled_v_plus(2))
        checks["memberships"] = checks["memberships"] and ok
        if with_densities:
            dens = vc.integrate_exact(nxt, widen_cap=widen_cap)
            densities.append(dens)
            okd = vc.variational_derivative(dens) == nxt
            if eps == 0:
                okd = okd and not any(
                    da.mono_exp(m, LOG_VAR, 0) for m, _ in dens.rep.terms
                )
            checks["densities"] = checks["densities"] and okd
    flows.append(dop.apply(structure(1 - eps), gradients[-1]))
    if alpha == 1:
        other = seed(eps, 0).gradient
        for p in flows:
            paired = LocalFunctional(_dot(other, p))
            checks["casimir_pairing"] = checks["casimir_pairing"] and paired.is_zero()
    orders = [
        (da.differential_order(g[0]), da.differential_order(g[1])) for g in gradients
    ]
    flow_orders = [da.differential_order(p) for p in flows]
    return HierarchyRun(
        eps,
        alpha,
        steps,
        method,
        gradients,
        densities,
        flows,
        orders,
        flow_orders,
        checks,
    )


@dataclass
class InvolutivityReport:
    """Pairwise bracket and commutator verification across chains."""

    labels: list
    bracket_h0: list
    bracket_h1: list
    flows_commute: list
    all_ok: bool


def involutivity_report(runs, include_flows=True):
    """Check that all densities of the given runs are in involution.

    Every pair of densities is bracketed under both built-in structures
    and every pair of flows is commutated; the report carries the full
    boolean matrices and the conjunction.
    """
    labels = []
    densities = []
    flows = []
    for run in runs:
        for n, dens in enumerate(run.densities):
            labels.append((run.eps, run.alpha, n))
            densities.append(dens)
            flows.append(run.flows[n] if n < len(run.flows) else None)
    m = len(densities)
    b0 = [[True] * m for _ in range(m)]
    b1 = [[True] * m for _ in range(m)]
    fc = [[True] * m for _ in range(m)]
    ok = True
    for i in range(m):
        for j in range(i, m):
            for mat, h in ((b0, H0), (b1, H1)):
                val = pva.poisson_bracket(densities[i], densities[j], h).is_zero()
                mat[i][j] = mat[j][i] = val
                ok = ok and val
            if include_flows and flows[i] is not None and flows[j] is not None:
                comm = vc.evolutionary_commutator(flows[i], flows[j])
                val = not any(comm)
                fc[i][j] = fc[j][i] = val
                ok = ok and val
    return InvolutivityReport(labels, b0, b1, fc, ok)
