"""Variational derivatives, Frechet derivatives, exactness, homotopy."""

from __future__ import annotations

import random

import pytest
import sympy as sp

import helpers
import oracle
from magri import diffalg as da
from magri import diffop as dop
from magri import varcalc as vc
from magri.diffalg import LocalFunctional, QQ, U, V, ZERO
from magri.errors import NotClosed


def test_variational_derivative_components():
    f = da.u_jet(0) * da.u_jet(2) + da.v_jet(0) ** 3
    grad = vc.variational_derivative(f)
    assert grad == (da.u_jet(2) * 2, da.v_jet(0) ** 2 * 3)
    assert vc.variational_derivative(LocalFunctional(f)) == grad


def test_variational_derivative_kills_exact_terms():
    rng = random.Random(2)
    for _ in range(20):
        f = helpers.rand_function(rng)
        g = helpers.rand_function(rng)
        assert vc.variational_derivative(f + da.total_derivative(g)) == \
            vc.variational_derivative(f)


def test_frechet_directional_derivative_matches_sympy():
    # D_P(d) applied to a is the linearization of P along a
    rng = random.Random(9)
    eps = sp.Symbol("eps")
    for _ in range(8):
        p = helpers.rand_vector(rng, terms=2, max_order=2, max_exp=2)
        a = helpers.rand_vector(rng, terms=2, max_order=2, max_exp=2)
        got = dop.apply(vc.frechet(p), a)
        subs = {}
        for var, base, direction in ((U, oracle.u_fn, a[0]), (V, oracle.v_fn, a[1])):
            for n in range(6):
                subs[oracle.jet_sym(var, n)] = oracle.jet_sym(var, n) + eps * sp.diff(
                    oracle.to_sympy(direction), oracle.x, n
                )
        for i in range(2):
            ps = oracle.to_sympy(p[i])
            shifted = ps.subs(subs, simultaneous=True)
            want = sp.diff(shifted, eps).subs(eps, 0)
            assert oracle.sym_equal(oracle.to_sympy(got[i]), want)


def test_frechet_entry_layout():
    p = (da.u_jet(1) * da.v_jet(0), da.u_jet(0))
    m = vc.frechet(p)
    assert m.entries[0][0] == dop.ScalarDiffOp([(1, da.v_jet(0))])
    assert m.entries[0][1] == dop.ScalarDiffOp([(0, da.u_jet(1))])
    assert m.entries[1][0] == dop.ScalarDiffOp([(0, da.ONE)])
    assert not m.entries[1][1]


def test_exact_vectors_are_closed():
    rng = random.Random(17)
    for _ in range(15):
        f = helpers.rand_function(rng, terms=2, max_order=2, max_exp=2)
        report = vc.is_closed(vc.variational_derivative(f))
        assert report.closed, da.to_text(f)


def test_closedness_witness():
    report = vc.is_closed((da.u_jet(1), ZERO))
    assert not report.closed
    assert report.witness == (1, 1)


def test_commutator_antisymmetry():
    rng = random.Random(29)
    for _ in range(10):
        p = helpers.rand_vector(rng, terms=2, max_order=2, max_exp=2)
        q = helpers.rand_vector(rng, terms=2, max_order=2, max_exp=2)
        c = vc.evolutionary_commutator(p, q)
        c_rev = vc.evolutionary_commutator(q, p)
        assert c == tuple(-f for f in c_rev)


def test_commutator_with_translation_vanishes():
    rng = random.Random(41)
    shift = (da.u_jet(1), da.v_jet(1))
    for _ in range(10):
        p = helpers.rand_vector(rng, terms=2, max_order=2, max_exp=2)
        assert vc.evolutionary_commutator(shift, p) == (ZERO, ZERO)


def test_integrate_exact_on_polynomial_part():
    rng = random.Random(53)
    for _ in range(15):
        h = helpers.rand_polynomial(rng, terms=3, max_order=3, max_exp=3)
        h = h - da.const(h.constant_term())
        grad = vc.variational_derivative(h)
        got = vc.integrate_exact(grad)
        assert da.functional_equal(got.rep, h)


def test_integrate_exact_reproduces_seed_densities():
    from magri import lenard

    for eps in (0, 1):
        for alpha in (0, 1):
            s = lenard.seed(eps, alpha)
            grad = s.gradient
            got = vc.integrate_exact(grad)
            assert da.functional_equal(got.rep, s.density.rep), (eps, alpha)


def test_integrate_exact_rejects_non_closed():
    with pytest.raises(NotClosed):
        vc.integrate_exact((da.u_jet(1), ZERO))


def test_integrate_exact_mixed_weights():
    h = (
        da.u_jet(0) ** 3
        + da.u_jet(0) * da.v_pow(-1)
        - da.v_pow(-3) * da.v_jet(1) ** 2 * QQ(1, 2)
        + da.v_jet(0) * da.u_jet(1) ** 2
    )
    got = vc.integrate_exact(vc.variational_derivative(h))
    assert da.functional_equal(got.rep, h)


def test_default_widen_cap_env(monkeypatch):
    monkeypatch.delenv("LENARD_WIDEN_CAP", raising=False)
    assert vc.default_widen_cap() == 2
    monkeypatch.setenv("LENARD_WIDEN_CAP", "5")
    assert vc.default_widen_cap() == 5
