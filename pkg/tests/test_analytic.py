import math

import mpmath as mp
import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from spindiode import BathSpec, Side, assemble, energy, preset
from spindiode.analytic import (
    N3_FREQUENCIES,
    N4_FREQUENCIES,
    _N3_BLOCKS,
    _N4_BLOCKS,
    _r_terms,
    asymptotic_probe,
    cramer_n3,
    cramer_n4,
    g_coefficient,
    label_config,
)

H3 = dict(h=0.3, zeta=5.0, Delta=0.7, delta=0.2, theta=1.2)
H4 = dict(h=0.3, zeta=2.0, Delta=0.6, delta=0.25, theta=0.8, phi=0.35, gamma=0.9)
LOCUS3 = dict(h=0.2, zeta=10.0, Delta=0.5, delta=0.3, theta=1.0)

mp.mp.dps = 40


def test_g_coefficient_examples():
    assert g_coefficient(0.0, 1.0) == pytest.approx(2.0, rel=1e-15)
    assert g_coefficient(3.0, math.inf) == 3.0
    assert g_coefficient(-3.0, math.inf) == 3.0
    assert g_coefficient(1.0, 1.0) == pytest.approx(float(mp.coth(mp.mpf(1) / 2)), rel=1e-14)
    with pytest.raises(ValueError):
        g_coefficient(0.0, math.inf)


@pytest.mark.parametrize("n,table,params", [(3, N3_FREQUENCIES, H3), (4, N4_FREQUENCIES, H4)])
def test_frequency_tables_match_energies(n, table, params):
    spec = preset("H3" if n == 3 else "H4", **params)
    for (k, j), f in table.items():
        ref = energy(spec, label_config(n, k)) - energy(spec, label_config(n, j))
        assert f(params) == pytest.approx(ref, abs=1e-13)


# --- independent block check: build each 4x4 cycle matrix in mpmath --------

def a_mp(omega, T):
    """ω n(ω) continued to ω < 0, in mpmath."""
    w = mp.mpf(omega)
    if abs(w) < mp.mpf(10) ** -30:
        return T
    return w / mp.expm1(w / T)


def block_matrix(b, n, spec, temps):
    e = {k: mp.mpf(energy(spec, label_config(n, k))) for k in range(1, 2 ** n + 1)}

    def a(side, k, i):
        return a_mp(e[k] - e[i], temps[side])

    p, q, r, t, s1, s2 = b.p, b.q, b.r, b.t, b.s1, b.s2
    return mp.matrix([
        [-a(s1, q, p), a(s1, p, q), 0, 0],
        [a(s2, r, p), 0, -a(s2, p, r), 0],
        [0, 0, a(s1, t, r), -a(s1, r, t)],
        [0, -a(s2, t, q), 0, a(s2, q, t)],
    ])


def adj_sum(m):
    ones = mp.matrix([1, 1, 1, 1])
    inv = mp.inverse(m)
    return -(ones.T * inv * ones)[0] * mp.det(m)


@pytest.mark.parametrize("tl,tr", [(2.0, 1.0), (0.6, 1.7)])
def test_n3_blocks_against_determinants(tl, tr):
    spec = preset("H3", **H3)
    blk = cramer_n3(H3, 1.0, 1 / tl, 1 / tr)
    temps = {Side.LEFT: mp.mpf(tl), Side.RIGHT: mp.mpf(tr)}
    dets = (blk.detcoef_1, blk.detcoef_2)
    rs = (blk.r_1, blk.r_2)
    for b, d, r in zip(_N3_BLOCKS, dets, rs):
        m = block_matrix(b, 3, spec, temps)
        assert d == pytest.approx(float(mp.det(m)), rel=1e-11)
        assert r == pytest.approx(float(adj_sum(m)), rel=1e-11)


def test_n4_blocks_against_determinants():
    spec = preset("H4", **H4)
    blk = cramer_n4(H4, 1.0, 1 / 1.5, 1 / 0.7)
    temps = {Side.LEFT: mp.mpf(1.5), Side.RIGHT: mp.mpf(0.7)}
    for b, d, x in zip(_N4_BLOCKS, blk.detcoef_a, blk.x):
        m = block_matrix(b, 4, spec, temps)
        assert d == pytest.approx(float(mp.det(m)), rel=1e-11)
        assert x == pytest.approx(float(adj_sum(m)), rel=1e-11)


def test_r_template_is_adjugate_sum():
    """Symbolically, the eight-term template equals −1ᵀ adj(M) 1."""
    b = _N3_BLOCKS[0]
    sym = {}

    def a(side, k, i):
        key = (side, k, i)
        if key not in sym:
            sym[key] = sympy.Symbol(f"a_{side.value}_{k}_{i}", positive=True)
        return sym[key]

    p, q, r, t, s1, s2 = b.p, b.q, b.r, b.t, b.s1, b.s2
    m = sympy.Matrix([
        [-a(s1, q, p), a(s1, p, q), 0, 0],
        [a(s2, r, p), 0, -a(s2, p, r), 0],
        [0, 0, a(s1, t, r), -a(s1, r, t)],
        [0, -a(s2, t, q), 0, a(s2, q, t)],
    ])
    ones = sympy.ones(4, 1)
    target = sympy.expand(-(ones.T * m.adjugate() * ones)[0])

    def coef(kind, side, k, i):
        return a(side, k, i) if kind == "a" else a(side, k, i) + a(side, i, k)

    template = sympy.expand(sum(sympy.Mul(*[coef(*f) for f in term]) for term in _r_terms(b)))
    assert sympy.simplify(template - target) == 0


# --- physics of the closed forms -------------------------------------------

def test_equilibrium_and_decoupled_limits():
    eq = cramer_n3(H3, 1.0, 0.7, 0.7)
    assert eq.equilibrium and eq.gamma_closed == 0.0
    assert cramer_n3(dict(H3, theta=0.0), 1.0, 0.5, 1.0).gamma_closed == 0.0
    assert cramer_n4(H4, 1.0, 0.7, 0.7).gamma_closed == 0.0
    assert cramer_n4(dict(H4, gamma=0.0), 1.0, 0.5, 1.0).gamma_closed == 0.0
    with pytest.raises(ValueError):
        cramer_n3(H3, 1.0, math.inf, 1.0)


@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(-1.5, 1.5))
def test_sign_structure(tl, tr, theta):
    p = dict(H3, theta=theta)
    blk = cramer_n3(p, 1.0, 1 / tl, 1 / tr)
    expected = int(np.sign((1 / tl - 1 / tr) * theta))
    assert blk.detcoef_sign == expected
    swapped = cramer_n3(p, 1.0, 1 / tr, 1 / tl)
    assert swapped.gamma_sign == -blk.gamma_sign


def test_closed_form_matches_solver_h3_criterion_point():
    st_ = assemble(preset("H3", **H3), BathSpec(Side.LEFT, 2.0), BathSpec(Side.RIGHT, 1.0))
    assert cramer_n3(H3, 1.0, 0.5, 1.0).gamma_closed == pytest.approx(st_.gamma, rel=1e-10)


def test_large_beta_stays_finite_in_log():
    blk = cramer_n3(H3, 1.0, 1.0, 500.0)
    assert blk.gamma_closed == 0.0 and np.isfinite(blk.log_abs_gamma)
    assert blk.log_abs_gamma < -700


def test_probe_plateau_on_locus():
    temps = [10.0 ** -k for k in np.linspace(1, 3, 9)]
    out = asymptotic_probe(LOCUS3, 1.0, "right", temps, T_fixed=1.0)
    g = [v for _, v in out]
    assert g[-1] != 0
    assert g[-1] == pytest.approx(g[-2], rel=1e-2)


def test_probe_cooling_right_vanishes():
    temps = [10.0 ** -k for k in np.linspace(1, 2.5, 7)]
    out = asymptotic_probe(LOCUS3, 1.0, "left", temps, T_fixed=1.0, log=True)
    logs = [lg for _, lg, _ in out]
    assert all(b < a for a, b in zip(logs, logs[1:]))
    assert logs[-1] < logs[0] - 20


def test_probe_validates_sequence():
    with pytest.raises(ValueError):
        asymptotic_probe(H3, 1.0, "left", [0.1, 0.2])
    with pytest.raises(ValueError):
        asymptotic_probe(H3, 1.0, "left", [0.1, 0.0])
