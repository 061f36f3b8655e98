import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import chain_specs
from spindiode import ChainSpec, SpinConfig, build_graph, cycle_energy_mismatch, decompose_cycles, flip, preset
from spindiode.analytic import N3_LABELS, N4_LABELS
from spindiode.bath import Side
from spindiode.exceptions import DimensionError
from spindiode.graph import dump
from spindiode.model import eigensystem


def _level_labels(spec):
    """Config index -> level label (ascending energy)."""
    return {c.index: k for k, (c, _) in enumerate(eigensystem(spec).levels, start=1)}


H1 = dict(h=0.05, Delta=0.5, delta=0.3)


def test_flip_examples():
    c = SpinConfig.from_string("-+-")
    assert str(flip(c, 1)) == "++-"
    assert flip(flip(c, 1), 1) == c
    assert flip(flip(c, 1), 3) == flip(flip(c, 3), 1)
    with pytest.raises(DimensionError):
        flip(c, 4)


def test_h1_edges_in_level_labels():
    spec = preset("H1", **H1)
    g = build_graph(spec)
    lab = _level_labels(spec)
    left = {frozenset((lab[i], lab[j])) for i, j, _ in g.edges(Side.LEFT)}
    right = {frozenset((lab[i], lab[j])) for i, j, _ in g.edges(Side.RIGHT)}
    assert left == {frozenset(p) for p in [(1, 6), (2, 5), (3, 7), (4, 8)]}
    assert right == {frozenset(p) for p in [(1, 4), (2, 3), (5, 7), (6, 8)]}


def test_h1_cycles_match_groups():
    spec = preset("H1", **H1)
    lab = _level_labels(spec)
    cycles = {frozenset(lab[i] for i in c.indices) for c in decompose_cycles(build_graph(spec))}
    assert cycles == {frozenset({1, 6, 8, 4}), frozenset({5, 2, 3, 7})}


def test_n4_cycles_match_block_groups():
    spec = preset("H4", h=0.1, zeta=1, Delta=0.2, delta=0.1, theta=0.3, phi=0.2, gamma=0.4)
    label = {SpinConfig.from_string(s).index: k for k, s in N4_LABELS.items()}
    groups = [tuple(label[i] for i in c.indices) for c in decompose_cycles(build_graph(spec))]
    assert [tuple(sorted(g)) for g in groups] == [(1, 2, 5, 9), (3, 6, 10, 13), (4, 7, 11, 14), (8, 12, 15, 16)]


def test_n2_single_cycle():
    d = decompose_cycles(build_graph(ChainSpec(2, (0.1, 0.2), {(1, 2): 0.3})))
    assert len(d) == 1 and sorted(d.cycles[0].indices) == [0, 1, 2, 3]


def test_mismatch_examples():
    h2 = preset("H3", h=0.3, zeta=5, Delta=0.7, delta=0.2, theta=0.0)
    assert all(cycle_energy_mismatch(c, h2) == 0 for c in decompose_cycles(build_graph(h2)))
    h3 = preset("H3", h=0.3, zeta=5, Delta=0.7, delta=0.2, theta=1.2)
    for c in decompose_cycles(build_graph(h3)):
        assert cycle_energy_mismatch(c, h3) == pytest.approx(4 * 1.2, rel=1e-13)
    h4 = preset("H4", h=0.1, zeta=1, Delta=0.2, delta=0.1, theta=0.3, phi=0.2, gamma=0.4)
    for c in decompose_cycles(build_graph(h4)):
        assert cycle_energy_mismatch(c, h4) == pytest.approx(4 * 0.4, rel=1e-13)


def test_n3_labels_consistent_with_cycle_listing():
    spec = preset("H3", h=0.3, zeta=5, Delta=0.7, delta=0.2, theta=1.2)
    label = {SpinConfig.from_string(s).index: k for k, s in N3_LABELS.items()}
    groups = [tuple(label[i] for i in c.indices) for c in decompose_cycles(build_graph(spec))]
    assert groups == [(1, 2, 6, 4), (3, 7, 8, 5)]


def test_dump_lists_cycles():
    spec = preset("H3", h=0.3, zeta=5, Delta=0.7, delta=0.2, theta=1.2)
    text = dump(build_graph(spec))
    assert text.startswith("# N=3 cycles=2")
    assert text.count("-L->") == 4 and text.count("-R->") == 4


@given(chain_specs(max_sites=8))
def test_graph_structure(spec):
    g = build_graph(spec)
    n = spec.n_sites
    idx = np.arange(spec.dim)
    for partner, omega in ((g.left_partner, g.left_omega), (g.right_partner, g.right_omega)):
        assert np.array_equal(partner[partner], idx)
        assert np.array_equal(omega[partner], -omega)
        # interior spins never change
        interior_mask = ((1 << n) - 1) & ~1 & ~(1 << (n - 1))
        assert np.array_equal(partner & interior_mask, idx & interior_mask)


@given(chain_specs(max_sites=7))
def test_cycles_partition(spec):
    g = build_graph(spec)
    d = decompose_cycles(g)
    assert len(d) == 1 << (spec.n_sites - 2)
    members = sorted(i for c in d for i in c.indices)
    assert members == list(range(spec.dim))
    for c in d:
        c0, c1, c2, c3 = c.indices
        assert g.left_partner[c0] == c1 and g.right_partner[c1] == c2
        assert g.left_partner[c2] == c3 and g.right_partner[c3] == c0
        assert len({SpinConfig(spec.n_sites, i).bits[1:-1] for i in c.indices}) == 1


@given(chain_specs(min_sites=2, max_sites=7), st.integers(0, 3))
def test_mismatch_rotation_invariant_and_universal(spec, shift):
    g = build_graph(spec)
    for c in decompose_cycles(g):
        members = list(c.members)
        rotated = members[shift:] + members[:shift]
        m = cycle_energy_mismatch(c, g)
        assert cycle_energy_mismatch(rotated, g) == pytest.approx(m, abs=1e-12)
        assert m == pytest.approx(4 * spec.coupling_between(1, spec.n_sites), abs=1e-12)
