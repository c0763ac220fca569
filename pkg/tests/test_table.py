"""Cayley-table layer: tables, subgroup lattices, table-space invariants.

The subgroup machinery is compared against the subset-closure oracle, which
enumerates subgroups by brute force; table invariants are compared against
element-level brute force. Both oracles bypass tables and kernels entirely.
"""

import math

import numpy as np
import pytest

from oracles import (
    brute_center,
    brute_commutator_subgroup,
    brute_derived_length,
    brute_frattini,
    brute_normal_subgroups,
    brute_rank,
    brute_subgroups,
    is_abelian_elems,
)
from pgf import kernels
from pgf.datasets import load_fixture
from pgf.errors import CapExceeded
from pgf.group import build_chain
from pgf.pc import pc_to_perm
from pgf.perm import Perm
from pgf.table import CayleyTable

D4 = None  # filled by fixture below


def d4_group():
    r = Perm.from_cycles(4, [(1, 2, 3, 4)])
    s = Perm.from_cycles(4, [(2, 4)])
    return build_chain([r, s])


def fixture_pres(name, index):
    for pres in load_fixture(name):
        if pres.group_id[1] == index:
            return pres
    raise LookupError


def elems_of_ids(ct, ids):
    return frozenset(ct.elems[i] for i in ids)


def test_table_indexing_and_identity():
    ct = CayleyTable.from_perm_group(d4_group())
    assert ct.n == 8
    assert (ct.table[0] == np.arange(8)).all()
    assert (ct.table[:, 0] == np.arange(8)).all()
    els = ct.elems
    for i in range(8):
        for j in range(8):
            assert els[ct.table[i, j]] == els[i] * els[j]
    inv = ct.inv()
    for i in range(8):
        assert ct.table[i, inv[i]] == 0 and ct.table[inv[i], i] == 0


def test_conj_map_matches_definition():
    ct = CayleyTable.from_perm_group(d4_group())
    conj = ct.conj()
    els = ct.elems
    for g in range(8):
        for x in range(8):
            expect = els[g].inverse() * els[x] * els[g]
            assert els[conj[g, x]] == expect


def test_from_pc_agrees_with_collection():
    pres = fixture_pres("o8.pc", 4)  # dihedral
    ct = CayleyTable.from_pc(pres)
    els = list(pres.elements())
    for a in range(8):
        for b in range(8):
            assert els[ct.table[a, b]] == pres.multiply(els[a], els[b])


def test_cap_enforced():
    c32 = build_chain([Perm.from_cycles(32, [tuple(range(1, 33))])])
    with pytest.raises(CapExceeded):
        CayleyTable.from_perm_group(c32, cap=16)


def test_closure_matches_oracle():
    g = d4_group()
    ct = CayleyTable.from_perm_group(g)
    els = ct.elems
    # every single-generator closure
    for i in range(8):
        got = elems_of_ids(ct, ct.closure_ids((i,)))
        from oracles import closure_of

        assert got == closure_of([els[i]], 4)


def test_center_and_orders():
    ct = CayleyTable.from_perm_group(d4_group())
    zs = elems_of_ids(ct, ct.center_ids())
    assert zs == brute_center(ct.elems)
    assert sorted(ct.element_orders().tolist()) == sorted(
        p.order() for p in ct.elems
    )


FIXTURE_CASES = [
    ("o8.pc", 1),
    ("o8.pc", 2),
    ("o8.pc", 3),
    ("o8.pc", 4),
    ("o8.pc", 5),
    ("o16.pc", 6),
    ("o16.pc", 12),
    ("o16.pc", 13),
    ("o27.pc", 4),
    ("o27.pc", 5),
]


@pytest.mark.parametrize("name,index", FIXTURE_CASES)
def test_invariants_match_brute_force(name, index):
    pres = fixture_pres(name, index)
    g = pc_to_perm(pres)
    ct = CayleyTable.from_perm_group(g)
    els = g.elements()
    l = pres.prime
    assert ct.prime == l
    assert len(ct.frattini_ids()) == len(brute_frattini(els, l, g.degree))
    assert ct.rank() == brute_rank(els, l, g.degree)
    assert ct.derived_length() == brute_derived_length(els, g.degree)
    assert len(ct.derived_ids(tuple(range(ct.n)))) == len(
        brute_commutator_subgroup(els, g.degree)
    )


@pytest.mark.parametrize(
    "name,index",
    [("o8.pc", 2), ("o8.pc", 4), ("o8.pc", 5), ("o16.pc", 5), ("o16.pc", 12), ("o27.pc", 4)],
)
def test_all_subgroups_match_subset_oracle(name, index):
    pres = fixture_pres(name, index)
    g = pc_to_perm(pres)
    ct = CayleyTable.from_perm_group(g)
    lat = ct.lattice()
    ours = {elems_of_ids(ct, s.ids) for s in lat.subgroups}
    # a subgroup of order l**k needs at most k generators
    k = round(math.log(g.order, pres.prime))
    ref = brute_subgroups(g.elements(), g.degree, max_gens=k)
    assert ours == ref


def test_d4_lattice_shape():
    ct = CayleyTable.from_perm_group(d4_group())
    lat = ct.lattice()
    assert len(lat.subgroups) == 10
    # three maximal subgroups, all of index 2
    maxi = lat.maximal()
    assert len(maxi) == 3
    assert all(s.order == 4 for s in maxi)
    assert all(s.normal for s in maxi)
    # eight conjugacy classes of subgroups
    assert len(lat.class_reps()) == 8
    # normal abelian subgroups: trivial, center, C4 and the two Klein fours
    na = lat.normal_abelian()
    assert len(na) == 5
    ref = {
        s
        for s in brute_normal_subgroups(ct.elems, 4)
        if is_abelian_elems(s)
    }
    assert {elems_of_ids(ct, s.ids) for s in na} == ref


def test_q8_normal_abelian_is_five():
    pres = fixture_pres("o8.pc", 5)
    ct = CayleyTable.from_perm_group(pc_to_perm(pres))
    assert len(ct.lattice().normal_abelian()) == 5


def test_klein_four_lattice():
    g = build_chain([Perm.from_cycles(4, [(1, 2)]), Perm.from_cycles(4, [(3, 4)])])
    ct = CayleyTable.from_perm_group(g)
    lat = ct.lattice()
    assert len(lat.subgroups) == 5
    assert len(lat.class_reps()) == 5
    assert all(s.normal and s.abelian for s in lat.subgroups)


def test_cyclic_four_classes():
    g = build_chain([Perm.from_cycles(4, [(1, 2, 3, 4)])])
    lat = CayleyTable.from_perm_group(g).lattice()
    assert len(lat.subgroups) == 3
    assert len(lat.class_reps()) == 3


def test_frattini_equals_maximal_intersection():
    # dual route: intersection of all maximal subgroups
    for name, index in FIXTURE_CASES:
        pres = fixture_pres(name, index)
        ct = CayleyTable.from_pc(pres)
        lat = ct.lattice()
        inter = frozenset(range(ct.n))
        for s in lat.maximal():
            inter &= frozenset(s.ids)
        assert inter == frozenset(ct.frattini_ids())


def test_lcs_orders_d4():
    ct = CayleyTable.from_perm_group(d4_group())
    assert ct.lcs_orders() == (8, 2, 1)
    assert ct.lower_exp_orders() == (8, 2, 1)
    assert ct.rank() == 2
    assert ct.derived_length() == 2


def test_kernel_backends_agree():
    names = kernels.available()
    tables = []
    for name, index in [("o16.pc", 6), ("o27.pc", 4)]:
        ct = CayleyTable.from_pc(fixture_pres(name, index))
        tables.append(ct)
    rng = np.random.default_rng(17)
    for ct in tables:
        conj = ct.conj()
        powl = ct.pow_map(ct.prime)
        for _ in range(20):
            seed = rng.integers(0, ct.n, size=rng.integers(1, 4))
            masks = {}
            cands = {}
            for name in names:
                k = kernels.get_kernels(name)
                member = k.closure(ct.table, seed.astype(np.int32))
                masks[name] = member
                cands[name] = k.extension_candidates(ct.table, conj, powl, member)
            base = masks[names[0]]
            for name in names[1:]:
                assert (masks[name] == base).all()
                assert (cands[name] == cands[names[0]]).all()


def test_kernel_env_selection():
    assert kernels.active_kernels().name in kernels.available()
    k = kernels.get_kernels("numpy")
    assert k.name == "numpy"
    with pytest.raises(ValueError):
        kernels.get_kernels("nonsense")
