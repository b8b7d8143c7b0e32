import numpy as np
import pytest
from hypothesis import given, settings

from conftest import random_signed_graph, signed_graphs
from oracles import balanced_bruteforce, balanced_cycle_sign, strongly_connected
from sigcontain.condense import (analyze, associate, classic_condensation, classify_scc, condense,
                                 condensation_to_dict, condensation_to_dot, enlarged_condensation,
                                 reach, scc, signed_condensation)
from sigcontain.errors import NotAcyclic
from sigcontain.graph import SignedGraph, build_adjacency


def graph(n, edges, leaders=()):
    loops = [(i, i, 1) for i in range(n) if (i, i) not in {(s, d) for s, d, _ in edges}]
    return SignedGraph(n, tuple(edges) + tuple(loops), tuple(leaders))


TYPE2 = graph(2, [(0, 1, -1), (1, 0, -1)])
TYPE3 = graph(2, [(0, 1, -1), (1, 0, 1)])


class TestScc:
    def test_two_cycle(self):
        assert scc(2, [[1], [0]]).members == ((0, 1),)

    def test_chain(self):
        part = scc(3, [[1], [2], []])
        assert sorted(part.members) == [(0,), (1,), (2,)]

    def test_bridged_triangles(self):
        succ = [[1], [2], [0, 3], [4], [5], [3]]
        part = scc(6, succ)
        assert sorted(part.members) == [(0, 1, 2), (3, 4, 5)]

    @settings(max_examples=80, deadline=None)
    @given(signed_graphs(max_n=12, leaders=False))
    def test_matches_reachability_oracle_and_is_reverse_topological(self, g):
        part = scc(g.n, g.successors)
        assert {frozenset(m) for m in part.members} == strongly_connected(g.n, g.successors)
        for s, d, _ in g.edges:
            assert part.labels[s] >= part.labels[d]


class TestCondense:
    def test_chain_levels(self):
        c = classic_condensation(graph(3, [(0, 1, 1), (1, 2, 1)]))
        assert c.level == (1, 2, 3) and c.members == ((0,), (1,), (2,))

    def test_two_roots_one_sink(self):
        c = classic_condensation(graph(3, [(0, 2, 1), (1, 2, 1)]))
        assert c.level_counts() == [2, 1]

    def test_diamond_longest_path(self):
        r, a, b, c_ = 0, 1, 2, 3
        g = graph(4, [(r, a, 1), (r, b, 1), (a, b, 1), (a, c_, 1), (b, c_, 1)])
        c = classic_condensation(g)
        assert [c.level[c.label[v]] for v in (r, a, b, c_)] == [1, 2, 3, 4]

    def test_ranks_by_smallest_member(self):
        g = graph(4, [(3, 0, 1), (1, 0, 1), (2, 1, 1), (1, 2, 1)])
        c = classic_condensation(g)
        assert c.members[:2] == ((1, 2), (3,))
        assert c.rank[:2] == (1, 2)
        assert c.index_of(2, 1) == c.label[0]

    def test_not_acyclic_guard(self):
        with pytest.raises(NotAcyclic):
            condense(3, [[1], [2], [0]], [0, 1, 2])

    @settings(max_examples=60, deadline=None)
    @given(signed_graphs(max_n=12))
    def test_condensation_invariants(self, g):
        for c in (classic_condensation(g), enlarged_condensation(g)):
            for v in range(len(c)):
                preds = c.preds[v]
                if c.level[v] == 1:
                    assert not preds
                else:
                    assert all(c.level[u] < c.level[v] for u in preds)
                    assert any(c.level[u] == c.level[v] - 1 for u in preds)
        c = classic_condensation(g)
        crossing = {(c.label[s], c.label[d]) for s, d, _ in g.edges if c.label[s] != c.label[d]}
        assert set(c.edges) == crossing


class TestClassify:
    def test_positive_cycle_type1(self):
        g = graph(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)])
        cls = classify_scc(g, [0, 1, 2])
        assert cls.type == 1 and cls.parts == ((0, 1, 2),)

    def test_mutual_negative_type2(self):
        cls = classify_scc(TYPE2, [0, 1])
        assert cls.type == 2
        assert cls.parts == ((0,), (1,))
        assert (cls.gauge[0], cls.gauge[1]) == (1, -1)

    def test_odd_negative_cycle_type3(self):
        cls = classify_scc(TYPE3, [0, 1])
        assert cls.type == 3 and not cls.antibalanced

    def test_negative_self_loop_is_type3_and_antibalanced(self):
        g = SignedGraph(1, ((0, 0, -1),))
        cls = classify_scc(g, [0])
        assert cls.type == 3 and cls.antibalanced

    def test_agrees_with_oracles_on_random_sccs(self, rng):
        checked = 0
        while checked < 150:
            m = int(rng.integers(2, 10))
            g = random_signed_graph(rng, m, p=0.35, neg=0.3)
            for mem in classic_condensation(g).members:
                if len(mem) < 2:
                    continue
                cls = classify_scc(g, mem)
                has_neg = any(w < 0 for s, d, w in g.edges if s in mem and d in mem)
                balanced = balanced_bruteforce(mem, g.edges)
                assert balanced == balanced_cycle_sign(mem, g.edges)
                assert cls.type == (1 if not has_neg else 2 if balanced else 3)
                checked += 1

    @settings(max_examples=60, deadline=None)
    @given(signed_graphs(max_n=10, leaders=False))
    def test_gauge_makes_block_nonnegative(self, g):
        A = build_adjacency(g).toarray()
        for mem in classic_condensation(g).members:
            cls = classify_scc(g, mem)
            if cls.type == 3:
                continue
            idx = list(mem)
            D = np.diag([cls.gauge[i] for i in idx])
            assert (D @ A[np.ix_(idx, idx)] @ D >= 0).all()


class TestSignedCondensation:
    @settings(max_examples=40, deadline=None)
    @given(signed_graphs(max_n=10))
    def test_unsigned_equals_classic(self, g):
        g = SignedGraph(g.n, tuple((s, d, 1) for s, d, _ in g.edges), g.leaders)
        c, s = classic_condensation(g), signed_condensation(g)
        assert (c.members, c.edges, c.level) == (s.members, s.edges, s.level)

    def test_type2_splits_same_level(self):
        s = signed_condensation(TYPE2)
        assert s.members == ((0,), (1,)) and s.level == (1, 1) and not s.edges

    def test_type3_single_supernode(self):
        s = signed_condensation(TYPE3)
        assert s.members == ((0, 1),)

    def test_partial_feed_keeps_levels_aligned(self):
        # root 0 feeds only one side of the balanced pair {1, 2}; 2 feeds 3
        g = graph(4, [(0, 1, 1), (1, 2, -1), (2, 1, -1), (2, 3, 1)])
        s = signed_condensation(g)
        c = classic_condensation(g)
        assert s.n_levels == c.n_levels == 3
        assert [s.level[s.label[v]] for v in range(4)] == [1, 2, 2, 3]


class TestReach:
    def test_chain(self):
        c = classic_condensation(graph(3, [(0, 1, 1), (1, 2, 1)]))
        r = reach(c)
        a, b, cc = (c.label[v] for v in range(3))
        assert r.upstream[cc] == {a, b, cc} and r.downstream[a] == {a, b, cc}

    def test_disjoint_roots(self):
        r = reach(classic_condensation(graph(2, [])))
        assert r.upstream == (frozenset({0}), frozenset({1}))

    def test_two_roots_into_one(self):
        c = classic_condensation(graph(3, [(0, 2, 1), (1, 2, 1)]))
        r = reach(c)
        a = c.label[2]
        assert r.upstream[a] == {c.label[0], c.label[1], a}
        assert r.delta(a, 1) == 2
        classes = [classify_scc(graph(3, [(0, 2, 1), (1, 2, 1)]), m) for m in c.members]
        assert r.J_by_type(a, 1, classes) == {1: [0, 1], 2: [], 3: []}


class TestAssociate:
    def test_unsigned_identity(self):
        g = graph(3, [(0, 1, 1), (1, 2, 1), (2, 1, 1)])
        an = analyze(g)
        for a in an.associations:
            assert len(a.signed) == 1 and a.signed[0] == a.classic
            assert len(a.enlarged) == 2

    def test_type2_root(self):
        an = analyze(TYPE2)
        (a,) = an.associations
        assert a.type == 2 and a.level == 1 and len(a.signed) == 2
        assert all(an.signed.level[s] == 1 for s in a.signed)
        assert set().union(*(an.signed.members[s] for s in a.signed)) == {0, 1}

    def test_type3_root(self):
        an = analyze(TYPE3)
        (a,) = an.associations
        assert len(a.signed) == 1 and an.signed.members[a.signed[0]] == (0, 1)
        assert len(a.enlarged) == 1

    def test_level_identity_random(self, rng):
        for _ in range(60):
            g = random_signed_graph(rng, int(rng.integers(2, 25)), p=0.12, n_leaders=1)
            an = analyze(g)
            assert an.associations  # runs the internal level checks
            lc, ls, le = (x.level_counts() for x in (an.classic, an.signed, an.enlarged))
            assert len(lc) == len(ls) == len(le)
            assert all(a <= b <= c for a, b, c in zip(lc, ls, le))


def test_exports():
    an = analyze(TYPE2)
    d = condensation_to_dict(an.classic, an.classes)
    assert d["supernodes"][0]["type"] == 2 and d["n_levels"] == 1
    dot = condensation_to_dot(an.classic, an.classes)
    assert dot.startswith("digraph classic {") and "t2" in dot
    assert associate(TYPE2, an.classic, an.signed, an.enlarged, an.classes) == an.associations
