"""멀티컷 인스턴스 / brute-force 오라클 / 그림자 테스트"""

from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tests.strategies import digraphs, dmc_instances

PAIRS = [("s1", "t1"), ("s2", "t2"), ("s3", "t3")]


# ---------------------------------------------------------------------------
# DmcInstance
# ---------------------------------------------------------------------------

class TestDmcInstance:
    def test_from_graph_freezes_terminals(self, disjoint_paths_dmc):
        inst = disjoint_paths_dmc
        assert inst.undeletable == {"s1", "s2", "s3", "t1", "t2", "t3"}
        assert inst.deletable == ("a1", "a2", "a3")
        assert inst.sources == ("s1", "s2", "s3")
        assert inst.sinks == ("t1", "t2", "t3")
        assert not inst.g.is_deletable("s1")

    def test_wrong_pair_count(self, disjoint_paths_dmc):
        from dmcut.errors import InputError
        from dmcut.multicut import DmcInstance

        with pytest.raises(InputError):
            DmcInstance.from_graph(disjoint_paths_dmc.g, PAIRS[:2], 1)

    def test_identical_endpoints(self, disjoint_paths_dmc):
        from dmcut.errors import InputError
        from dmcut.multicut import DmcInstance

        with pytest.raises(InputError):
            DmcInstance.from_graph(disjoint_paths_dmc.g, [("s1", "s1")] + PAIRS[1:], 1)

    def test_terminal_must_be_undeletable(self, disjoint_paths_dmc):
        from dmcut.errors import InputError
        from dmcut.multicut import DmcInstance

        with pytest.raises(InputError):
            DmcInstance(disjoint_paths_dmc.g, tuple(PAIRS), 1, frozenset())

    def test_negative_budget(self, disjoint_paths_dmc):
        from dmcut.errors import InputError
        from dmcut.multicut import DmcInstance

        with pytest.raises(InputError):
            DmcInstance.from_graph(disjoint_paths_dmc.g, PAIRS, -1)

    def test_unknown_terminal(self, disjoint_paths_dmc):
        from dmcut.errors import InputError
        from dmcut.multicut import DmcInstance

        with pytest.raises(InputError):
            DmcInstance.from_graph(disjoint_paths_dmc.g, [("s1", "zz")] + PAIRS[1:], 1)


# ---------------------------------------------------------------------------
# 해 판정 / 오라클
# ---------------------------------------------------------------------------

class TestIsSolution:
    def test_valid(self, disjoint_paths_dmc):
        from dmcut.multicut import is_solution

        assert is_solution(disjoint_paths_dmc, {"a1", "a2", "a3"})

    def test_missing_pair(self, disjoint_paths_dmc):
        from dmcut.multicut import is_solution

        assert not is_solution(disjoint_paths_dmc, {"a1", "a2"})

    def test_terminal_not_allowed(self, disjoint_paths_dmc):
        from dmcut.multicut import is_solution

        assert not is_solution(disjoint_paths_dmc, {"s1", "s2", "s3"})

    def test_over_budget(self, shared_vertex_dmc):
        from dataclasses import replace

        from dmcut.multicut import is_solution

        assert is_solution(shared_vertex_dmc, {"c"})
        assert not is_solution(replace(shared_vertex_dmc, k=0), {"c"})

    def test_unknown_vertex(self, disjoint_paths_dmc):
        from dmcut.errors import InputError
        from dmcut.multicut import is_solution

        with pytest.raises(InputError):
            is_solution(disjoint_paths_dmc, {"nope"})


class TestBruteForceDmc:
    def test_disjoint_paths(self, disjoint_paths_dmc):
        from dmcut.multicut import brute_force_dmc

        assert brute_force_dmc(disjoint_paths_dmc) == {"a1", "a2", "a3"}

    def test_shared_vertex(self, shared_vertex_dmc):
        from dmcut.multicut import brute_force_dmc

        assert brute_force_dmc(shared_vertex_dmc) == {"c"}

    def test_budget_too_small(self, disjoint_paths_dmc):
        from dataclasses import replace

        from dmcut.multicut import brute_force_dmc

        assert brute_force_dmc(replace(disjoint_paths_dmc, k=2)) is None

    def test_already_separated(self):
        from dmcut.digraph import Digraph
        from dmcut.multicut import DmcInstance, brute_force_dmc

        g = Digraph(["s1", "t1", "s2", "t2", "s3", "t3"])
        assert brute_force_dmc(DmcInstance.from_graph(g, PAIRS, 0)) == frozenset()

    def test_capacity_guard(self, disjoint_paths_dmc):
        from dmcut.config import CapacityLimits
        from dmcut.errors import CapacityError
        from dmcut.multicut import brute_force_dmc

        with pytest.raises(CapacityError):
            brute_force_dmc(disjoint_paths_dmc, CapacityLimits(max_deletable=2))

    def test_minimal_solutions(self, shared_vertex_dmc):
        from dmcut.multicut import minimal_solutions

        assert minimal_solutions(shared_vertex_dmc) == [frozenset({"c"})]

    @given(dmc_instances())
    @settings(max_examples=100)
    def test_result_is_minimum(self, inst):
        from dmcut.multicut import brute_force_dmc, is_solution, minimal_solutions

        found = brute_force_dmc(inst)
        minimal = minimal_solutions(inst)
        if found is None:
            assert minimal == []
            return
        assert is_solution(inst, found)
        assert min(len(s) for s in minimal) == len(found)
        for s in minimal:
            assert is_solution(inst, s)
            assert all(not is_solution(inst, s - {v}) for v in s)


class TestShrinkToMinimalSeparator:
    def test_chain(self):
        from dmcut.digraph import Digraph
        from dmcut.multicut import shrink_to_minimal_separator

        g = Digraph.from_arcs([("s", "a"), ("a", "b"), ("b", "t")], undeletable=["s", "t"])
        assert shrink_to_minimal_separator(g, "s", "t", {"a", "b"}) == {"b"}

    def test_not_separating(self):
        from dmcut.digraph import Digraph
        from dmcut.errors import InputError
        from dmcut.multicut import shrink_to_minimal_separator

        g = Digraph.from_arcs([("s", "a"), ("a", "t")], undeletable=["s", "t"])
        with pytest.raises(InputError):
            shrink_to_minimal_separator(g, "s", "t", set())


# ---------------------------------------------------------------------------
# 그림자
# ---------------------------------------------------------------------------

class TestShadows:
    def test_unreachable_vertex_is_in_both_shadows(self, shadowed_dmc):
        from dmcut.multicut import shadows

        report = shadows(shadowed_dmc, {"a1"})
        assert report.forward == {"d"}
        assert report.reverse == {"d"}
        assert report.union == {"d"}
        assert not report.is_empty

    def test_solution_without_shadow(self, disjoint_paths_dmc):
        from dmcut.multicut import is_shadowless

        assert is_shadowless(disjoint_paths_dmc, {"a1", "a2", "a3"})

    def test_overlap_with_terminals(self, disjoint_paths_dmc):
        from dmcut.errors import InputError
        from dmcut.multicut import shadows

        with pytest.raises(InputError):
            shadows(disjoint_paths_dmc, {"s1"})

    def test_enumerate_shadowless(self, shadowed_dmc):
        from dataclasses import replace

        from dmcut.multicut import enumerate_shadowless_solutions

        assert enumerate_shadowless_solutions(shadowed_dmc) == []
        assert enumerate_shadowless_solutions(replace(shadowed_dmc, k=4)) == [
            frozenset({"a1", "a2", "a3", "d"})
        ]


# ---------------------------------------------------------------------------
# WdmcInstance
# ---------------------------------------------------------------------------

def _wdmc(weights, k, W):
    from dmcut.digraph import Digraph
    from dmcut.multicut import WdmcInstance

    arcs = [("s1", "x"), ("x", "y"), ("y", "t1"), ("s2", "x"), ("x", "t2")]
    return WdmcInstance(Digraph.from_arcs(arcs), (("s1", "t1"), ("s2", "t2")), weights, k, W)


class TestWdmc:
    def test_terminal_weight(self):
        inst = _wdmc({"x": 3, "y": 1}, 2, 5)
        assert inst.wt["s1"] == 6
        assert {"s1", "t1", "s2", "t2"} <= inst.undeletable
        assert inst.wt["x"] == 3

    def test_default_weight_is_one(self):
        inst = _wdmc({}, 2, 5)
        assert inst.wt["y"] == 1

    def test_negative_weight(self):
        from dmcut.errors import InputError

        with pytest.raises(InputError):
            _wdmc({"x": -1}, 2, 5)

    def test_is_wdmc_solution(self):
        from dmcut.multicut import is_wdmc_solution

        inst = _wdmc({"x": 3, "y": 1}, 2, 5)
        assert is_wdmc_solution(inst, {"x"})
        assert not is_wdmc_solution(inst, {"y"})
        assert not is_wdmc_solution(_wdmc({"x": 3}, 2, 2), {"x"})

    def test_brute_force(self):
        from dmcut.multicut import brute_force_wdmc

        assert brute_force_wdmc(_wdmc({"x": 3, "y": 1}, 2, 5)) == {"x"}
        assert brute_force_wdmc(_wdmc({"x": 3, "y": 1}, 2, 2)) is None

    def test_heavy_vertex_is_undeletable(self):
        from dmcut.multicut import brute_force_wdmc

        inst = _wdmc({"x": 6, "y": 1}, 2, 5)
        assert "x" in inst.undeletable
        assert brute_force_wdmc(inst) is None

    @given(digraphs(min_vertices=4, max_vertices=6), st.data())
    @settings(max_examples=100)
    def test_matches_exhaustive_enumeration(self, g, data):
        from dmcut.multicut import WdmcInstance, brute_force_wdmc, is_wdmc_solution

        pairs = tuple(
            tuple(data.draw(st.lists(st.sampled_from(g.vertices), min_size=2, max_size=2,
                                     unique=True)))
            for _ in range(2)
        )
        weights = {v: data.draw(st.integers(min_value=0, max_value=4)) for v in g.vertices}
        k = data.draw(st.integers(min_value=0, max_value=3))
        W = data.draw(st.integers(min_value=0, max_value=8))
        inst = WdmcInstance(g, pairs, weights, k, W)

        candidates = sorted(set(g.vertices) - inst.undeletable)
        solutions = [
            frozenset(c)
            for size in range(k + 1)
            for c in combinations(candidates, size)
            if is_wdmc_solution(inst, c)
        ]
        found = brute_force_wdmc(inst)
        if not solutions:
            assert found is None
            return
        best = min(solutions, key=lambda s: (inst.weight(s), len(s), tuple(sorted(s))))
        assert found == best
