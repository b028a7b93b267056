"""파이프라인: 𝒞₁ / 𝒞₂ / consistency partition / 무관 정점 규칙 / solve_dmc 테스트"""

import numpy as np
import pytest
from hypothesis import given, settings

from tests.strategies import dmc_instances


def _flows(inst):
    """각 단말 쌍의 첫 번째 (Z, Augmentation) 으로 만든 PairFlow 세 개."""
    from dmcut.config import AugmentationSettings
    from dmcut.flowaug import augment_exhaustive
    from dmcut.pipeline import PairFlow

    flows = []
    for index, (s, t) in enumerate(inst.terminal_pairs, start=1):
        z, aug = augment_exhaustive(inst.g, s, t, inst.k, AugmentationSettings())[0]
        flows.append(PairFlow.from_augmentation(index, inst, z, aug))
    return flows


def _transpose_binding(n):
    """n² 정점 v0.. 위의 (i, j) ↦ (j, i) 순열 제약."""
    from dmcut.permcsp import Binding, OrderedDomain, PermutationConstraint

    names = [f"v{i}" for i in range(n * n)]
    domain = OrderedDomain(names)
    mapping = {names[i * n + j]: names[j * n + i] for i in range(n) for j in range(n)}
    return Binding("x1.1", "x2.1", PermutationConstraint(domain, domain, mapping))


# ---------------------------------------------------------------------------
# 𝒞₁
# ---------------------------------------------------------------------------

class TestBuildC1:
    def test_variables_and_domains(self, shared_vertex_dmc):
        from dmcut.pipeline import build_csp_c1

        c1 = build_csp_c1(_flows(shared_vertex_dmc), 1)
        assert c1.variables == ("x1.1", "x1.1'", "x2.1", "x2.1'", "x3.1", "x3.1'")
        assert c1.domains["x1.1"].values == ("c",)
        kinds = sorted(b.kind for b in c1.constraints)
        assert kinds == ["downclosed"] * 3 + ["permutation"] * 3

    def test_reverse_domain_order(self):
        from dmcut.digraph import Digraph
        from dmcut.pipeline import PairFlow, variable_pairs

        g = Digraph.from_arcs([("s", "a"), ("a", "b"), ("b", "t")], undeletable=["s", "t"])
        flow = PairFlow(1, "s", "t", g, (("s", "a", "b", "t"),))
        (var,) = variable_pairs([flow])
        assert var.forward == "x1.1"
        assert var.reverse == "x1.1'"
        assert var.forward_domain().values == ("a", "b")
        assert var.reverse_domain().values == ("b", "a")

    def test_flow_above_budget(self, shared_vertex_dmc):
        from dmcut.pipeline import BuildFailure, build_csp_c1

        assert build_csp_c1(_flows(shared_vertex_dmc), 0) is BuildFailure.FLOW_EXCEEDS_BUDGET

    def test_complying_valuation_satisfies(self, disjoint_paths_dmc):
        from dmcut.permcsp import is_satisfied
        from dmcut.pipeline import build_csp_c1

        c1 = build_csp_c1(_flows(disjoint_paths_dmc), 3)
        alpha = {}
        for i in (1, 2, 3):
            alpha[f"x{i}.1"] = alpha[f"x{i}.1'"] = f"a{i}"
        assert is_satisfied(c1, alpha)


# ---------------------------------------------------------------------------
# Consistency partition / 𝒞₂
# ---------------------------------------------------------------------------

class TestPartitions:
    def test_single_part_when_k_is_one(self, shared_vertex_dmc):
        from dmcut.pipeline import enumerate_consistency_partitions

        parts = list(enumerate_consistency_partitions(_flows(shared_vertex_dmc), 1))
        assert parts == [(("x1.1", "x2.1", "x3.1"),)]

    def test_all_set_partitions(self, shared_vertex_dmc):
        from dmcut.pipeline import enumerate_consistency_partitions

        parts = list(enumerate_consistency_partitions(_flows(shared_vertex_dmc), 3))
        assert len(parts) == 5
        assert len(set(parts)) == 5

    def test_too_many_variables(self, shared_vertex_dmc):
        from dmcut.errors import InputError
        from dmcut.pipeline import enumerate_consistency_partitions

        with pytest.raises(InputError):
            enumerate_consistency_partitions(_flows(shared_vertex_dmc), 0)

    def test_complying_partition(self, shared_vertex_dmc, disjoint_paths_dmc):
        from dmcut.pipeline import complying_partition

        assert complying_partition(_flows(shared_vertex_dmc)) == (("x1.1", "x2.1", "x3.1"),)
        assert complying_partition(_flows(disjoint_paths_dmc)) == (
            ("x1.1",),
            ("x2.1",),
            ("x3.1",),
        )

    def test_c2_restricts_and_links(self, shared_vertex_dmc):
        from dmcut.pipeline import build_csp_c1, build_csp_c2, extract_solution

        flows = _flows(shared_vertex_dmc)
        c1 = build_csp_c1(flows, 1)
        c2 = build_csp_c2(c1, (("x1.1", "x2.1", "x3.1"),))
        assert len(c2.constraints) == len(c1.constraints) + 3
        assert all(len(d) == 1 for d in c2.domains.values())
        valuation = {name: "c" for name in c2.variables}
        assert extract_solution(valuation, flows) == {"c"}

    def test_c2_singletons_unchanged(self, disjoint_paths_dmc):
        from dmcut.pipeline import build_csp_c1, build_csp_c2

        c1 = build_csp_c1(_flows(disjoint_paths_dmc), 3)
        assert build_csp_c2(c1, (("x1.1",), ("x2.1",), ("x3.1",))) is c1


# ---------------------------------------------------------------------------
# 무관 정점 규칙
# ---------------------------------------------------------------------------

class TestIrrelevantVertex:
    def test_representative_of_first_cell(self):
        from dmcut.config import IrrelevantVertexConfig
        from dmcut.matrixgrid import adj_of_permutation, find_grid_minor
        from dmcut.pipeline import irrelevant_vertex

        binding = _transpose_binding(4)
        rel = binding.relation
        cfg = IrrelevantVertexConfig(zeta=1, rho=4, brute_check=False)
        outcome = irrelevant_vertex(binding, (), (), [], [], cfg)

        matrix = adj_of_permutation(rel.mapping, list(rel.left), list(rel.right))
        division = find_grid_minor(matrix, 4)
        r0, r1 = division.row_bounds[:2]
        c0, c1 = division.col_bounds[:2]
        first_row = int(np.argwhere(matrix.data[r0:r1, c0:c1])[0][0])
        assert outcome == rel.left[r0 + first_row]

    def test_small_matrix_certificate(self):
        from dmcut.config import IrrelevantVertexConfig
        from dmcut.pipeline import GridRankCertificate, irrelevant_vertex

        cfg = IrrelevantVertexConfig(zeta=1, rho=8, brute_check=False)
        outcome = irrelevant_vertex(_transpose_binding(2), (), (), [], [], cfg)
        assert outcome == GridRankCertificate(8, "matrix-smaller-than-rho")

    def test_identity_has_no_grid_minor(self):
        from dmcut.config import IrrelevantVertexConfig
        from dmcut.permcsp import Binding, OrderedDomain, PermutationConstraint
        from dmcut.pipeline import GridRankCertificate, irrelevant_vertex

        domain = OrderedDomain(f"v{i}" for i in range(8))
        binding = Binding("x1.1", "x2.1", PermutationConstraint.identity(domain, domain))
        cfg = IrrelevantVertexConfig(zeta=1, rho=2, brute_check=False)
        outcome = irrelevant_vertex(binding, (), (), [], [], cfg)
        assert outcome == GridRankCertificate(2, "no-grid-minor")

    def test_split_blocks_prevent_monochromatic_grid(self):
        from dmcut.config import IrrelevantVertexConfig
        from dmcut.pipeline import GridRankCertificate, irrelevant_vertex

        binding = _transpose_binding(2)
        blocks = [[name] for name in binding.relation.left]
        cfg = IrrelevantVertexConfig(zeta=1, rho=2, brute_check=False)
        outcome = irrelevant_vertex(binding, (), (), blocks, [], cfg)
        assert outcome == GridRankCertificate(2, "no-monochromatic-subgrid")

    def test_requires_permutation(self):
        from dmcut.config import IrrelevantVertexConfig
        from dmcut.errors import InputError
        from dmcut.permcsp import Binding, DownclosedRelation, OrderedDomain
        from dmcut.pipeline import irrelevant_vertex

        d = OrderedDomain(["a"])
        binding = Binding("x1.1", "x2.1", DownclosedRelation.full(d, d))
        with pytest.raises(InputError):
            irrelevant_vertex(binding, (), (), [], [], IrrelevantVertexConfig())

    def test_brute_check_needs_context(self):
        from dmcut.config import IrrelevantVertexConfig
        from dmcut.errors import InputError
        from dmcut.pipeline import irrelevant_vertex

        with pytest.raises(InputError):
            irrelevant_vertex(_transpose_binding(2), (), (), [], [], IrrelevantVertexConfig())

    def test_check_irrelevance(self, shared_vertex_dmc):
        from dmcut.pipeline import check_irrelevance

        p1, p2 = ("s1", "c", "t1"), ("s2", "c", "t2")
        assert not check_irrelevance(shared_vertex_dmc, "c", p1, p2)
        assert check_irrelevance(shared_vertex_dmc, "c", p1, ("s3", "t3"))

    def test_crossing_flows_yield_verified_vertex(self, crossing_flows_dmc):
        from dmcut.config import IrrelevantVertexConfig
        from dmcut.permcsp import Binding, OrderedDomain, PermutationConstraint
        from dmcut.pipeline import irrelevant_vertex

        first, second = ("b", "a", "d", "c"), ("c", "a", "d", "b")
        binding = Binding(
            "x1.1",
            "x2.1",
            PermutationConstraint.identity(OrderedDomain(first), OrderedDomain(second)),
        )
        cfg = IrrelevantVertexConfig(zeta=1, rho=2, brute_check=True)
        outcome = irrelevant_vertex(
            binding,
            ("s1", *first, "t1"),
            ("s2", *second, "t2"),
            [first],
            [second],
            cfg,
            context=crossing_flows_dmc,
        )
        assert outcome == "a"

    def test_crossing_flows_brute_verdicts(self, crossing_flows_dmc):
        from dmcut.pipeline import check_irrelevance

        p1 = ("s1", "b", "a", "d", "c", "t1")
        p2 = ("s2", "c", "a", "d", "b", "t2")
        # {a, e} 는 d 를 그림자로 남기고, {b, e} 는 그림자 없이 두 경로를 b 에서 가름
        assert check_irrelevance(crossing_flows_dmc, "a", p1, p2)
        assert not check_irrelevance(crossing_flows_dmc, "b", p1, p2)

    def test_rule_fires_inside_solve(self, crossing_flows_dmc, settings_default):
        from dmcut.config import IrrelevantVertexConfig
        from dmcut.multicut import brute_force_dmc, is_solution
        from dmcut.pipeline import PipelineTrace, solve_dmc

        trace = PipelineTrace()
        cfg = IrrelevantVertexConfig(zeta=1, rho=2, brute_check=True)
        found = solve_dmc(
            crossing_flows_dmc,
            cfg,
            seed=0,
            strategy="randomized",
            trace=trace,
            settings=settings_default,
        )
        assert ("a", True) in trace.removed
        assert found is not None
        assert "a" not in found
        assert is_solution(crossing_flows_dmc, found)
        assert brute_force_dmc(crossing_flows_dmc) is not None


# ---------------------------------------------------------------------------
# solve_dmc
# ---------------------------------------------------------------------------

class TestSolveDmc:
    def test_shared_vertex(self, shared_vertex_dmc, settings_default):
        from dmcut.pipeline import PipelineTrace, solve_dmc

        trace = PipelineTrace()
        assert solve_dmc(shared_vertex_dmc, trace=trace, settings=settings_default) == {"c"}
        assert trace.instances == 1
        assert trace.csp_calls >= 1
        assert set(trace.to_dict()) == {
            "instances",
            "triples",
            "partitions",
            "csp_calls",
            "skipped_branches",
            "removed",
        }

    def test_disjoint_paths(self, disjoint_paths_dmc, settings_default):
        from dmcut.pipeline import solve_dmc

        assert solve_dmc(disjoint_paths_dmc, settings=settings_default) == {"a1", "a2", "a3"}

    def test_shadowed_instance(self, shadowed_dmc, settings_default):
        from dmcut.pipeline import solve_dmc

        assert solve_dmc(shadowed_dmc, settings=settings_default) == {"a1", "a2", "a3"}

    def test_no_instance(self, disjoint_paths_dmc, settings_default):
        from dataclasses import replace

        from dmcut.pipeline import solve_dmc

        assert solve_dmc(replace(disjoint_paths_dmc, k=2), settings=settings_default) is None

    def test_already_separated(self, settings_default):
        from dmcut.digraph import Digraph
        from dmcut.multicut import DmcInstance
        from dmcut.pipeline import solve_dmc

        g = Digraph(["s1", "t1", "s2", "t2", "s3", "t3"])
        pairs = [("s1", "t1"), ("s2", "t2"), ("s3", "t3")]
        assert solve_dmc(DmcInstance.from_graph(g, pairs, 0), settings=settings_default) == set()

    @pytest.mark.slow
    @given(dmc_instances(max_vertices=6))
    @settings(max_examples=40)
    def test_agrees_with_oracle(self, inst):
        from dmcut.config import Settings
        from dmcut.multicut import brute_force_dmc, is_solution
        from dmcut.pipeline import PipelineTrace, solve_dmc

        trace = PipelineTrace()
        found = solve_dmc(inst, trace=trace, settings=Settings())
        if found is not None:
            assert is_solution(inst, found)
        if trace.skipped_branches == 0:
            assert (found is None) == (brute_force_dmc(inst) is None)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(210))
    def test_seeded_corpus(self, seed, settings_default):
        from dmcut.generators import random_dmc
        from dmcut.multicut import brute_force_dmc, is_solution
        from dmcut.pipeline import PipelineTrace, solve_dmc

        # n = 4..10, k = 1..3 의 모든 조합이 시드 순서대로 돌아가며 나옴
        inst = random_dmc(seed, n=4 + seed % 7, density=0.3, k=1 + seed % 3)
        trace = PipelineTrace()
        found = solve_dmc(inst, trace=trace, settings=settings_default)
        if found is not None:
            assert is_solution(inst, found)
            assert len(found) <= inst.k
        if trace.skipped_branches == 0:
            assert (found is None) == (brute_force_dmc(inst) is None)


# ---------------------------------------------------------------------------
# 해에서 얻은 증강과 𝒞₁ / 𝒞₂
# ---------------------------------------------------------------------------

def _witness_flows(inst, solution):
    """각 쌍마다 solution 안의 포함 최소 분리자 Z_i 와 그 증강으로 만든 PairFlow."""
    from dmcut.config import AugmentationSettings
    from dmcut.flowaug import augment_exhaustive
    from dmcut.multicut import shrink_to_minimal_separator
    from dmcut.pipeline import PairFlow

    flows = []
    for index, (s, t) in enumerate(inst.terminal_pairs, start=1):
        z = shrink_to_minimal_separator(inst.g, s, t, solution)
        augmented = dict(augment_exhaustive(inst.g, s, t, inst.k, AugmentationSettings()))
        assert z in augmented
        flows.append(PairFlow.from_augmentation(index, inst, z, augmented[z]))
    return flows


class TestComplyingCorpus:
    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(60))
    def test_solution_complies(self, seed):
        from dmcut.digraph import is_separator
        from dmcut.generators import random_dmc
        from dmcut.multicut import brute_force_dmc
        from dmcut.permcsp import is_satisfied, solve
        from dmcut.pipeline import (
            BuildFailure,
            build_csp_c1,
            build_csp_c2,
            complying_partition,
            enumerate_consistency_partitions,
            extract_solution,
            variable_pairs,
        )

        inst = random_dmc(seed, n=4 + seed % 5, density=0.3, k=1 + seed % 3)
        solution = brute_force_dmc(inst)
        if solution is None:
            return
        flows = _witness_flows(inst, solution)
        for flow in flows:
            z = flow.separator
            assert is_separator(inst.g, [flow.source], [flow.sink], z)
            assert all(
                not is_separator(inst.g, [flow.source], [flow.sink], z - {v}) for v in z
            )
            assert flow.value == len(z)

        c1 = build_csp_c1(flows, inst.k)
        assert not isinstance(c1, BuildFailure)
        alpha = {}
        for var in variable_pairs(flows):
            (hit,) = set(var.path) & flows[var.pair - 1].separator
            alpha[var.forward] = alpha[var.reverse] = hit
        assert is_satisfied(c1, alpha)
        # 𝒞₁ 의 임의의 해도 쌍마다 분리자를 고름
        valuation = solve(c1)
        for flow in flows:
            chosen = {valuation[var.forward] for var in variable_pairs([flow])}
            assert is_separator(inst.g, [flow.source], [flow.sink], chosen)

        partition = complying_partition(flows)
        assert partition in set(enumerate_consistency_partitions(flows, inst.k))
        c2 = build_csp_c2(c1, partition)
        assert is_satisfied(c2, alpha)
        assert solve(c2) is not None
        assert extract_solution(alpha, flows) <= solution
