"""3-DMC 파이프라인: 증강된 흐름 → Permutation CSP → 무관 정점 규칙 → 해 추출

solve_dmc 의 단계:
  1. shadow_removal 로 그림자 없는 해를 갖는 인스턴스 목록 생성
  2. 각 인스턴스, 각 단말 쌍마다 augment_exhaustive
  3. 증강 조합(triple)마다 build_csp_c1
  4. consistency partition 마다 build_csp_c2
  5. 일관성 순열 제약에 irrelevant_vertex 를 반복 적용해 도메인 축소
  6. permcsp.solve → extract_solution → is_solution 검증
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

import numpy as np

from dmcut.config import (
    CapacityLimits,
    IrrelevantVertexConfig,
    Settings,
    default_limits,
    get_settings,
)
from dmcut.digraph import Digraph, Path, reach, reach_reverse
from dmcut.errors import CapacityError, InputError
from dmcut.flowaug import Augmentation, augment_exhaustive
from dmcut.matrixgrid import adj_of_permutation, find_grid_minor
from dmcut.multicut import (
    DmcInstance,
    VertexSet,
    enumerate_shadowless_solutions,
    is_solution,
)
from dmcut.permcsp import (
    Binding,
    DownclosedRelation,
    OrderedDomain,
    PermCspInstance,
    PermutationConstraint,
    Valuation,
    solve,
)
from dmcut.shadowrm import CoveringStrategy, shadow_removal

logger = logging.getLogger(__name__)

REVERSE_SUFFIX = "'"

ConsistencyPartition = tuple[tuple[str, ...], ...]


class BuildFailure(enum.Enum):
    FLOW_EXCEEDS_BUDGET = "flow-exceeds-budget"


# ---------------------------------------------------------------------------
# 쌍별 흐름과 변수
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairFlow:
    """단말 쌍 i 의 증강 그래프 g + A_i, 흐름 경로 𝒫_i, 분리자 Z_i, 블록 분할 ℬ_i."""

    index: int
    source: str
    sink: str
    graph: Digraph
    paths: tuple[Path, ...]
    separator: VertexSet = frozenset()
    partition: tuple[tuple[str, ...], ...] = ()
    infinite: bool = False

    @classmethod
    def from_augmentation(
        cls, index: int, inst: DmcInstance, z: Iterable[str], aug: Augmentation
    ) -> PairFlow:
        s, t = inst.terminal_pairs[index - 1]
        return cls(
            index=index,
            source=s,
            sink=t,
            graph=aug.graph(inst.g),
            paths=aug.flow.paths,
            separator=frozenset(z),
            partition=aug.partition,
            infinite=aug.flow.is_infinite,
        )

    @property
    def value(self) -> int:
        return len(self.paths)


@dataclass(frozen=True)
class FlowVariablePair:
    """흐름 경로 P^i_j 하나에 대응하는 변수 x^i_j (s→t 순서) 와 x'^i_j (역순)."""

    pair: int
    path_index: int
    path: Path
    domain: tuple[str, ...]

    @property
    def forward(self) -> str:
        return f"x{self.pair}.{self.path_index}"

    @property
    def reverse(self) -> str:
        return self.forward + REVERSE_SUFFIX

    def forward_domain(self) -> OrderedDomain:
        return OrderedDomain(self.domain)

    def reverse_domain(self) -> OrderedDomain:
        return OrderedDomain(reversed(self.domain))


def variable_pairs(flows: Sequence[PairFlow]) -> list[FlowVariablePair]:
    """모든 흐름 경로의 변수 쌍 (쌍 인덱스, 경로 인덱스 순서, 1-기반)."""
    result = []
    for flow in flows:
        for j, path in enumerate(flow.paths, start=1):
            domain = tuple(v for v in path[1:-1] if flow.graph.is_deletable(v))
            result.append(FlowVariablePair(flow.index, j, tuple(path), domain))
    return result


def is_reverse_variable(name: str) -> bool:
    return name.endswith(REVERSE_SUFFIX)


# ---------------------------------------------------------------------------
# 𝒞₁
# ---------------------------------------------------------------------------

def _connections(flow: PairFlow) -> dict[str, set[str]]:
    """흐름 정점 u 마다, 내부 정점이 흐름 경로 밖에 있는 u→v 경로가 있는 흐름 정점 v.

    여러 경로가 공유하는 정점은 길이 0 경로로 자기 자신과 연결됩니다.
    """
    on_flow = {v for path in flow.paths for v in path}
    joined: dict[str, set[str]] = {}
    for u in sorted(on_flow):
        region = reach(flow.graph, [u], on_flow - {u})
        targets = {u}
        for w in region:
            targets.update(v for v in flow.graph.successors(w) if v in on_flow)
        joined[u] = targets
    return joined


def _order_relation(
    joined: Mapping[str, set[str]],
    first: FlowVariablePair,
    second: FlowVariablePair,
) -> set[tuple[str, str]]:
    """D_j × D'_{j'} 에서 u < x, y < v 인 연결 (u, v) 가 있는 쌍 (x, y) 를 뺀 집합."""
    pos_a = {v: i for i, v in enumerate(first.path)}
    pos_b = {v: i for i, v in enumerate(second.path)}
    # x 위치마다, 그보다 앞선 u 에서 닿는 v 의 최대 위치
    reach_limit = [-1] * len(first.path)
    for u, targets in joined.items():
        if u not in pos_a:
            continue
        best = max((pos_b[v] for v in targets if v in pos_b), default=-1)
        for i in range(pos_a[u] + 1, len(first.path)):
            reach_limit[i] = max(reach_limit[i], best)
    return {
        (x, y)
        for x in first.domain
        for y in second.domain
        if not pos_b[y] < reach_limit[pos_a[x]]
    }


def build_csp_c1(
    flows: Sequence[PairFlow], k: int
) -> Union[PermCspInstance, BuildFailure]:
    """증강된 흐름으로부터 𝒞₁ 을 만듭니다.

    Args:
        flows: 세 단말 쌍의 PairFlow (index 1..3)
        k: 예산

    Returns:
        변수 x^i_j, x'^i_j 와 항등 순열 제약 ρ, downclosed 제약 R 을 갖는 인스턴스.
        어떤 흐름 값이 k 를 넘으면 BuildFailure.FLOW_EXCEEDS_BUDGET.
    """
    for flow in flows:
        if flow.infinite or flow.value > k:
            logger.debug("Pair %d flow %s exceeds k=%d", flow.index, flow.value, k)
            return BuildFailure.FLOW_EXCEEDS_BUDGET

    pairs = variable_pairs(flows)
    domains: dict[str, OrderedDomain] = {}
    constraints: list[Binding] = []
    for var in pairs:
        domains[var.forward] = var.forward_domain()
        domains[var.reverse] = var.reverse_domain()
        constraints.append(
            Binding(
                var.forward,
                var.reverse,
                PermutationConstraint.identity(domains[var.forward], domains[var.reverse]),
            )
        )

    for flow in flows:
        group = [var for var in pairs if var.pair == flow.index]
        if not group:
            continue
        joined = _connections(flow)
        for first, second in product(group, repeat=2):
            kept = _order_relation(joined, first, second)
            relation = DownclosedRelation.from_pairs(
                domains[first.forward], domains[second.reverse], kept
            )
            constraints.append(Binding(first.forward, second.reverse, relation))
    return PermCspInstance(domains, constraints)


# ---------------------------------------------------------------------------
# Consistency partition / 𝒞₂
# ---------------------------------------------------------------------------

def _restricted_growth(
    items: Sequence[tuple[str, int]], k: int
) -> Iterator[ConsistencyPartition]:
    parts: list[list[tuple[str, int]]] = []

    def place(position: int) -> Iterator[ConsistencyPartition]:
        if position == len(items):
            yield tuple(tuple(name for name, _ in part) for part in parts)
            return
        item = items[position]
        for part in parts:
            if len(part) < 3 and all(pair != item[1] for _, pair in part):
                part.append(item)
                yield from place(position + 1)
                part.pop()
        if len(parts) < k:
            parts.append([item])
            yield from place(position + 1)
            parts.pop()

    yield from place(0)


def enumerate_consistency_partitions(
    flows: Sequence[PairFlow], k: int
) -> Iterator[ConsistencyPartition]:
    """x-변수를 크기 ≤ 3 인 부분 ≤ k 개로 나누는 모든 분할 (같은 쌍 인덱스는 다른 부분).

    Raises:
        InputError: 변수 수가 3k 를 넘을 때
    """
    items = [(var.forward, var.pair) for var in variable_pairs(flows)]
    if len(items) > 3 * k:
        raise InputError(f"{len(items)} flow variables exceed 3k={3 * k}")
    return _restricted_growth(items, k)


def complying_partition(flows: Sequence[PairFlow]) -> ConsistencyPartition:
    """각 x^i_j 를 P^i_j ∩ Z_i 의 유일한 정점으로 묶은 분할.

    Raises:
        InputError: 어떤 경로가 분리자를 정확히 한 번 만나지 않을 때
    """
    groups: dict[str, list[str]] = {}
    by_index = {flow.index: flow for flow in flows}
    for var in variable_pairs(flows):
        hits = by_index[var.pair].separator & set(var.path)
        if len(hits) != 1:
            raise InputError(f"Path of {var.forward} meets its separator {len(hits)} times")
        groups.setdefault(next(iter(hits)), []).append(var.forward)
    return tuple(tuple(names) for names in groups.values())


def build_csp_c2(c1: PermCspInstance, partition: ConsistencyPartition) -> PermCspInstance:
    """같은 부분의 변수 도메인을 공유 정점으로 줄이고 항등 순열 제약을 추가합니다."""
    allowed: dict[str, list[str]] = {}
    for part in partition:
        if len(part) < 2:
            continue
        shared = set.intersection(*(set(c1.domains[name]) for name in part))
        for name in part:
            allowed[name] = sorted(shared)
            allowed[name + REVERSE_SUFFIX] = sorted(shared)
    if not allowed:
        return c1
    restricted = c1.restrict(allowed)
    extra = [
        Binding(
            a,
            b,
            PermutationConstraint.identity(restricted.domains[a], restricted.domains[b]),
        )
        for part in partition
        for a, b in combinations(part, 2)
    ]
    return restricted.with_constraints(extra)


def extract_solution(valuation: Mapping[str, str], flows: Sequence[PairFlow]) -> VertexSet:
    """x^i_j 에 할당된 정점의 합집합."""
    return frozenset(valuation[var.forward] for var in variable_pairs(flows))


# ---------------------------------------------------------------------------
# 무관 정점 규칙
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridRankCertificate:
    """규칙이 발동하지 않았음을 나타냅니다. rho 는 사용한 division 크기입니다."""

    rho: int
    reason: str


IrrelevanceOutcome = Union[GridRankCertificate, str]


def _block_of(blocks: Sequence[Sequence[str]], v: str) -> int:
    return next((i for i, block in enumerate(blocks) if v in block), -1)


def _splits(g: Digraph, s: VertexSet, v: str, path: Path) -> bool:
    """g − s 에서 v 앞의 정점은 t 에 닿지 않고 v 뒤의 정점은 s 에서 닿지 않으면 True."""
    source, sink = path[0], path[-1]
    position = path.index(v)
    from_source = reach(g, [source], s)
    to_sink = reach_reverse(g, [sink], s)
    before = set(path[:position]) - s
    after = set(path[position + 1:]) - s
    return not (before & to_sink) and not (after & from_source)


def check_irrelevance(
    inst: DmcInstance,
    v: str,
    path_a: Path,
    path_b: Path,
    limits: CapacityLimits | None = None,
) -> bool:
    """v 를 포함하고 두 경로를 모두 v 에서 가르는 그림자 없는 해가 없으면 True.

    Raises:
        CapacityError: 해 열거가 한도를 넘을 때
    """
    if v not in path_a or v not in path_b:
        return True
    for s in enumerate_shadowless_solutions(inst, limits):
        if v in s and _splits(inst.g, s, v, path_a) and _splits(inst.g, s, v, path_b):
            return False
    return True


def _representatives(
    relation: PermutationConstraint,
    rows: tuple[int, ...],
    cols: tuple[int, ...],
    data: np.ndarray,
) -> list[list[str]]:
    reps = []
    for r0, r1 in zip(rows, rows[1:]):
        line = []
        for c0, c1 in zip(cols, cols[1:]):
            cell = data[r0:r1, c0:c1]
            i, _ = (int(x) for x in next(zip(*cell.nonzero())))
            line.append(relation.left[r0 + i])
        reps.append(line)
    return reps


def irrelevant_vertex(
    pi: Binding,
    path_a: Path,
    path_b: Path,
    blocks_a: Sequence[Sequence[str]],
    blocks_b: Sequence[Sequence[str]],
    cfg: IrrelevantVertexConfig,
    context: DmcInstance | None = None,
    limits: CapacityLimits | None = None,
) -> IrrelevanceOutcome:
    """일관성 순열 제약의 행렬에서 제거 가능한 정점을 찾거나 GridRankCertificate 를 반환합니다.

    ρ-grid minor 의 각 셀에서 첫 번째 1 을 대표로 고르고, 대표 정점이 속한 (ℬ_a, ℬ_b)
    블록 쌍으로 셀을 칠한 뒤, 단색 2ζ × 2ζ 부분 격자의 (ζ, ζ) 대표를 후보로 냅니다.

    Args:
        pi: 두 x-변수 사이의 순열 제약
        path_a, path_b: 두 변수의 흐름 경로
        blocks_a, blocks_b: 두 단말 쌍의 블록 분할
        cfg: zeta / rho / brute_check
        context: brute_check 에 사용할 인스턴스
        limits: 용량 한도

    Raises:
        InputError: 순열 제약이 아니거나 brute_check 인데 context 가 없을 때
    """
    relation = pi.relation
    if not isinstance(relation, PermutationConstraint):
        raise InputError(f"Expected a permutation constraint on {pi.left}, {pi.right}")
    if cfg.brute_check and context is None:
        raise InputError("brute_check requires the instance the flows belong to")
    limits = limits or default_limits()

    rho, zeta = cfg.rho, cfg.zeta
    if rho > min(len(relation.left), len(relation.right)):
        return GridRankCertificate(rho, "matrix-smaller-than-rho")
    matrix = adj_of_permutation(relation.mapping, list(relation.left), list(relation.right))
    division = find_grid_minor(matrix, rho, limits)
    if division is None:
        return GridRankCertificate(rho, "no-grid-minor")

    reps = _representatives(relation, division.row_bounds, division.col_bounds, matrix.data)
    colors = [
        [(_block_of(blocks_a, v), _block_of(blocks_b, v)) for v in line] for line in reps
    ]
    limits.check("max_search_nodes", math.comb(rho, 2 * zeta) ** 2)
    rejected: set[str] = set()
    for rows in combinations(range(rho), 2 * zeta):
        for cols in combinations(range(rho), 2 * zeta):
            color = colors[rows[0]][cols[0]]
            if any(colors[r][c] != color for r in rows for c in cols):
                continue
            v = reps[rows[zeta - 1]][cols[zeta - 1]]
            if v in rejected:
                continue
            if cfg.brute_check and not check_irrelevance(context, v, path_a, path_b, limits):
                rejected.add(v)
                continue
            return v
    reason = "unverified-candidates" if rejected else "no-monochromatic-subgrid"
    return GridRankCertificate(rho, reason)


# ---------------------------------------------------------------------------
# 전체 드라이버
# ---------------------------------------------------------------------------

@dataclass
class PipelineTrace:
    """solve_dmc 실행 카운터와 무관 정점 규칙이 제거한 정점 목록."""

    instances: int = 0
    triples: int = 0
    partitions: int = 0
    csp_calls: int = 0
    skipped_branches: int = 0
    removed: list[tuple[str, Optional[bool]]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "instances": self.instances,
            "triples": self.triples,
            "partitions": self.partitions,
            "csp_calls": self.csp_calls,
            "skipped_branches": self.skipped_branches,
            "removed": [{"vertex": v, "irrelevant": verdict} for v, verdict in self.removed],
        }


def _consistency_bindings(csp: PermCspInstance) -> list[Binding]:
    return [
        b
        for b in csp.constraints
        if b.kind == "permutation"
        and not is_reverse_variable(b.left)
        and not is_reverse_variable(b.right)
    ]


def _apply_irrelevant_rule(
    csp: PermCspInstance,
    inst: DmcInstance,
    flows: Sequence[PairFlow],
    cfg: IrrelevantVertexConfig,
    trace: PipelineTrace,
    limits: CapacityLimits,
) -> PermCspInstance | None:
    """규칙이 모든 일관성 제약에서 인증서를 낼 때까지 도메인에서 정점을 제거합니다.

    빈 도메인이 생기면 None.
    """
    by_name = {var.forward: var for var in variable_pairs(flows)}
    blocks = {flow.index: flow.partition for flow in flows}
    changed = True
    while changed:
        changed = False
        for binding in _consistency_bindings(csp):
            a, b = by_name[binding.left], by_name[binding.right]
            try:
                outcome = irrelevant_vertex(
                    binding, a.path, b.path, blocks[a.pair], blocks[b.pair], cfg, inst, limits
                )
            except CapacityError as e:
                logger.debug("Irrelevant-vertex rule skipped on %s/%s: %s", a.forward, b.forward, e)
                continue
            if isinstance(outcome, GridRankCertificate):
                continue
            verdict = True if cfg.brute_check else None
            trace.removed.append((outcome, verdict))
            logger.debug("Irrelevant vertex %s removed from %s, %s", outcome, a.forward, b.forward)
            names = (a.forward, a.reverse, b.forward, b.reverse)
            csp = csp.restrict(
                {name: [v for v in csp.domains[name] if v != outcome] for name in names}
            )
            if csp.has_empty_domain:
                return None
            changed = True
            break
    return csp


def _flow_key(flows: Sequence[PairFlow]) -> tuple:
    return tuple((flow.graph.arcs, flow.paths) for flow in flows)


def _solve_bypassed(
    inst: DmcInstance,
    original: DmcInstance,
    settings: Settings,
    cfg: IrrelevantVertexConfig,
    trace: PipelineTrace,
    limits: CapacityLimits,
) -> VertexSet | None:
    per_pair = []
    for index, (s, t) in enumerate(inst.terminal_pairs, start=1):
        try:
            augmented = augment_exhaustive(inst.g, s, t, inst.k, settings.augmentation, limits)
        except CapacityError as e:
            logger.warning("Augmentation skipped for pair %d: %s", index, e)
            trace.skipped_branches += 1
            return None
        per_pair.append([(index, z, aug) for z, aug in augmented])

    seen: set[tuple] = set()
    for triple in product(*per_pair):
        # 하나의 해 S ⊇ Z_1 ∪ Z_2 ∪ Z_3 에서 나올 수 없는 조합은 건너뜀
        if len(frozenset().union(*(z for _, z, _ in triple))) > inst.k:
            continue
        flows = [PairFlow.from_augmentation(index, inst, z, aug) for index, z, aug in triple]
        key = _flow_key(flows)
        if key in seen:
            continue
        seen.add(key)
        trace.triples += 1

        c1 = build_csp_c1(flows, inst.k)
        if isinstance(c1, BuildFailure):
            trace.skipped_branches += 1
            continue
        for partition in enumerate_consistency_partitions(flows, inst.k):
            trace.partitions += 1
            c2 = build_csp_c2(c1, partition)
            if c2.has_empty_domain:
                continue
            try:
                c2 = _apply_irrelevant_rule(c2, inst, flows, cfg, trace, limits)
                if c2 is None:
                    continue
                trace.csp_calls += 1
                valuation: Valuation | None = solve(c2, limits)
            except CapacityError as e:
                logger.warning("CSP branch skipped: %s", e)
                trace.skipped_branches += 1
                continue
            if valuation is None:
                continue
            candidate = extract_solution(valuation, flows)
            if is_solution(original, candidate):
                return candidate
            logger.debug("Candidate %s rejected by final validation", sorted(candidate))
    return None


def solve_dmc(
    inst: DmcInstance,
    cfg: IrrelevantVertexConfig | None = None,
    seed: int = 0,
    strategy: CoveringStrategy | str | None = None,
    trace: PipelineTrace | None = None,
    settings: Settings | None = None,
    limits: CapacityLimits | None = None,
) -> VertexSet | None:
    """3-DMC 를 파이프라인으로 풉니다.

    Args:
        inst: 3-DMC 인스턴스
        cfg: 무관 정점 규칙 설정 (미지정 시 configs/dmcut.yaml)
        seed: randomized 그림자 제거의 시드
        strategy: 그림자 제거 전략 (미지정 시 설정의 shadow_removal.strategy)
        trace: 카운터를 기록할 PipelineTrace
        settings: 전체 설정
        limits: 용량 한도

    Returns:
        is_solution 을 통과한 첫 번째 해. 모든 분기를 소진하면 None.

    Raises:
        CapacityError: 그림자 제거 단계가 한도를 넘을 때
    """
    settings = settings or get_settings()
    cfg = cfg or settings.irrelevant_vertex
    limits = limits or settings.capacity
    strategy = strategy or settings.shadow_removal.strategy
    trace = trace if trace is not None else PipelineTrace()

    logger.info("solve_dmc: n=%d, k=%d, strategy=%s", len(inst.g), inst.k, strategy)
    if is_solution(inst, frozenset()):
        return frozenset()
    bypassed = shadow_removal(inst, strategy, seed, settings.shadow_removal, limits)
    for candidate_inst in bypassed:
        trace.instances += 1
        found = _solve_bypassed(candidate_inst, inst, settings, cfg, trace, limits)
        if found is not None:
            logger.info(
                "solve_dmc: solution %s after %d triples, %d partitions",
                sorted(found),
                trace.triples,
                trace.partitions,
            )
            return found
    logger.info("solve_dmc: no solution after %d instances", trace.instances)
    return None
