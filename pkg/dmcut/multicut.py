"""멀티컷 인스턴스, brute-force 오라클, 그림자(shadow) 계산

3쌍 Directed Multicut(DmcInstance)과 가중치가 있는 2쌍 변형(WdmcInstance),
그리고 저장소 전체의 정답 기준이 되는 brute-force 해법을 제공합니다.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

from dmcut.config import CapacityLimits, default_limits
from dmcut.digraph import Digraph, cheapest_path, reach, reach_reverse
from dmcut.errors import InputError

logger = logging.getLogger(__name__)

Pair = tuple[str, str]
VertexSet = frozenset[str]


def _normalize_pairs(pairs: Iterable[Sequence[str]], expected: int) -> tuple[Pair, ...]:
    normalized = tuple((str(s), str(t)) for s, t in pairs)
    if len(normalized) != expected:
        raise InputError(f"Expected exactly {expected} terminal pairs, got {len(normalized)}")
    for s, t in normalized:
        if s == t:
            raise InputError(f"Terminal pair ({s}, {t}) has identical endpoints")
    return normalized


# ---------------------------------------------------------------------------
# DmcInstance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DmcInstance:
    """3쌍 Directed Multicut 인스턴스.

    g 의 정점 삭제 가능 플래그는 V(g) ∖ undeletable 로 정규화됩니다.

    Raises:
        InputError: 쌍이 정확히 3개가 아니거나, 단말이 undeletable 에 없거나,
            undeletable 이 V(g) 밖의 정점을 포함하거나, k < 0 일 때
    """

    g: Digraph
    terminal_pairs: tuple[Pair, ...]
    k: int
    undeletable: VertexSet = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        pairs = _normalize_pairs(self.terminal_pairs, 3)
        frozen = frozenset(self.undeletable)
        self.g.check_vertices(frozen)
        terminals = {v for pair in pairs for v in pair}
        missing = sorted(terminals - frozen)
        if missing:
            raise InputError(f"Terminals must be undeletable: {missing}")
        if self.k < 0:
            raise InputError(f"Budget k must be non-negative: {self.k}")
        object.__setattr__(self, "terminal_pairs", pairs)
        object.__setattr__(self, "undeletable", frozen)
        object.__setattr__(self, "g", self.g.with_deletable(set(self.g.vertices) - frozen))

    @classmethod
    def from_graph(
        cls, g: Digraph, terminal_pairs: Iterable[Sequence[str]], k: int
    ) -> DmcInstance:
        """그래프의 삭제 불가 정점과 단말을 합쳐 V∞ 로 사용합니다."""
        pairs = _normalize_pairs(terminal_pairs, 3)
        frozen = {v for v in g.vertices if not g.is_deletable(v)}
        frozen |= {v for pair in pairs for v in pair}
        return cls(g, pairs, k, frozenset(frozen))

    @property
    def sources(self) -> tuple[str, ...]:
        return tuple(sorted({s for s, _ in self.terminal_pairs}))

    @property
    def sinks(self) -> tuple[str, ...]:
        return tuple(sorted({t for _, t in self.terminal_pairs}))

    @property
    def deletable(self) -> tuple[str, ...]:
        return tuple(v for v in self.g.vertices if v not in self.undeletable)

    def with_graph(self, g: Digraph, undeletable: Iterable[str]) -> DmcInstance:
        return DmcInstance(g, self.terminal_pairs, self.k, frozenset(undeletable))


def _separates_all(g: Digraph, pairs: Iterable[Pair], s: VertexSet) -> bool:
    return all(t not in reach(g, [src], s) for src, t in pairs)


def is_solution(inst: DmcInstance, s: Iterable[str]) -> bool:
    """s 가 V∞ 와 겹치지 않고 |s| ≤ k 이며 모든 쌍을 분리하면 True.

    Raises:
        InputError: 알 수 없는 정점이 있을 때
    """
    s = frozenset(s)
    inst.g.check_vertices(s)
    if s & inst.undeletable or len(s) > inst.k:
        return False
    return _separates_all(inst.g, inst.terminal_pairs, s)


def _subset_budget(limits: CapacityLimits, n: int, k: int) -> None:
    limits.check("max_deletable", n)
    limits.check("max_subsets", sum(math.comb(n, i) for i in range(min(n, k) + 1)))


def _subsets(inst: DmcInstance, limits: CapacityLimits) -> Iterator[VertexSet]:
    """크기 오름차순, 사전순으로 삭제 가능 부분집합을 생성합니다."""
    deletable = inst.deletable
    _subset_budget(limits, len(deletable), inst.k)
    for size in range(min(len(deletable), inst.k) + 1):
        for combo in combinations(deletable, size):
            yield frozenset(combo)


def brute_force_dmc(
    inst: DmcInstance, limits: CapacityLimits | None = None
) -> VertexSet | None:
    """최소 크기 해(사전순 첫 번째)를 반환합니다. 해가 없으면 None.

    Raises:
        CapacityError: 삭제 가능 정점 수나 부분집합 수가 한도를 넘을 때
    """
    for s in _subsets(inst, limits or default_limits()):
        if _separates_all(inst.g, inst.terminal_pairs, s):
            return s
    return None


def minimal_solutions(
    inst: DmcInstance, limits: CapacityLimits | None = None
) -> list[VertexSet]:
    """크기 ≤ k 인 모든 포함 최소 해 (크기, 사전순)."""
    found: list[VertexSet] = []
    for s in _subsets(inst, limits or default_limits()):
        if any(prev <= s for prev in found):
            continue
        if _separates_all(inst.g, inst.terminal_pairs, s):
            found.append(s)
    return found


def shrink_to_minimal_separator(g: Digraph, s: str, t: str, x: Iterable[str]) -> VertexSet:
    """x 안에서 정렬 순서대로 정점을 빼 보며 포함 최소 st-분리자를 만듭니다.

    Raises:
        InputError: x 가 s 와 t 를 분리하지 않을 때
    """
    current = set(x)
    if t in reach(g, [s], current):
        raise InputError(f"Set does not separate {s} from {t}")
    for v in sorted(current):
        trial = current - {v}
        if t not in reach(g, [s], trial):
            current = trial
    return frozenset(current)


# ---------------------------------------------------------------------------
# 그림자 (shadow)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShadowReport:
    forward: VertexSet
    reverse: VertexSet

    @property
    def union(self) -> VertexSet:
        return self.forward | self.reverse

    @property
    def is_empty(self) -> bool:
        return not self.forward and not self.reverse


def shadows(inst: DmcInstance, x: Iterable[str]) -> ShadowReport:
    """g − x 에서의 forward / reverse 그림자.

    forward 는 어떤 s_i 에서도 도달할 수 없는 정점, reverse 는 어떤 t_i 에도
    도달하지 못하는 정점입니다 (x 와 V∞ 제외).

    Raises:
        InputError: x 가 V∞ 와 겹칠 때
    """
    x = frozenset(x)
    inst.g.check_vertices(x)
    if x & inst.undeletable:
        overlap = sorted(x & inst.undeletable)
        raise InputError(f"Shadow set overlaps undeletable vertices: {overlap}")
    candidates = set(inst.g.vertices) - x - inst.undeletable
    forward = candidates - reach(inst.g, inst.sources, x)
    reverse = candidates - reach_reverse(inst.g, inst.sinks, x)
    return ShadowReport(frozenset(forward), frozenset(reverse))


def is_shadowless(inst: DmcInstance, s: Iterable[str]) -> bool:
    return shadows(inst, s).is_empty


def enumerate_shadowless_solutions(
    inst: DmcInstance, limits: CapacityLimits | None = None
) -> list[VertexSet]:
    """크기 ≤ k 이고 그림자가 없는 모든 해 (크기, 사전순)."""
    return [
        s
        for s in _subsets(inst, limits or default_limits())
        if _separates_all(inst.g, inst.terminal_pairs, s) and is_shadowless(inst, s)
    ]


# ---------------------------------------------------------------------------
# WdmcInstance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WdmcInstance:
    """가중치가 있는 2쌍 Directed Multicut 인스턴스.

    wt 에 없는 정점은 가중치 1 이며, 단말 가중치는 W+1 로 고정됩니다.
    """

    g: Digraph
    terminal_pairs: tuple[Pair, ...]
    wt: Mapping[str, int]
    k: int
    W: int

    def __post_init__(self) -> None:
        pairs = _normalize_pairs(self.terminal_pairs, 2)
        terminals = {v for pair in pairs for v in pair}
        self.g.check_vertices(terminals)
        self.g.check_vertices(self.wt)
        if self.k < 0 or self.W < 0:
            raise InputError(f"Budgets must be non-negative: k={self.k}, W={self.W}")
        weights: dict[str, int] = {}
        for v in self.g.vertices:
            w = int(self.wt.get(v, 1))
            if w < 0:
                raise InputError(f"Negative weight on {v}: {w}")
            weights[v] = self.W + 1 if v in terminals else w
        object.__setattr__(self, "terminal_pairs", pairs)
        object.__setattr__(self, "wt", weights)

    @property
    def undeletable(self) -> VertexSet:
        return frozenset(
            v for v in self.g.vertices if not self.g.is_deletable(v) or self.wt[v] > self.W
        )

    def weight(self, s: Iterable[str]) -> int:
        return sum(self.wt[v] for v in s)


def is_wdmc_solution(inst: WdmcInstance, s: Iterable[str]) -> bool:
    s = frozenset(s)
    inst.g.check_vertices(s)
    if s & inst.undeletable or len(s) > inst.k or inst.weight(s) > inst.W:
        return False
    return _separates_all(inst.g, inst.terminal_pairs, s)


def brute_force_wdmc(
    inst: WdmcInstance, limits: CapacityLimits | None = None
) -> VertexSet | None:
    """|S| ≤ k, wt(S) ≤ W 인 해 중 (가중치, 크기, 사전순) 최소인 것을 반환합니다.

    살아 있는 단말 경로 위의 삭제 가능 정점으로 분기하는 한정 분기 탐색이며,
    서로 겹치지 않는 경로 묶음으로 하한을 계산합니다.

    Raises:
        CapacityError: 탐색 노드 수가 max_search_nodes 를 넘을 때
    """
    limits = limits or default_limits()
    frozen = inst.undeletable
    best: list[tuple[int, int, tuple[str, ...]]] = []
    nodes = 0

    def branch(chosen: VertexSet, forbidden: VertexSet, weight: int) -> None:
        nonlocal nodes
        nodes += 1
        limits.check("max_search_nodes", nodes)
        if weight > inst.W or len(chosen) > inst.k:
            return

        def branchable(v: str) -> bool:
            return v not in frozen and v not in forbidden

        paths = []
        for s, t in inst.terminal_pairs:
            path = cheapest_path(inst.g, [s], [t], removed=chosen, cost=branchable)
            if path is not None:
                paths.append([v for v in path if branchable(v)])

        if not paths:
            key = (weight, len(chosen), tuple(sorted(chosen)))
            if not best or key < best[0]:
                best[:] = [key]
            return
        if any(not p for p in paths):
            return

        # 하한: 분기 가능 정점이 서로 겹치지 않는 경로마다 최소 한 정점이 더 필요
        packed: set[str] = set()
        extra_count = 0
        extra_weight = 0
        for p in sorted(paths, key=len):
            if packed.isdisjoint(p):
                packed.update(p)
                extra_count += 1
                extra_weight += min(inst.wt[v] for v in p)
        bound_size = len(chosen) + extra_count
        bound_weight = weight + extra_weight
        if bound_size > inst.k or bound_weight > inst.W:
            return
        if best and (bound_weight, bound_size) > best[0][:2]:
            return

        target = min(paths, key=len)
        banned = set(forbidden)
        for v in target:
            branch(chosen | {v}, frozenset(banned), weight + inst.wt[v])
            banned.add(v)

    branch(frozenset(), frozenset(), 0)
    logger.debug("Weighted multicut search visited %d nodes", nodes)
    if not best:
        return None
    return frozenset(best[0][2])
