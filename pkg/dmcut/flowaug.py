"""흐름 증강(flow-augmentation) 계약과 검증 도구

- 호환성(compatibility), star cut / core cut / witnessing flow (edge regime)
- 정점 ↔ 호 regime 변환 (edgeize / vertexize)
- interlaced 집합, soybean 탐색, 블록 분할 ℬ 검증
- 데스크 규모 전수 증강기 augment_exhaustive

원소(element)는 정점 ID(str) 또는 호 (u, v) 입니다.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence, Union

import networkx as nx

from dmcut.config import AugmentationSettings, CapacityLimits, default_limits, get_settings
from dmcut.digraph import (
    Arc,
    Digraph,
    FlowNetwork,
    Path,
    VertexFlow,
    enumerate_minimal_separators,
    is_valid_vertex_flow,
    max_arc_flow,
    max_vertex_flow,
    path_arcs,
    reach,
)
from dmcut.errors import InputError

logger = logging.getLogger(__name__)

Element = Union[str, Arc]
Walk = tuple[str, ...]


# ---------------------------------------------------------------------------
# 호환성
# ---------------------------------------------------------------------------

def is_compatible_vertex(
    g: Digraph, a: Iterable[Arc], z: Iterable[str], s: str, t: str
) -> bool:
    """g − z 와 (g + a) − z 에서 s 의 도달 집합이 같으면 True.

    Raises:
        InputError: z 가 s 또는 t 를 포함할 때
    """
    z = frozenset(z)
    if z & {s, t}:
        raise InputError(f"Separator must not contain terminals: {sorted(z & {s, t})}")
    augmented = g.with_arcs(a, deletable=False)
    return reach(g, [s], z) == reach(augmented, [s], z)


# ---------------------------------------------------------------------------
# Edge regime: star cut, core cut, witnessing flow
# ---------------------------------------------------------------------------

def _check_cut(g: Digraph, z: Iterable[Arc]) -> frozenset[Arc]:
    z = frozenset((str(u), str(v)) for u, v in z)
    for u, v in sorted(z):
        if not g.arc_deletable(u, v):
            raise InputError(f"Cut arc ({u}, {v}) is undeletable")
    return z


def _without_arcs(g: Digraph, z: frozenset[Arc]) -> Digraph:
    return Digraph(
        {v: g.is_deletable(v) for v in g.vertices},
        {arc: g.arc_deletable(*arc) for arc in g.arcs if arc not in z},
    )


def is_star_cut(g: Digraph, z: Iterable[Arc], s: str, t: str) -> bool:
    """z 가 st-cut 이고 모든 (u,v) ∈ z 에 대해 g − z 에서 s 가 u 에만 닿으면 True."""
    z = _check_cut(g, z)
    rest = _without_arcs(g, z)
    reached = reach(rest, [s])
    if t in reached:
        return False
    return all(u in reached and v not in reached for u, v in z)


def corecut(g: Digraph, z: Iterable[Arc], s: str, t: str) -> frozenset[Arc]:
    """g − z 에서 머리(head)가 여전히 t 에 닿는 z 의 호들."""
    z = _check_cut(g, z)
    reaching_t = nx.ancestors(_without_arcs(g, z).to_networkx(), t) | {t}
    return frozenset((u, v) for u, v in z if v in reaching_t)


def _flow_arcs(flow: VertexFlow) -> set[Arc]:
    return {arc for path in flow.paths for arc in path_arcs(path)}


def is_witnessing_flow(g: Digraph, z: Iterable[Arc], flow: VertexFlow) -> bool:
    """flow 가 st-maxflow 이고 흐름의 호와 z 의 교집합이 정확히 core cut 이면 True.

    Raises:
        InputError: core cut 이 st-mincut 이 아닐 때
    """
    z = _check_cut(g, z)
    s, t = flow.source, flow.sink
    core = corecut(g, z, s, t)
    best = max_arc_flow(g, s, t)
    if best.is_infinite or len(core) != best.value or t in reach(_without_arcs(g, core), [s]):
        raise InputError("Core cut is not an st-mincut")
    if flow.is_infinite or flow.value != best.value or len(flow.paths) != best.value:
        return False
    used: set[Arc] = set()
    for path in flow.paths:
        if path[0] != s or path[-1] != t:
            return False
        for arc in path_arcs(path):
            if not g.has_arc(*arc):
                return False
            if g.arc_deletable(*arc):
                if arc in used:
                    return False
                used.add(arc)
    return _flow_arcs(flow) & z == core


def witnessing_flow(g: Digraph, z: Iterable[Arc], s: str, t: str) -> VertexFlow | None:
    """z 와 정확히 core cut 에서만 만나는 maxflow 를 만듭니다. core 가 mincut 이 아니면 None."""
    z = _check_cut(g, z)
    core = corecut(g, z, s, t)
    best = max_arc_flow(g, s, t)
    if best.is_infinite or len(core) != best.value:
        return None
    flow = max_arc_flow(_without_arcs(g, z - core), s, t)
    if flow.is_infinite or flow.value != best.value:
        return None
    if _flow_arcs(flow) & z != core:
        return None
    return flow


# ---------------------------------------------------------------------------
# 정점 ↔ 호 regime 변환
# ---------------------------------------------------------------------------

SPLIT_IN = "|1"
SPLIT_OUT = "|2"
ARC_JOIN = "->"


@dataclass(frozen=True)
class EdgeMapping:
    """edgeize 결과의 정점 ↔ 분할 호 대응."""

    originals: tuple[str, ...]

    @staticmethod
    def inner(v: str) -> str:
        return v + SPLIT_IN

    @staticmethod
    def outer(v: str) -> str:
        return v + SPLIT_OUT

    def split_arc(self, v: str) -> Arc:
        return (self.inner(v), self.outer(v))

    def cut_of(self, separator: Iterable[str]) -> frozenset[Arc]:
        return frozenset(self.split_arc(v) for v in separator)

    def separator_of(self, cut: Iterable[Arc]) -> frozenset[str]:
        lookup = {self.split_arc(v): v for v in self.originals}
        try:
            return frozenset(lookup[tuple(arc)] for arc in cut)
        except KeyError as e:
            raise InputError(f"Arc {e.args[0]} is not a split arc") from None


@dataclass(frozen=True)
class VertexMapping:
    """vertexize 결과의 호 ↔ 정점 대응."""

    arcs: tuple[Arc, ...]

    @staticmethod
    def arc_vertex(u: str, v: str) -> str:
        return f"{u}{ARC_JOIN}{v}"

    def separator_of(self, cut: Iterable[Arc]) -> frozenset[str]:
        return frozenset(self.arc_vertex(u, v) for u, v in cut)

    def cut_of(self, separator: Iterable[str]) -> frozenset[Arc]:
        lookup = {self.arc_vertex(u, v): (u, v) for u, v in self.arcs}
        try:
            return frozenset(lookup[x] for x in separator)
        except KeyError as e:
            raise InputError(f"Vertex {e.args[0]} does not stand for an arc") from None


def edgeize(g: Digraph, terminals: Iterable[str] = ()) -> tuple[Digraph, EdgeMapping]:
    """각 정점 v 를 v|1 → v|2 분할 호로 바꿉니다.

    분할 호는 v 가 삭제 가능하고 terminals 에 없을 때만 삭제 가능하며,
    원래 호 (u, v) 는 삭제 불가 호 (u|2, v|1) 이 됩니다.
    """
    terminals = set(terminals)
    mapping = EdgeMapping(g.vertices)
    names = {mapping.inner(v) for v in g.vertices} | {mapping.outer(v) for v in g.vertices}
    if len(names) != 2 * len(g):
        raise InputError("Vertex names collide after splitting")
    arcs: dict[Arc, bool] = {}
    for v in g.vertices:
        arcs[mapping.split_arc(v)] = g.is_deletable(v) and v not in terminals
    for u, v in g.arcs:
        arcs[(mapping.outer(u), mapping.inner(v))] = False
    return Digraph({x: False for x in names}, arcs), mapping


def vertexize(g_edge: Digraph) -> tuple[Digraph, VertexMapping]:
    """각 호 (u, v) 를 정점 "u->v" 로 바꿉니다 (호가 삭제 가능할 때만 삭제 가능).

    원래 정점은 모두 삭제 불가가 됩니다.
    """
    mapping = VertexMapping(g_edge.arcs)
    vertices = {v: False for v in g_edge.vertices}
    arcs = []
    for u, v in g_edge.arcs:
        name = mapping.arc_vertex(u, v)
        if name in vertices:
            raise InputError(f"Arc vertex name {name!r} collides with an existing vertex")
        vertices[name] = g_edge.arc_deletable(u, v)
        arcs += [(u, name), (name, v)]
    return Digraph(vertices, arcs), mapping


# ---------------------------------------------------------------------------
# Interlaced 집합
# ---------------------------------------------------------------------------

def _positions(p: Sequence[str]) -> dict[Element, int]:
    positions: dict[Element, int] = {}
    for i, v in enumerate(p):
        positions[v] = 2 * i
    for i, arc in enumerate(path_arcs(p)):
        positions[arc] = 2 * i + 1
    return positions


def _normalize(elements: Iterable[Element]) -> set[Element]:
    return {e if isinstance(e, str) else (str(e[0]), str(e[1])) for e in elements}


def interlaced(p: Sequence[str], c: Iterable[Element], d: Iterable[Element]) -> bool:
    """경로 p 위에서 c 와 d 가 c₁, d₁, c₂, d₂, … 순서로 엄격히 번갈아 나오면 True.

    Raises:
        InputError: 원소가 p 위에 없거나 c 와 d 가 겹칠 때
    """
    c, d = _normalize(c), _normalize(d)
    positions = _positions(p)
    missing = [e for e in sorted(c | d, key=str) if e not in positions]
    if missing:
        raise InputError(f"Elements not on path: {missing}")
    if c & d:
        raise InputError("Interlaced sets must be disjoint")
    if len(c) != len(d):
        return False
    labels = [label for _, label in sorted(
        [(positions[e], 0) for e in c] + [(positions[e], 1) for e in d]
    )]
    return all(label == i % 2 for i, label in enumerate(labels))


# ---------------------------------------------------------------------------
# Soybean
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Soybean:
    """시작과 끝이 같은 두 walk. first 는 C 와, second 는 D 와 만납니다."""

    first: Walk
    second: Walk

    @property
    def vertices(self) -> frozenset[str]:
        return frozenset(self.first) | frozenset(self.second)

    def is_valid(self, g: Digraph) -> bool:
        if not self.first or not self.second:
            return False
        if self.first[0] != self.second[0] or self.first[-1] != self.second[-1]:
            return False
        return all(g.has_arc(u, v) for w in (self.first, self.second) for u, v in path_arcs(w))

    def meets(self, c: Iterable[Element], d: Iterable[Element]) -> bool:
        """한 walk 는 c 와, 다른 walk 는 d 와 만나면 True (순서 무관)."""
        c, d = _normalize(c), _normalize(d)

        def hits(walk: Walk, elements: set[Element]) -> bool:
            return any(_meets(walk, e) for e in elements)

        return (hits(self.first, c) and hits(self.second, d)) or (
            hits(self.first, d) and hits(self.second, c)
        )


def _meets(walk: Walk, element: Element) -> bool:
    if isinstance(element, str):
        return element in walk
    return element in set(path_arcs(walk))


def _endpoints(g: Digraph, element: Element) -> tuple[str, str] | None:
    """원소를 지나는 walk 의 진입/진출 정점. g 에 없는 호는 None."""
    if isinstance(element, str):
        return (element, element) if element in g else None
    u, v = element
    return (u, v) if g.has_arc(u, v) else None


class _SoybeanSearch:
    def __init__(self, g: Digraph) -> None:
        self.g = g
        self.graph = g.to_networkx()
        self._down: dict[str, dict[str, int]] = {}
        self._up: dict[str, dict[str, int]] = {}

    def down(self, v: str) -> dict[str, int]:
        if v not in self._down:
            self._down[v] = nx.single_source_shortest_path_length(self.graph, v)
        return self._down[v]

    def up(self, v: str) -> dict[str, int]:
        if v not in self._up:
            self._up[v] = nx.single_source_shortest_path_length(self.graph.reverse(copy=False), v)
        return self._up[v]

    def path(self, u: str, v: str) -> list[str]:
        return nx.shortest_path(self.graph, u, v)

    def through(self, x: str, element: Element, y: str) -> Walk:
        entry, exit_ = _endpoints(self.g, element)
        head = self.path(x, entry)
        if entry == exit_:
            head = head[:-1]
        return tuple(head) + tuple(self.path(exit_, y))

    def cheapest(self, c: Element, d: Element) -> Soybean | None:
        """c 와 d 를 지나는 가장 짧은 soybean (공통 조상 x, 공통 후손 y)."""
        ends_c, ends_d = _endpoints(self.g, c), _endpoints(self.g, d)
        if ends_c is None or ends_d is None:
            return None
        up_c, up_d = self.up(ends_c[0]), self.up(ends_d[0])
        down_c, down_d = self.down(ends_c[1]), self.down(ends_d[1])
        starts = sorted(set(up_c) & set(up_d), key=lambda x: (up_c[x] + up_d[x], x))
        ends = sorted(set(down_c) & set(down_d), key=lambda y: (down_c[y] + down_d[y], y))
        if not starts or not ends:
            return None
        x, y = starts[0], ends[0]
        return Soybean(self.through(x, c, y), self.through(x, d, y))

    def single_walk(self, c: Element, d: Element) -> Soybean | None:
        """c ⇝ d 로 이어지는 walk 하나를 두 번 쓴 soybean."""
        ends_c, ends_d = _endpoints(self.g, c), _endpoints(self.g, d)
        if ends_c is None or ends_d is None or ends_d[0] not in self.down(ends_c[1]):
            return None
        walk = tuple(self.path(ends_c[0], ends_c[1]) if ends_c[0] != ends_c[1] else [ends_c[0]])
        walk = walk[:-1] + tuple(self.path(ends_c[1], ends_d[0]))
        if ends_d[0] != ends_d[1]:
            walk = walk + (ends_d[1],)
        return Soybean(walk, walk)

    def keys(self, c: list[Element], d: list[Element]) -> list[tuple[Element, Element, str, str]]:
        """(c 원소, d 원소, 공통 조상 x, 공통 후손 y) 전부, 고정 순서."""
        keys = []
        for ce in c:
            for de in d:
                ends_c, ends_d = _endpoints(self.g, ce), _endpoints(self.g, de)
                if ends_c is None or ends_d is None:
                    continue
                starts = sorted(set(self.up(ends_c[0])) & set(self.up(ends_d[0])))
                ends = sorted(set(self.down(ends_c[1])) & set(self.down(ends_d[1])))
                keys += [(ce, de, x, y) for x in starts for y in ends]
        return keys

    def segments(self, used: frozenset[str], u: str, v: str) -> list[list[str]]:
        """g − used 의 u → v 단순 경로 전부, 짧은 것부터."""
        if u in used or v in used:
            return []
        if u == v:
            return [[u]]
        view = self.graph.subgraph(set(self.graph) - used)
        return sorted(nx.all_simple_paths(view, u, v), key=lambda path: (len(path), path))

    def variants(
        self, key: tuple[Element, Element, str, str], used: frozenset[str]
    ) -> Iterator[Soybean]:
        """key 의 soybean 중 used 를 피하는 것들. 정점 집합이 같은 것은 한 번만."""
        ce, de, x, y = key
        (cu, cv), (du, dv) = _endpoints(self.g, ce), _endpoints(self.g, de)
        parts = [
            self.segments(used, x, cu),
            self.segments(used, cv, y),
            self.segments(used, x, du),
            self.segments(used, dv, y),
        ]
        seen: set[frozenset[str]] = set()
        for to_c, from_c, to_d, from_d in product(*parts):
            bean = Soybean(_join(to_c, from_c, cu == cv), _join(to_d, from_d, du == dv))
            if bean.vertices not in seen:
                seen.add(bean.vertices)
                yield bean


def _join(head: list[str], tail: list[str], shared: bool) -> Walk:
    return tuple(head[:-1] if shared else head) + tuple(tail)


def _along_segment(
    g: Digraph, along: Sequence[str], c: Element, d: Element
) -> Soybean | None:
    """힌트 경로에서 c 와 d 사이 부분 경로가 g 의 호만 쓰면 그것을 두 번 쓴 soybean."""
    positions = _positions(along)
    if c not in positions or d not in positions:
        return None
    lo, hi = sorted((positions[c], positions[d]))
    first = lo // 2
    last = (hi + 1) // 2
    segment = tuple(along[first:last + 1])
    if not all(g.has_arc(u, v) for u, v in path_arcs(segment)):
        return None
    return Soybean(segment, segment)


def find_soybeans(
    g: Digraph,
    c: Iterable[Element],
    d: Iterable[Element],
    p: int,
    along: Sequence[str] | None = None,
    limits: CapacityLimits | None = None,
) -> list[Soybean] | None:
    """g 에서 서로 정점이 겹치지 않는 CD-soybean p 개를 찾습니다. 실패하면 None.

    p = 1 은 정확한 판정입니다. p ≥ 2 는 먼저 (c, d) 쌍마다 만든 후보 soybean 들에서
    서로소인 p 개를 고르고, 실패하면 모든 (c, d, x, y) 와 단순 경로 조합을 백트래킹합니다.
    soybean 의 walk 를 단순 경로로 줄여도 정점 집합은 작아지기만 하므로 이 탐색은 완전합니다.
    along 경로가 주어지면 그 부분 경로 후보를 먼저 씁니다.
    """
    if p < 1:
        raise InputError(f"Soybean count must be positive: {p}")
    c, d = sorted(_normalize(c), key=str), sorted(_normalize(d), key=str)
    search = _SoybeanSearch(g)

    if p == 1:
        for ce in c:
            for de in d:
                if along is not None:
                    hinted = _along_segment(g, along, ce, de)
                    if hinted is not None:
                        return [hinted]
                bean = search.cheapest(ce, de)
                if bean is not None:
                    return [bean]
        return None

    candidates: list[Soybean] = []
    for ce in c:
        for de in d:
            options = [
                _along_segment(g, along, ce, de) if along is not None else None,
                search.single_walk(ce, de),
                search.single_walk(de, ce),
                search.cheapest(ce, de),
            ]
            for bean in options:
                if bean is not None and bean not in candidates:
                    candidates.append(bean)

    limits = limits or default_limits()
    nodes = 0
    chosen: list[Soybean] = []

    def tick() -> None:
        nonlocal nodes
        nodes += 1
        limits.check("max_search_nodes", nodes)

    def pick(start: int, used: frozenset[str]) -> bool:
        tick()
        if len(chosen) == p:
            return True
        for i in range(start, len(candidates)):
            bean = candidates[i]
            if bean.vertices & used:
                continue
            chosen.append(bean)
            if pick(i + 1, used | bean.vertices):
                return True
            chosen.pop()
        return False

    if pick(0, frozenset()):
        return list(chosen)

    # 후보가 막히면 모든 (x, y) 와 단순 경로 조합으로 백트래킹
    keys = search.keys(c, d)

    def pick_exhaustive(start: int, used: frozenset[str]) -> bool:
        if len(chosen) == p:
            return True
        for i in range(start, len(keys)):
            for bean in search.variants(keys[i], used):
                tick()
                chosen.append(bean)
                if pick_exhaustive(i + 1, used | bean.vertices):
                    return True
                chosen.pop()
        return False

    if pick_exhaustive(0, frozenset()):
        logger.debug("Soybeans found by exhaustive search over %d keys", len(keys))
        return list(chosen)
    return None


# ---------------------------------------------------------------------------
# 재귀식 q_i(p)
# ---------------------------------------------------------------------------

def recurrence_eval(k: int, p: int, i: int) -> int:
    """q_0(p) = 2p, q_{i+1}(p) = 1 + 2p·q_i(p). k 는 깊이 상한 쪽 인자로 값에는 쓰이지 않습니다.

    Raises:
        InputError: i < 0 또는 p < 1 일 때
    """
    if i < 0:
        raise InputError(f"Recurrence depth must be non-negative: {i}")
    if p < 1:
        raise InputError(f"Soybean count must be positive: {p}")
    value = 2 * p
    for _ in range(i):
        value = 1 + 2 * p * value
    return value


@dataclass(frozen=True)
class RecurrenceTable:
    p: int
    depth: int
    values: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        if self.depth < 0:
            raise InputError(f"Recurrence depth must be non-negative: {self.depth}")
        object.__setattr__(
            self, "values", tuple(recurrence_eval(0, self.p, i) for i in range(self.depth + 1))
        )

    def f(self, x: int) -> int:
        return 1 + 2 * self.p * x

    def __getitem__(self, i: int) -> int:
        return self.values[i]


# ---------------------------------------------------------------------------
# Augmentation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AugmentParams:
    """q_table 이 있으면 q 는 q_table[q_table.depth] 입니다."""

    k: int
    c_cap: int = 64
    q: int = 2
    p: int = 1
    q_table: RecurrenceTable | None = None

    @classmethod
    def from_settings(cls, k: int, settings: AugmentationSettings) -> AugmentParams:
        if settings.q_depth is None:
            return cls(k=k, c_cap=settings.c_cap, q=settings.q, p=settings.p)
        table = RecurrenceTable(settings.p, settings.q_depth)
        logger.debug("q from recurrence: q_%d(%d) = %d", table.depth, table.p, table[-1])
        return cls(k=k, c_cap=settings.c_cap, q=table[-1], p=settings.p, q_table=table)


@dataclass(frozen=True)
class Augmentation:
    """추가 호 집합 A, g + A 의 maxflow, 흐름 위 삭제 가능 정점의 분할 ℬ."""

    added_arcs: tuple[Arc, ...]
    flow: VertexFlow
    partition: tuple[tuple[str, ...], ...]
    params: AugmentParams

    def graph(self, g: Digraph) -> Digraph:
        return g.with_arcs(self.added_arcs, deletable=False)


def flow_elements(g: Digraph, path: Path) -> list[str]:
    """경로 위의 삭제 가능 정점 (경로 순서)."""
    return [v for v in path if g.is_deletable(v)]


def _block_ok(g: Digraph, path: Path, block: Iterable[str], q: int, p: int) -> bool:
    members = set(block)
    on_path = [v for v in path if v in members]
    if len(on_path) < 2 * q:
        return True
    for combo in combinations(on_path, 2 * q):
        if find_soybeans(g, combo[0::2], combo[1::2], p, along=path) is None:
            return False
    return True


def verify_soybean_partition(g: Digraph, aug: Augmentation, q: int, p: int) -> bool:
    """각 흐름 경로 P, 블록 B 에서 B ∩ P 의 크기 q interlaced 쌍마다 soybean p 개가 있으면 True."""
    for path in aug.flow.paths:
        for block in aug.partition:
            if not _block_ok(g, path, block, q, p):
                return False
    return True


def _build_partition(g: Digraph, flow: VertexFlow, q: int, p: int) -> tuple[tuple[str, ...], ...]:
    """단일 원소 블록에서 시작해 경로상 인접 블록을 검증이 허락하는 동안 합칩니다."""
    blocks: list[tuple[str, ...]] = []
    for path in flow.paths:
        elements = flow_elements(g, path)
        if not elements:
            continue
        current = [elements[0]]
        for v in elements[1:]:
            if _block_ok(g, path, current + [v], q, p):
                current.append(v)
            else:
                blocks.append(tuple(current))
                current = [v]
        blocks.append(tuple(current))
    return tuple(blocks)


def _candidate_arcs(g: Digraph, s: str, t: str) -> list[Arc]:
    inner, outer = [], []
    for u in g.vertices:
        for v in g.vertices:
            if u == v or v == s or u == t or g.has_arc(u, v):
                continue
            (outer if {u, v} & {s, t} else inner).append((u, v))
    return inner + outer


def _augment_one(
    g: Digraph, s: str, t: str, z: frozenset[str]
) -> tuple[list[Arc], VertexFlow]:
    region = reach(g, [s], z)
    added: list[Arc] = []
    current = g
    network = FlowNetwork(current, s, t)
    flow = network.solve()
    while not flow.is_infinite and flow.value < len(z):
        sides = network.residual_sides()
        step = None
        for u, v in _candidate_arcs(current, s, t):
            if u in region and v not in region and v not in z:
                continue
            if network.arc_would_augment(sides, u, v):
                step = [(u, v)]
                break
        if step is None:
            # 단락 s → v → t 를 Z 정점마다 하나씩 추가; 매 반복마다 새 호가 생깁니다
            used = flow.vertices()
            pending = [
                v for v in sorted(z, key=lambda v: (v in used, v))
                if not (current.has_arc(s, v) and current.has_arc(v, t))
            ]
            step = [arc for arc in ((s, pending[0]), (pending[0], t)) if not current.has_arc(*arc)]
        added += step
        current = current.with_arcs(step, deletable=False)
        network = FlowNetwork(current, s, t)
        flow = network.solve()
    return added, flow


def augment_exhaustive(
    g: Digraph,
    s: str,
    t: str,
    k: int,
    settings: AugmentationSettings | None = None,
    limits: CapacityLimits | None = None,
) -> list[tuple[frozenset[str], Augmentation]]:
    """크기 ≤ k 인 모든 최소 st-분리자 Z 마다 Z 와 호환되는 Augmentation 을 하나씩 만듭니다.

    Returns:
        (Z, Augmentation) 목록, Z 의 (크기, 사전순) 순서
    """
    settings = settings or get_settings().augmentation
    limits = limits or default_limits()
    params = AugmentParams.from_settings(k, settings)
    results = []
    for z in enumerate_minimal_separators(g, s, t, k, limits):
        added, flow = _augment_one(g, s, t, z)
        # soybean 은 원래 그래프 g 의 walk 만 사용
        partition = _build_partition(g, flow, params.q, params.p)
        results.append((z, Augmentation(tuple(added), flow, partition, params)))
    logger.info("Augmented %d separators for %s -> %s (k=%d)", len(results), s, t, k)
    return results


@dataclass(frozen=True)
class AugmentationCheck:
    compatible: bool
    maxflow: bool
    one_per_path: bool
    soybean_partition: bool

    @property
    def ok(self) -> bool:
        return self.compatible and self.maxflow and self.one_per_path and self.soybean_partition


def verify_augmentation(
    g: Digraph,
    s: str,
    t: str,
    z: Iterable[str],
    aug: Augmentation,
    q: int | None = None,
    p: int | None = None,
) -> AugmentationCheck:
    """증강 계약 네 가지를 한 번에 검사합니다."""
    z = frozenset(z)
    q = aug.params.q if q is None else q
    p = aug.params.p if p is None else p
    augmented = aug.graph(g)

    compatible = is_compatible_vertex(g, aug.added_arcs, z, s, t)
    best = max_vertex_flow(augmented, s, t)
    maxflow = (
        not aug.flow.is_infinite
        and aug.flow.value == len(z) == best.value
        and len(aug.flow.paths) == aug.flow.value
        and is_valid_vertex_flow(augmented, aug.flow)
    )
    one_per_path = all(len(z & set(path)) == 1 for path in aug.flow.paths)

    expected = {v for path in aug.flow.paths for v in flow_elements(g, path)}
    covered = [v for block in aug.partition for v in block]
    partition_ok = (
        len(covered) == len(set(covered))
        and set(covered) == expected
        and len(aug.partition) <= aug.params.c_cap
        and verify_soybean_partition(g, aug, q, p)
    )
    return AugmentationCheck(compatible, maxflow, one_per_path, partition_ok)
