"""유향 그래프: 도달 가능성, 정점 용량 흐름, 분리자 열거

정점과 호(arc)마다 삭제 가능 여부를 갖는 불변 유향 그래프와
그 위의 기본 연산(도달 집합, 정점 분할 최대 흐름, 최소/중요 분리자, bypass)을 제공합니다.
정점 ID 는 문자열이며 모든 순회는 정렬 순서를 따릅니다.
"""
from __future__ import annotations

import enum
import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence, Union

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from dmcut.config import CapacityLimits, default_limits
from dmcut.errors import InputError

logger = logging.getLogger(__name__)

VertexId = str
Arc = tuple[str, str]
Path = tuple[str, ...]


class Infinity(enum.Enum):
    """흐름 값이 유한하지 않음을 나타내는 구분 값."""

    INFINITE = "infinite"

    def __repr__(self) -> str:
        return "INFINITE"


INFINITE = Infinity.INFINITE

FlowValue = Union[int, Infinity]


# ---------------------------------------------------------------------------
# Digraph
# ---------------------------------------------------------------------------

class Digraph:
    """정점/호 삭제 가능 플래그를 갖는 불변 유향 그래프.

    Args:
        vertices: 정점 ID 목록 (모두 삭제 가능) 또는 {정점: 삭제 가능 여부}
        arcs: (u, v) 목록 (모두 삭제 가능) 또는 {(u, v): 삭제 가능 여부}

    Raises:
        InputError: 호가 알 수 없는 정점을 참조하거나 self-loop 일 때
    """

    def __init__(
        self,
        vertices: Iterable[str] | Mapping[str, bool],
        arcs: Iterable[Arc] | Mapping[Arc, bool] = (),
    ) -> None:
        if isinstance(vertices, Mapping):
            flags = {str(v): bool(d) for v, d in vertices.items()}
        else:
            flags = {}
            for v in vertices:
                flags[str(v)] = True
        if isinstance(arcs, Mapping):
            arc_items = [((str(u), str(v)), bool(d)) for (u, v), d in arcs.items()]
        else:
            arc_items = [((str(u), str(v)), True) for u, v in arcs]

        self._deletable: dict[str, bool] = dict(sorted(flags.items()))
        self._arcs: dict[Arc, bool] = {}
        for (u, v), d in sorted(arc_items):
            if u not in flags or v not in flags:
                raise InputError(f"Arc ({u}, {v}) references an unknown vertex")
            if u == v:
                raise InputError(f"Self-loop on {u} is not allowed")
            # 중복 호는 no-op
            self._arcs.setdefault((u, v), d)

        self._succ: dict[str, tuple[str, ...]] = {v: () for v in self._deletable}
        self._pred: dict[str, tuple[str, ...]] = {v: () for v in self._deletable}
        succ: dict[str, list[str]] = {v: [] for v in self._deletable}
        pred: dict[str, list[str]] = {v: [] for v in self._deletable}
        for u, v in self._arcs:
            succ[u].append(v)
            pred[v].append(u)
        for v in self._deletable:
            self._succ[v] = tuple(sorted(succ[v]))
            self._pred[v] = tuple(sorted(pred[v]))

        self._nx: nx.DiGraph | None = None

    @classmethod
    def from_arcs(
        cls,
        arcs: Iterable[Arc],
        undeletable: Iterable[str] = (),
        isolated: Iterable[str] = (),
    ) -> Digraph:
        """호 목록에서 정점을 추론해 그래프를 만듭니다."""
        arcs = [(str(u), str(v)) for u, v in arcs]
        names = {x for arc in arcs for x in arc} | {str(v) for v in isolated}
        frozen = {str(v) for v in undeletable}
        unknown = frozen - names
        if unknown:
            raise InputError(f"Unknown undeletable vertices: {sorted(unknown)}")
        return cls({v: v not in frozen for v in names}, arcs)

    # -- 조회 ---------------------------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(self._deletable)

    @property
    def arcs(self) -> tuple[Arc, ...]:
        return tuple(self._arcs)

    @property
    def deletable_vertices(self) -> frozenset[str]:
        return frozenset(v for v, d in self._deletable.items() if d)

    def __contains__(self, v: object) -> bool:
        return v in self._deletable

    def __len__(self) -> int:
        return len(self._deletable)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self._deletable == other._deletable and self._arcs == other._arcs

    def __hash__(self) -> int:
        return hash((tuple(self._deletable.items()), tuple(self._arcs.items())))

    def __repr__(self) -> str:
        return f"Digraph(|V|={len(self._deletable)}, |A|={len(self._arcs)})"

    def is_deletable(self, v: str) -> bool:
        try:
            return self._deletable[v]
        except KeyError:
            raise InputError(f"Unknown vertex ids: [{v!r}]") from None

    def arc_deletable(self, u: str, v: str) -> bool:
        if (u, v) not in self._arcs:
            raise InputError(f"Unknown arc ({u}, {v})")
        return self._arcs[(u, v)]

    def has_arc(self, u: str, v: str) -> bool:
        return (u, v) in self._arcs

    def successors(self, v: str) -> tuple[str, ...]:
        return self._succ[v]

    def predecessors(self, v: str) -> tuple[str, ...]:
        return self._pred[v]

    def check_vertices(self, vertices: Iterable[str]) -> None:
        """알 수 없는 정점이 있으면 InputError 를 발생시킵니다."""
        unknown = sorted(v for v in vertices if v not in self._deletable)
        if unknown:
            raise InputError(f"Unknown vertex ids: {unknown}")

    def to_networkx(self) -> nx.DiGraph:
        """networkx 사본을 (필요할 때 한 번) 만들어 반환합니다. 수정하지 마십시오."""
        if self._nx is None:
            graph = nx.DiGraph()
            for v, d in self._deletable.items():
                graph.add_node(v, deletable=d)
            for (u, v), d in self._arcs.items():
                graph.add_edge(u, v, deletable=d)
            self._nx = graph
        return self._nx

    # -- 파생 그래프 -----------------------------------------------------------

    def with_arcs(self, arcs: Iterable[Arc], deletable: bool = True) -> Digraph:
        """호를 추가한 새 그래프 (이미 있는 호는 그대로)."""
        merged = dict(self._arcs)
        for u, v in arcs:
            merged.setdefault((u, v), deletable)
        return Digraph(self._deletable, merged)

    def with_deletable(self, deletable: Iterable[str]) -> Digraph:
        """정점 삭제 가능 플래그를 주어진 집합으로 교체한 새 그래프."""
        allowed = set(deletable)
        self.check_vertices(allowed)
        return Digraph({v: v in allowed for v in self._deletable}, self._arcs)

    def without(self, removed: Iterable[str]) -> Digraph:
        """removed 정점을 지운 유도 부분 그래프."""
        gone = set(removed)
        self.check_vertices(gone)
        return Digraph(
            {v: d for v, d in self._deletable.items() if v not in gone},
            {(u, v): d for (u, v), d in self._arcs.items() if u not in gone and v not in gone},
        )

    def reversed(self) -> Digraph:
        return Digraph(self._deletable, {(v, u): d for (u, v), d in self._arcs.items()})


# ---------------------------------------------------------------------------
# 도달 가능성
# ---------------------------------------------------------------------------

def _restricted(g: Digraph, removed: Iterable[str]) -> nx.DiGraph:
    return nx.restricted_view(g.to_networkx(), list(removed), [])


def reach(g: Digraph, sources: Iterable[str], removed: Iterable[str] = ()) -> frozenset[str]:
    """g − removed 에서 sources 로부터 도달 가능한 정점 집합 (sources 포함).

    Raises:
        InputError: 알 수 없는 정점이거나 sources 와 removed 가 겹칠 때
    """
    sources = set(sources)
    removed = set(removed)
    g.check_vertices(sources | removed)
    if sources & removed:
        raise InputError(f"Sources overlap removed vertices: {sorted(sources & removed)}")
    view = _restricted(g, removed)
    seen = set(sources)
    for s in sorted(sources):
        seen |= nx.descendants(view, s)
    return frozenset(seen)


def reach_reverse(
    g: Digraph, targets: Iterable[str], removed: Iterable[str] = ()
) -> frozenset[str]:
    """g − removed 에서 targets 중 하나에 도달할 수 있는 정점 집합 (targets 포함)."""
    targets = set(targets)
    removed = set(removed)
    g.check_vertices(targets | removed)
    if targets & removed:
        raise InputError(f"Targets overlap removed vertices: {sorted(targets & removed)}")
    view = _restricted(g, removed)
    seen = set(targets)
    for t in sorted(targets):
        seen |= nx.ancestors(view, t)
    return frozenset(seen)


def is_separator(
    g: Digraph, a: Iterable[str], b: Iterable[str], s: Iterable[str]
) -> bool:
    """g − s 에 a 에서 b 로 가는 경로가 없으면 True."""
    s = set(s)
    a = set(a) - s
    b = set(b)
    if not a:
        return True
    return not (reach(g, a, s) & b)


def cheapest_path(
    g: Digraph,
    sources: Iterable[str],
    targets: Iterable[str],
    removed: Iterable[str] = (),
    cost: Callable[[str], bool] = lambda v: False,
) -> list[str] | None:
    """cost 가 참인 정점 수를 최소화하는 sources→targets 경로 (0-1 BFS).

    동률이면 정렬 순서상 먼저 발견한 경로를 반환합니다. 경로가 없으면 None.
    """
    removed = set(removed)
    targets = set(targets)
    dist: dict[str, int] = {}
    parent: dict[str, str | None] = {}
    queue: deque[str] = deque()
    for s in sorted(set(sources) - removed):
        dist[s] = 1 if cost(s) else 0
        parent[s] = None
        queue.append(s)

    while queue:
        v = queue.popleft()
        for w in g.successors(v):
            if w in removed:
                continue
            step = 1 if cost(w) else 0
            nd = dist[v] + step
            if nd < dist.get(w, nd + 1):
                dist[w] = nd
                parent[w] = v
                if step:
                    queue.append(w)
                else:
                    queue.appendleft(w)

    reached = [t for t in sorted(targets) if t in dist]
    if not reached:
        return None
    end = min(reached, key=lambda t: dist[t])
    path = [end]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path[::-1]


# ---------------------------------------------------------------------------
# 정점 흐름
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexFlow:
    """s→t 경로 모음과 흐름 값 (또는 INFINITE)."""

    source: str
    sink: str
    paths: tuple[Path, ...]
    value: FlowValue

    @property
    def is_infinite(self) -> bool:
        return self.value is INFINITE

    def vertices(self) -> frozenset[str]:
        return frozenset(v for p in self.paths for v in p)


class FlowNetwork:
    """정점 분할 흐름 네트워크.

    삭제 가능한 정점 v 는 용량 1 인 (v,0)→(v,1) 호가 되고, 나머지 호는 용량이 없습니다
    (networkx 규약상 무한). s 는 (s,1), t 는 (t,0) 하나로만 표현합니다.
    arc_regime=True 이면 정점 대신 삭제 가능한 호에 용량 1 을 둡니다.
    """

    def __init__(self, g: Digraph, s: str, t: str, arc_regime: bool = False) -> None:
        g.check_vertices([s, t])
        if s == t:
            raise InputError("Flow source and sink must differ")
        self.g = g
        self.s = s
        self.t = t
        self.arc_regime = arc_regime
        self.network = nx.DiGraph()
        self.source = self._out(s)
        self.sink = self._in(t)
        self.network.add_node(self.source)
        self.network.add_node(self.sink)
        for v in g.vertices:
            if v in (s, t):
                continue
            if not arc_regime and g.is_deletable(v):
                self.network.add_edge(self._in(v), self._out(v), capacity=1)
            else:
                self.network.add_edge(self._in(v), self._out(v))
        for u, v in g.arcs:
            self.add_arc(u, v, deletable=g.arc_deletable(u, v))
        self.value: int = 0
        self.flow: dict = {}

    def _in(self, v: str) -> tuple[str, int]:
        return (v, 1) if v == self.s else (v, 0)

    def _out(self, v: str) -> tuple[str, int]:
        return (v, 0) if v == self.t else (v, 1)

    def add_arc(self, u: str, v: str, deletable: bool = False) -> None:
        if v == self.s or u == self.t:
            return
        if self.arc_regime and deletable:
            self.network.add_edge(self._out(u), self._in(v), capacity=1)
        else:
            self.network.add_edge(self._out(u), self._in(v))

    def undeletable_path(self) -> list[str] | None:
        """용량 제한이 전혀 없는 s→t 경로 (있으면 흐름이 무한)."""
        if self.arc_regime:
            arcs = [a for a in self.g.arcs if not self.g.arc_deletable(*a)]
            sub = Digraph.from_arcs(arcs, isolated=[self.s, self.t])
            return cheapest_path(sub, [self.s], [self.t])
        frozen = [v for v in self.g.vertices if not self.g.is_deletable(v)]
        frozen_set = set(frozen) | {self.s, self.t}
        removed = [v for v in self.g.vertices if v not in frozen_set]
        return cheapest_path(self.g, [self.s], [self.t], removed=removed)

    def solve(self) -> VertexFlow:
        """최대 흐름을 계산하고 경로로 분해합니다."""
        witness = self.undeletable_path()
        if witness is not None:
            return VertexFlow(self.s, self.t, (tuple(witness),), INFINITE)
        try:
            value, flow = nx.maximum_flow(
                self.network, self.source, self.sink, flow_func=edmonds_karp
            )
        except nx.NetworkXUnbounded:
            logger.debug("Unbounded flow %s -> %s without an undeletable witness", self.s, self.t)
            return VertexFlow(self.s, self.t, (), INFINITE)
        self.value = int(value)
        self.flow = flow
        return VertexFlow(self.s, self.t, tuple(self._decompose()), self.value)

    def _decompose(self) -> list[Path]:
        remaining = {
            node: {w: f for w, f in sorted(out.items()) if f > 0}
            for node, out in self.flow.items()
        }
        paths: list[Path] = []
        for _ in range(self.value):
            walk = [self.source]
            seen = {self.source: 0}
            node = self.source
            while node != self.sink:
                nxt = min(remaining[node])
                if nxt in seen:
                    # 순환 흐름 제거
                    idx = seen[nxt]
                    cycle = walk[idx:] + [nxt]
                    for a, b in zip(cycle, cycle[1:]):
                        _consume(remaining, a, b)
                    walk = walk[: idx + 1]
                    seen = {n: i for i, n in enumerate(walk)}
                    node = nxt
                    continue
                walk.append(nxt)
                seen[nxt] = len(walk) - 1
                node = nxt
            for a, b in zip(walk, walk[1:]):
                _consume(remaining, a, b)
            vertices = [walk[0][0]]
            for name, side in walk[1:]:
                if name != vertices[-1]:
                    vertices.append(name)
            paths.append(tuple(vertices))
        return sorted(paths)

    def residual_sides(self) -> tuple[frozenset, frozenset]:
        """잔여 그래프에서 source 로부터 도달 가능한 노드와 sink 에 도달 가능한 노드."""
        forward: dict = {n: [] for n in self.network.nodes}
        backward: dict = {n: [] for n in self.network.nodes}
        for a, b, data in self.network.edges(data=True):
            f = self.flow.get(a, {}).get(b, 0)
            cap = data.get("capacity")
            if cap is None or f < cap:
                forward[a].append(b)
                backward[b].append(a)
            if f > 0:
                forward[b].append(a)
                backward[a].append(b)
        return _bfs(forward, self.source), _bfs(backward, self.sink)

    def arc_would_augment(self, sides: tuple[frozenset, frozenset], u: str, v: str) -> bool:
        """호 (u,v) 를 추가하면 현재 최대 흐름이 증가하는지 여부."""
        if v == self.s or u == self.t:
            return False
        from_source, to_sink = sides
        return self._out(u) in from_source and self._in(v) in to_sink


def _consume(remaining: dict, a: object, b: object) -> None:
    remaining[a][b] -= 1
    if remaining[a][b] == 0:
        del remaining[a][b]


def _bfs(adjacency: dict, start: object) -> frozenset:
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in adjacency[node]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen)


def max_vertex_flow(g: Digraph, s: str, t: str) -> VertexFlow:
    """정점 분리 최대 흐름. 삭제 불가 정점만으로 된 s→t 경로가 있으면 INFINITE.

    Raises:
        InputError: s 또는 t 가 삭제 가능하거나 s == t 일 때
    """
    g.check_vertices([s, t])
    if g.is_deletable(s) or g.is_deletable(t):
        raise InputError(f"Flow terminals must be undeletable: {s}, {t}")
    return FlowNetwork(g, s, t).solve()


def max_arc_flow(g: Digraph, s: str, t: str) -> VertexFlow:
    """호 분리 최대 흐름 (edge regime). 삭제 불가 호만으로 된 경로가 있으면 INFINITE."""
    return FlowNetwork(g, s, t, arc_regime=True).solve()


def is_valid_vertex_flow(g: Digraph, flow: VertexFlow) -> bool:
    """경로가 g 에서 유효하고 삭제 가능 정점을 공유하지 않는지 검사합니다."""
    used: set[str] = set()
    for path in flow.paths:
        if not path or path[0] != flow.source or path[-1] != flow.sink:
            return False
        if len(set(path)) != len(path):
            return False
        if any(not g.has_arc(u, v) for u, v in zip(path, path[1:])):
            return False
        inner = {v for v in path if g.is_deletable(v)}
        if inner & used:
            return False
        used |= inner
    return True


# ---------------------------------------------------------------------------
# 분리자 열거
# ---------------------------------------------------------------------------

def _separator_key(s: frozenset[str]) -> tuple[int, tuple[str, ...]]:
    return (len(s), tuple(sorted(s)))


def _branch_separators(
    g: Digraph,
    a: frozenset[str],
    b: frozenset[str],
    k: int,
    limits: CapacityLimits,
) -> set[frozenset[str]]:
    """a→b 경로 위 정점으로 분기해 크기 ≤ k 인 분리자 후보를 모읍니다.

    모든 최소 분리자는 이 후보 안에 있습니다 (앞선 분기 정점은 이후 분기에서 금지).
    """
    found: set[frozenset[str]] = set()
    nodes = 0
    terminals = a | b

    def branch(chosen: frozenset[str], forbidden: frozenset[str]) -> None:
        nonlocal nodes
        nodes += 1
        limits.check("max_search_nodes", nodes)

        def selectable(v: str) -> bool:
            return g.is_deletable(v) and v not in forbidden and v not in terminals

        path = cheapest_path(g, a, b, removed=chosen, cost=selectable)
        if path is None:
            found.add(chosen)
            return
        if len(chosen) >= k:
            return
        banned = set(forbidden)
        for v in [v for v in path if selectable(v)]:
            branch(chosen | {v}, frozenset(banned))
            banned.add(v)

    branch(frozenset(), frozenset())
    return found


def _is_minimal(g: Digraph, a: frozenset[str], b: frozenset[str], s: frozenset[str]) -> bool:
    return all(not is_separator(g, a, b, s - {v}) for v in s)


def _minimal_separators(
    g: Digraph,
    a: Iterable[str],
    b: Iterable[str],
    k: int,
    limits: CapacityLimits | None = None,
) -> list[frozenset[str]]:
    a = frozenset(a)
    b = frozenset(b)
    g.check_vertices(a | b)
    if k < 0:
        raise InputError(f"k must be non-negative: {k}")
    if a & b:
        raise InputError(f"Separator sides overlap: {sorted(a & b)}")
    candidates = _branch_separators(g, a, b, k, limits or default_limits())
    return sorted((s for s in candidates if _is_minimal(g, a, b, s)), key=_separator_key)


def enumerate_minimal_separators(
    g: Digraph, s: str, t: str, k: int, limits: CapacityLimits | None = None
) -> list[frozenset[str]]:
    """크기 ≤ k 인 모든 포함 최소 st-분리자 (삭제 가능 정점만), (크기, 사전순) 정렬.

    Raises:
        InputError: s, t 가 삭제 가능하거나 k < 0 일 때
    """
    g.check_vertices([s, t])
    if g.is_deletable(s) or g.is_deletable(t):
        raise InputError(f"Separator terminals must be undeletable: {s}, {t}")
    if s == t:
        raise InputError("Separator terminals must differ")
    return _minimal_separators(g, [s], [t], k, limits)


def enumerate_important_separators(
    g: Digraph,
    a: Iterable[str],
    b: Iterable[str],
    k: int,
    limits: CapacityLimits | None = None,
) -> list[frozenset[str]]:
    """크기 ≤ k 인 모든 (a,b)-중요 분리자.

    최소 분리자 S 중, |S'| ≤ |S| 이면서 a 쪽 도달 집합이 진부분집합으로 더 큰 분리자 S' 가
    없는 것만 남깁니다. 비교 대상은 최소 분리자로 충분합니다
    (분리자에서 정점을 빼면 도달 집합은 커지기만 합니다).
    """
    a = frozenset(a)
    minimal = _minimal_separators(g, a, b, k, limits)
    reach_of = {s: reach(g, a - s, s) for s in minimal}
    important = [
        s
        for s in minimal
        if not any(
            len(other) <= len(s) and reach_of[s] < reach_of[other] for other in minimal
        )
    ]
    bound = 4 ** k
    if len(important) > bound:
        logger.warning("Important separator count %d exceeds 4^k=%d", len(important), bound)
    return important


# ---------------------------------------------------------------------------
# Bypass (torso)
# ---------------------------------------------------------------------------

def bypass(g: Digraph, x: Iterable[str]) -> Digraph:
    """x 의 각 정점 v 를 지우면서 (u,v),(v,w) 마다 (u,w) 를 추가합니다.

    self-loop 는 버립니다. 결과의 호 집합은 처리 순서와 무관합니다.
    """
    x = sorted(set(x))
    g.check_vertices(x)
    arcs: dict[Arc, bool] = dict(zip(g.arcs, (g.arc_deletable(u, v) for u, v in g.arcs)))
    succ: dict[str, set[str]] = {v: set(g.successors(v)) for v in g.vertices}
    pred: dict[str, set[str]] = {v: set(g.predecessors(v)) for v in g.vertices}

    for v in x:
        for u in sorted(pred[v]):
            for w in sorted(succ[v]):
                if u == w or (u, w) in arcs:
                    continue
                arcs[(u, w)] = arcs[(u, v)] and arcs[(v, w)]
                succ[u].add(w)
                pred[w].add(u)
        for u in pred[v]:
            succ[u].discard(v)
            del arcs[(u, v)]
        for w in succ[v]:
            pred[w].discard(v)
            del arcs[(v, w)]
        del succ[v], pred[v]

    gone = set(x)
    vertices = {v: g.is_deletable(v) for v in g.vertices if v not in gone}
    return Digraph(vertices, arcs)


def path_arcs(path: Sequence[str]) -> list[Arc]:
    return list(zip(path, path[1:]))
