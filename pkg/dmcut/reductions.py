"""축약(reduction) 생성기와 해 매퍼

  - PSI → 2쌍 Weighted Directed Multicut (psi_to_wdmc, map/extract 매퍼)
  - Multicolored Clique → Permutation CSP (clique_to_permcsp)

두 축약 모두 결정적이며, brute-force 오라클로 왕복 검증합니다.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from dmcut.config import CapacityLimits, default_limits
from dmcut.digraph import Arc, Digraph
from dmcut.errors import ExtractionError, InputError
from dmcut.multicut import VertexSet, WdmcInstance
from dmcut.permcsp import (
    Binding,
    DownclosedRelation,
    OrderedDomain,
    PermCspInstance,
    PermutationConstraint,
    Valuation,
)

logger = logging.getLogger(__name__)

PAD_MARK = "#pad"
MIRROR_SUFFIX = "~"

_LABEL_RE = re.compile(r"^[^:,\s]+$")


def _label_key(label: str) -> tuple:
    return (0, int(label), "") if label.isdecimal() else (1, 0, label)


def _check_label(label: str) -> str:
    label = str(label)
    if not _LABEL_RE.match(label):
        raise InputError(f"Label must be non-empty without ':', ',' or whitespace: {label!r}")
    return label


def _undirected(edges: Iterable[Sequence[str]]) -> frozenset[frozenset[str]]:
    result = set()
    for edge in edges:
        u, v = (str(x) for x in edge)
        if u == v:
            raise InputError(f"Self-loop in undirected graph: {u}")
        result.add(frozenset((u, v)))
    return frozenset(result)


def _pad(parts: Mapping[str, Sequence[str]]) -> dict[str, tuple[str, ...]]:
    """모든 부분을 가장 큰 부분의 크기로 맞춥니다 (고립 정점 추가)."""
    size = max((len(vs) for vs in parts.values()), default=0)
    padded = {}
    for label, vertices in parts.items():
        extra = [f"{label}{PAD_MARK}{m}" for m in range(size - len(vertices))]
        padded[label] = tuple(vertices) + tuple(extra)
    return padded


def _check_parts(
    parts: Mapping[str, Sequence[str]], edges: frozenset[frozenset[str]]
) -> None:
    seen: set[str] = set()
    for vertices in parts.values():
        for v in vertices:
            if v in seen:
                raise InputError(f"Host vertex {v} appears in more than one part")
            seen.add(v)
    for edge in edges:
        unknown = sorted(edge - seen)
        if unknown:
            raise InputError(f"Host edge endpoint not in any part: {unknown}")


# ---------------------------------------------------------------------------
# PSI
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PsiInstance:
    """Partitioned Subgraph Isomorphism 인스턴스.

    pattern_edges 는 패턴 순서상 (i, j), i < j 로 정규화되고, 모든 부분의 크기는 n 으로 맞춰집니다.
    """

    pattern: tuple[str, ...]
    pattern_edges: tuple[tuple[str, str], ...]
    parts: Mapping[str, tuple[str, ...]]
    host_edges: frozenset[frozenset[str]]

    @classmethod
    def from_parts(
        cls,
        pattern_edges: Iterable[Sequence[str]],
        parts: Mapping[str, Sequence[str]],
        host_edges: Iterable[Sequence[str]],
    ) -> PsiInstance:
        """입력을 검증하고 부분 크기를 맞춘 인스턴스를 만듭니다.

        Raises:
            InputError: 패턴에 고립 정점이 있거나, 레이블 형식이 잘못되었거나,
                호스트 정점이 여러 부분에 속하거나, 간선 끝점이 알 수 없는 정점일 때
        """
        parts = {
            _check_label(label): tuple(str(v) for v in vertices)
            for label, vertices in parts.items()
        }
        pattern = tuple(sorted(parts, key=_label_key))
        order = {label: idx for idx, label in enumerate(pattern)}
        edges = set()
        for edge in _undirected(pattern_edges):
            unknown = sorted(edge - set(order))
            if unknown:
                raise InputError(f"Pattern edge endpoint without a part: {unknown}")
            i, j = sorted(edge, key=order.__getitem__)
            edges.add((i, j))
        covered = {v for edge in edges for v in edge}
        isolated = [label for label in pattern if label not in covered]
        if isolated:
            raise InputError(f"Pattern graph has isolated vertices: {isolated}")
        if any(not vertices for vertices in parts.values()):
            raise InputError("Every part must contain at least one host vertex")
        host = _undirected(host_edges)
        _check_parts(parts, host)
        return cls(
            pattern=pattern,
            pattern_edges=tuple(sorted(edges, key=lambda e: (order[e[0]], order[e[1]]))),
            parts=_pad(parts),
            host_edges=host,
        )

    @property
    def h(self) -> int:
        return len(self.pattern)

    @property
    def k(self) -> int:
        return len(self.pattern_edges)

    @property
    def n(self) -> int:
        return len(self.parts[self.pattern[0]])

    def ordered_pairs(self) -> list[tuple[str, str]]:
        """{i, j} ∈ E(H) 인 모든 순서쌍 (i, j), (j, i)."""
        return [p for i, j in self.pattern_edges for p in ((i, j), (j, i))]

    def adjacent(self, u: str, v: str) -> bool:
        return frozenset((u, v)) in self.host_edges


def is_partitioned_homomorphism(psi: PsiInstance, phi: Mapping[str, str]) -> bool:
    """φ(i) ∈ V^i 이고 모든 {i, j} ∈ E(H) 에 대해 φ(i)φ(j) ∈ E(G) 이면 True."""
    if set(phi) != set(psi.pattern):
        return False
    if any(phi[i] not in psi.parts[i] for i in psi.pattern):
        return False
    return all(psi.adjacent(phi[i], phi[j]) for i, j in psi.pattern_edges)


def brute_force_psi(
    psi: PsiInstance, limits: CapacityLimits | None = None
) -> dict[str, str] | None:
    """부분별 정점 순서의 곱 순서로 첫 번째 유효 준동형을 반환합니다.

    Raises:
        CapacityError: n^h 가 max_assignments 를 넘을 때
    """
    (limits or default_limits()).check("max_assignments", psi.n ** psi.h)
    for choice in product(*(psi.parts[i] for i in psi.pattern)):
        phi = dict(zip(psi.pattern, choice))
        if is_partitioned_homomorphism(psi, phi):
            return phi
    return None


# ---------------------------------------------------------------------------
# PSI → 2-Wt-DMC
# ---------------------------------------------------------------------------

def _z(i: str, a: int) -> str:
    return f"z:{i}:{a}"


def _z_hat(i: str, a: int) -> str:
    return f"zh:{i}:{a}"


def _x(i: str, j: str, a: int) -> str:
    return f"x:{i},{j}:{a}"


def _x_hat(i: str, j: str, a: int) -> str:
    return f"xh:{i},{j}:{a}"


def _y(i: str, j: str, a: int) -> str:
    return f"y:{i},{j}:{a}"


def _y_hat(i: str, j: str, a: int) -> str:
    return f"yh:{i},{j}:{a}"


def _p(i: str, j: str, a: int, b: int) -> str:
    return f"p:{i},{j}:{a},{b}"


def _alternating_path(plain, hat, n: int) -> list[Arc]:
    """(v_n, v̂_n, v_{n-1}, …, v̂_1, v_0) 경로의 호."""
    arcs = []
    for a in range(n, 0, -1):
        arcs += [(plain(a), hat(a)), (hat(a), plain(a - 1))]
    return arcs


@dataclass(frozen=True)
class PsiReduction:
    """축약 결과와 각 정점의 역할 (role, i, j, 인덱스)."""

    psi: PsiInstance
    instance: WdmcInstance
    M: int
    roles: Mapping[str, tuple]

    @property
    def W(self) -> int:
        return self.instance.W

    @property
    def k_prime(self) -> int:
        return self.instance.k

    def vertices_with_role(self, role: str) -> list[str]:
        return sorted(v for v, r in self.roles.items() if r[0] == role)


def psi_to_wdmc(psi: PsiInstance) -> PsiReduction:
    """PSI 인스턴스를 2쌍 Weighted Directed Multicut 로 축약합니다.

    k' = 5k + h, M = k + 1, W = M(2k(n+1) + h) + k 이며, 경로의 짝수 위치 정점과
    단말은 가중치 W+1 (삭제 불가) 입니다.
    """
    n, h, k = psi.n, psi.h, psi.k
    M = k + 1
    W = M * (2 * k * (n + 1) + h) + k
    arcs: list[Arc] = []
    wt: dict[str, int] = {}
    roles: dict[str, tuple] = {}
    frozen: set[str] = set()

    for i in psi.pattern:
        arcs += _alternating_path(lambda a, i=i: _z(i, a), lambda a, i=i: _z_hat(i, a), n)
        for a in range(n + 1):
            frozen.add(_z(i, a))
        for a in range(1, n + 1):
            wt[_z_hat(i, a)] = M
            roles[_z_hat(i, a)] = ("z", i, None, a)

    for i, j in psi.ordered_pairs():
        arcs += _alternating_path(
            lambda a, i=i, j=j: _x(i, j, a), lambda a, i=i, j=j: _x_hat(i, j, a), n
        )
        arcs += _alternating_path(
            lambda a, i=i, j=j: _y(i, j, a), lambda a, i=i, j=j: _y_hat(i, j, a), n
        )
        for a in range(n + 1):
            frozen.update((_x(i, j, a), _y(i, j, a)))
            arcs += [(_x(i, j, a), _z(i, a)), (_z(i, a), _y(i, j, a))]
        for a in range(1, n + 1):
            wt[_x_hat(i, j, a)] = M * a
            wt[_y_hat(i, j, a)] = M * (n + 1 - a)
            roles[_x_hat(i, j, a)] = ("x", i, j, a)
            roles[_y_hat(i, j, a)] = ("y", i, j, a)

    for i, j in psi.pattern_edges:
        for terminal_s, terminal_t, (u, v) in (("s1", "t1", (i, j)), ("s2", "t2", (j, i))):
            arcs += [
                (terminal_s, _x(u, v, n)),
                (_x(u, v, 0), terminal_t),
                (terminal_s, _y(u, v, n)),
                (_y(u, v, 0), terminal_t),
            ]
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                p = _p(i, j, a, b)
                edge = psi.adjacent(psi.parts[i][a - 1], psi.parts[j][b - 1])
                wt[p] = 1 if edge else W
                roles[p] = ("p", i, j, (a, b))
                if a < n:
                    arcs.append((p, _p(i, j, a + 1, b)))
                if b < n:
                    arcs.append((p, _p(i, j, a, b + 1)))
            arcs += [
                (_x(i, j, a), _p(i, j, a, 1)),
                (_p(i, j, a, n), _y(i, j, a - 1)),
                (_x(j, i, a), _p(i, j, 1, a)),
                (_p(i, j, n, a), _y(j, i, a - 1)),
            ]

    for v in frozen:
        wt[v] = W + 1
    g = Digraph.from_arcs(arcs, undeletable=frozen | {"s1", "t1", "s2", "t2"})
    instance = WdmcInstance(g, (("s1", "t1"), ("s2", "t2")), wt, 5 * k + h, W)
    logger.info(
        "PSI reduction: h=%d k=%d n=%d -> %d vertices, k'=%d, W=%d",
        h, k, n, len(g), instance.k, W,
    )
    return PsiReduction(psi, instance, M, roles)


def map_psi_solution(reduction: PsiReduction, phi: Mapping[str, str]) -> VertexSet:
    """유효한 준동형 φ 를 축약 인스턴스의 해로 옮깁니다.

    Raises:
        InputError: φ 가 유효한 partitioned homomorphism 이 아닐 때
    """
    psi = reduction.psi
    if not is_partitioned_homomorphism(psi, phi):
        raise InputError("Mapping is not a partitioned homomorphism")
    index = {i: psi.parts[i].index(phi[i]) + 1 for i in psi.pattern}
    chosen = {_z_hat(i, index[i]) for i in psi.pattern}
    for i, j in psi.ordered_pairs():
        chosen.update((_x_hat(i, j, index[i]), _y_hat(i, j, index[i])))
    for i, j in psi.pattern_edges:
        chosen.add(_p(i, j, index[i], index[j]))
    return frozenset(chosen)


def _single_index(hits: set, where: str) -> int:
    if len(hits) != 1:
        raise ExtractionError(f"Solution meets {where} in {len(hits)} weighted vertices")
    return next(iter(hits))


def extract_psi_solution(reduction: PsiReduction, s: Iterable[str]) -> dict[str, str]:
    """축약 인스턴스의 해에서 준동형 φ 를 복원합니다.

    Raises:
        ExtractionError: 해가 X/Y/Z 경로마다 같은 인덱스의 정점 하나를 고르지 않거나
            복원한 φ 가 준동형이 아닐 때
    """
    psi = reduction.psi
    hits: dict[tuple, set] = {}
    for v in s:
        role = reduction.roles.get(v)
        if role is None or role[0] == "p":
            continue
        kind, i, j, a = role
        hits.setdefault((kind, i, j), set()).add(a)

    index = {}
    for i in psi.pattern:
        a = _single_index(hits.get(("z", i, None), set()), f"Z-path {i}")
        for u, v in psi.ordered_pairs():
            if u != i:
                continue
            for kind in ("x", "y"):
                b = _single_index(hits.get((kind, u, v), set()), f"{kind.upper()}-path {u},{v}")
                if b != a:
                    raise ExtractionError(
                        f"{kind.upper()}-path {u},{v} picks index {b}, Z-path {i} picks {a}"
                    )
        index[i] = a
    phi = {i: psi.parts[i][index[i] - 1] for i in psi.pattern}
    if not is_partitioned_homomorphism(psi, phi):
        raise ExtractionError(f"Extracted mapping is not a homomorphism: {phi}")
    return phi


# ---------------------------------------------------------------------------
# Multicolored Clique → Permutation CSP
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CliqueInstance:
    """서로 독립인 k 개의 부분 V_1..V_k (크기 n) 으로 나뉜 무향 그래프."""

    parts: tuple[tuple[str, ...], ...]
    edges: frozenset[frozenset[str]]

    @classmethod
    def from_parts(
        cls, parts: Sequence[Sequence[str]], edges: Iterable[Sequence[str]]
    ) -> CliqueInstance:
        """부분 크기를 맞추고 부분 내부 간선이 없는지 검사합니다.

        Raises:
            InputError: 부분이 독립 집합이 아니거나 간선 끝점을 알 수 없을 때
        """
        named = {str(idx): tuple(str(v) for v in part) for idx, part in enumerate(parts, 1)}
        if not named or any(not part for part in named.values()):
            raise InputError("Clique instance needs at least one non-empty part")
        undirected = _undirected(edges)
        _check_parts(named, undirected)
        for label, part in named.items():
            inside = set(part)
            if any(edge <= inside for edge in undirected):
                raise InputError(f"Part {label} is not an independent set")
        padded = _pad(named)
        return cls(tuple(padded[str(idx)] for idx in range(1, len(parts) + 1)), undirected)

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def n(self) -> int:
        return len(self.parts[0])

    def adjacent(self, i: int, a: int, j: int, b: int) -> bool:
        """v_{i,a} v_{j,b} ∈ E (i, j 는 1-기반, a, b 는 0-기반)."""
        return frozenset((self.parts[i - 1][a], self.parts[j - 1][b])) in self.edges


def is_clique_selection(cl: CliqueInstance, selection: Sequence[int]) -> bool:
    """selection[i-1] = a 가 v_{i,a} 를 고를 때 모든 쌍이 인접하면 True."""
    if len(selection) != cl.k or any(not 0 <= a < cl.n for a in selection):
        return False
    return all(
        cl.adjacent(i, selection[i - 1], j, selection[j - 1])
        for i, j in combinations(range(1, cl.k + 1), 2)
    )


def brute_force_clique(
    cl: CliqueInstance, limits: CapacityLimits | None = None
) -> tuple[int, ...] | None:
    """Raises: CapacityError (n^k 가 max_assignments 를 넘을 때)"""
    (limits or default_limits()).check("max_assignments", cl.n ** cl.k)
    for selection in product(range(cl.n), repeat=cl.k):
        if is_clique_selection(cl, selection):
            return selection
    return None


def _xname(i: int) -> str:
    return f"x{i}"


def _yname(i: int, j: int) -> str:
    return f"y{i}.{j}"


def _mirror(name: str) -> str:
    return name + MIRROR_SUFFIX


def _selects_at_most(x: int, y: tuple[int, int], n: int) -> bool:
    """∧_{0≤a<n-1} (x ≤ a) ∨ (y ≥ (a+1, 0))"""
    return all(x <= a or y >= (a + 1, 0) for a in range(n - 1))


def _selects_at_least(x: int, y: tuple[int, int], n: int) -> bool:
    """∧_{1≤a<n} (y ≤ (a−1, n−1)) ∨ (x ≥ a)"""
    return all(y <= (a - 1, n - 1) or x >= a for a in range(1, n))


def clique_to_permcsp(cl: CliqueInstance) -> PermCspInstance:
    """Multicolored Clique 인스턴스를 Permutation CSP 로 인코딩합니다.

    x_i 와 y_{i,j} 마다 역순 도메인을 갖는 거울 변수(x_i~, y_{i,j}~)를 두고 항등 순열로 묶습니다.
    "y_{i,j} = (a, b) ⇒ x_i = a" 의 두 절 묶음은 각각 (x_i, y_{i,j}~), (y_{i,j}, x_i~) 위의
    downclosed 관계가 됩니다.
    """
    n, k = cl.n, cl.k
    xs = OrderedDomain(range(n))
    ys = OrderedDomain(product(range(n), repeat=2))
    xs_rev = OrderedDomain(reversed(list(xs)))
    ys_rev = OrderedDomain(reversed(list(ys)))

    domains: dict[str, OrderedDomain] = {}
    constraints: list[Binding] = []

    def add_variable(name: str, forward: OrderedDomain, backward: OrderedDomain) -> None:
        domains[name] = forward
        domains[_mirror(name)] = backward
        constraints.append(
            Binding(name, _mirror(name), PermutationConstraint.identity(forward, backward))
        )

    for i in range(1, k + 1):
        add_variable(_xname(i), xs, xs_rev)
    for i, j in product(range(1, k + 1), repeat=2):
        if i == j:
            continue
        y = _yname(i, j)
        add_variable(y, ys, ys_rev)
        low = {(x, v) for x in xs for v in ys if _selects_at_most(x, v, n)}
        high = {(v, x) for v in ys for x in xs if _selects_at_least(x, v, n)}
        constraints.append(
            Binding(_xname(i), _mirror(y), DownclosedRelation.from_pairs(xs, ys_rev, low))
        )
        constraints.append(
            Binding(y, _mirror(_xname(i)), DownclosedRelation.from_pairs(ys, xs_rev, high))
        )

    for i, j in combinations(range(1, k + 1), 2):
        swap = {(a, b): (b, a) for a, b in ys if cl.adjacent(i, a, j, b)}
        constraints.append(
            Binding(_yname(i, j), _yname(j, i), PermutationConstraint(ys, ys, swap))
        )
    return PermCspInstance(domains, constraints)


def clique_from_valuation(cl: CliqueInstance, valuation: Valuation) -> tuple[int, ...]:
    return tuple(int(valuation[_xname(i)]) for i in range(1, cl.k + 1))
