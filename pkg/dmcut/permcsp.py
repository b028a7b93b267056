"""Permutation CSP: 데이터 모델, 만족 판정, 전파 기반 해법, brute-force 오라클, FO 인코딩 그래프

변수마다 전순서 도메인을 갖고, 제약은 두 종류입니다.
  - downclosed: 좌표를 줄여도 닫혀 있는 관계 (non-increasing frontier 로 정규화)
  - permutation: 도메인 부분집합 사이의 전단사, 짝지어진 쌍만 만족
"""
from __future__ import annotations

import enum
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Mapping, Sequence, Union

from dmcut.config import CapacityLimits, default_limits
from dmcut.errors import InputError
from dmcut.matrixgrid import ZeroOneMatrix

logger = logging.getLogger(__name__)

Value = Hashable
Valuation = dict[str, Value]


class Bound(enum.Enum):
    """frontier 값이 도메인의 어떤 원소보다도 작음을 나타냅니다."""

    BOTTOM = "bottom"


BOTTOM = Bound.BOTTOM


# ---------------------------------------------------------------------------
# OrderedDomain
# ---------------------------------------------------------------------------

class OrderedDomain:
    """서로 다른 값의 순서 있는 목록. 순서는 목록 순서입니다."""

    def __init__(self, values: Iterable[Value]) -> None:
        self.values = tuple(values)
        self._index = {v: i for i, v in enumerate(self.values)}
        if len(self._index) != len(self.values):
            raise InputError("Domain values must be distinct")

    def index(self, value: Value) -> int:
        try:
            return self._index[value]
        except (KeyError, TypeError):
            raise InputError(f"Value {value!r} is not in the domain") from None

    def __contains__(self, value: object) -> bool:
        try:
            return value in self._index
        except TypeError:
            return False

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Value]:
        return iter(self.values)

    def __getitem__(self, i: int) -> Value:
        return self.values[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OrderedDomain):
            return NotImplemented
        return self.values == other.values

    def __hash__(self) -> int:
        return hash(self.values)

    def __repr__(self) -> str:
        return f"OrderedDomain({list(self.values)!r})"

    def restrict(self, allowed: Iterable[Value]) -> OrderedDomain:
        keep = set(allowed)
        return OrderedDomain(v for v in self.values if v in keep)


# ---------------------------------------------------------------------------
# 제약
# ---------------------------------------------------------------------------

class DownclosedRelation:
    """R = {(a, b) : b ≤ f(a)} 로 표현되는 downclosed 관계.

    frontier 는 왼쪽 도메인 인덱스마다 오른쪽 도메인 인덱스(−1 은 BOTTOM)이며 non-increasing 입니다.
    """

    def __init__(self, left: OrderedDomain, right: OrderedDomain, frontier: Sequence[int]) -> None:
        frontier = tuple(int(x) for x in frontier)
        if len(frontier) != len(left):
            raise InputError("Frontier length must equal the left domain size")
        if any(x < -1 or x >= len(right) for x in frontier):
            raise InputError("Frontier index out of range")
        if any(a < b for a, b in zip(frontier, frontier[1:])):
            raise InputError("Frontier must be non-increasing")
        self.left = left
        self.right = right
        self.frontier = frontier

    @classmethod
    def from_pairs(
        cls, left: OrderedDomain, right: OrderedDomain, pairs: Iterable[tuple[Value, Value]]
    ) -> DownclosedRelation:
        """임의의 쌍 집합의 아래쪽 닫힘(downward closure)을 만듭니다."""
        best = [-1] * len(left)
        for a, b in pairs:
            i, j = left.index(a), right.index(b)
            best[i] = max(best[i], j)
        frontier = []
        running = -1
        for value in reversed(best):
            running = max(running, value)
            frontier.append(running)
        return cls(left, right, frontier[::-1])

    @classmethod
    def from_frontier(
        cls,
        left: OrderedDomain,
        right: OrderedDomain,
        frontier: Sequence[Union[Value, Bound]],
    ) -> DownclosedRelation:
        """값(또는 BOTTOM)으로 된 frontier 로 만듭니다.

        Raises:
            InputError: frontier 가 non-increasing 이 아닐 때
        """
        return cls(left, right, [-1 if b is BOTTOM else right.index(b) for b in frontier])

    @classmethod
    def full(cls, left: OrderedDomain, right: OrderedDomain) -> DownclosedRelation:
        return cls(left, right, [len(right) - 1] * len(left))

    @staticmethod
    def is_downclosed(
        left: OrderedDomain, right: OrderedDomain, pairs: Iterable[tuple[Value, Value]]
    ) -> bool:
        pairs = set(pairs)
        return DownclosedRelation.from_pairs(left, right, pairs).pairs() == pairs

    def contains(self, a: Value, b: Value) -> bool:
        return self.right.index(b) <= self.frontier[self.left.index(a)]

    def pairs(self) -> set[tuple[Value, Value]]:
        return {
            (a, self.right[j])
            for a, f in zip(self.left, self.frontier)
            for j in range(f + 1)
        }

    def frontier_values(self) -> list[Union[Value, Bound]]:
        return [BOTTOM if f < 0 else self.right[f] for f in self.frontier]

    def boundary(self) -> list[tuple[Value, Value]]:
        """극대 쌍 (a, f(a)): a 가 마지막이거나 f(a+1) < f(a) 인 경우."""
        result = []
        for i, f in enumerate(self.frontier):
            if f < 0:
                continue
            if i == len(self.frontier) - 1 or self.frontier[i + 1] < f:
                result.append((self.left[i], self.right[f]))
        return result

    def restrict(self, left: OrderedDomain, right: OrderedDomain) -> DownclosedRelation:
        """부분 도메인(같은 순서)으로 제한합니다."""
        frontier = []
        for a in left:
            bound = self.frontier[self.left.index(a)]
            keep = [j for j, b in enumerate(right) if self.right.index(b) <= bound]
            frontier.append(keep[-1] if keep else -1)
        return DownclosedRelation(left, right, frontier)

    def inverse(self) -> DownclosedRelation:
        frontier = []
        for j in range(len(self.right)):
            rows = [i for i, f in enumerate(self.frontier) if f >= j]
            frontier.append(rows[-1] if rows else -1)
        return DownclosedRelation(self.right, self.left, frontier)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DownclosedRelation):
            return NotImplemented
        return (self.left, self.right, self.frontier) == (other.left, other.right, other.frontier)

    def __repr__(self) -> str:
        return f"DownclosedRelation(frontier={self.frontier_values()!r})"


class PermutationConstraint:
    """X_i ⊆ D_i 에서 X_j ⊆ D_j 로 가는 전단사. 짝지어진 쌍 (x, π(x)) 만 만족합니다."""

    def __init__(
        self, left: OrderedDomain, right: OrderedDomain, mapping: Mapping[Value, Value]
    ) -> None:
        mapping = dict(mapping)
        if len(set(mapping.values())) != len(mapping):
            raise InputError("Permutation constraint is not a bijection")
        for a, b in mapping.items():
            if a not in left or b not in right:
                raise InputError(f"Permutation pair ({a!r}, {b!r}) lies outside the domains")
        self.left = left
        self.right = right
        self.mapping = {a: mapping[a] for a in left if a in mapping}
        self.inverse_mapping = {b: a for a, b in self.mapping.items()}

    @classmethod
    def identity(
        cls, left: OrderedDomain, right: OrderedDomain, support: Iterable[Value] | None = None
    ) -> PermutationConstraint:
        shared = [v for v in left if v in right] if support is None else list(support)
        return cls(left, right, {v: v for v in shared})

    def contains(self, a: Value, b: Value) -> bool:
        return a in self.mapping and self.mapping[a] == b

    def pairs(self) -> set[tuple[Value, Value]]:
        return set(self.mapping.items())

    def restrict(self, left: OrderedDomain, right: OrderedDomain) -> PermutationConstraint:
        return PermutationConstraint(
            left,
            right,
            {a: b for a, b in self.mapping.items() if a in left and b in right},
        )

    def inverse(self) -> PermutationConstraint:
        return PermutationConstraint(self.right, self.left, self.inverse_mapping)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PermutationConstraint):
            return NotImplemented
        return (self.left, self.right, self.mapping) == (other.left, other.right, other.mapping)

    def __repr__(self) -> str:
        return f"PermutationConstraint({len(self.mapping)} pairs)"


Relation = Union[DownclosedRelation, PermutationConstraint]


@dataclass(frozen=True)
class Binding:
    """순서 있는 변수 쌍 (left, right) 에 걸린 제약."""

    left: str
    right: str
    relation: Relation

    def __post_init__(self) -> None:
        if self.left == self.right:
            raise InputError(f"Constraint must bind two distinct variables: {self.left}")

    @property
    def kind(self) -> str:
        return "downclosed" if isinstance(self.relation, DownclosedRelation) else "permutation"


# ---------------------------------------------------------------------------
# PermCspInstance
# ---------------------------------------------------------------------------

class PermCspInstance:
    """변수 → OrderedDomain 과 Binding 목록.

    Raises:
        InputError: 제약이 알 수 없는 변수를 참조하거나 제약의 도메인이 변수 도메인과 다를 때
    """

    def __init__(
        self,
        domains: Mapping[str, Union[OrderedDomain, Sequence[Value]]],
        constraints: Iterable[Binding] = (),
    ) -> None:
        self.domains: dict[str, OrderedDomain] = {
            str(x): d if isinstance(d, OrderedDomain) else OrderedDomain(d)
            for x, d in domains.items()
        }
        self.constraints = tuple(constraints)
        for binding in self.constraints:
            for var, domain in (
                (binding.left, binding.relation.left),
                (binding.right, binding.relation.right),
            ):
                if var not in self.domains:
                    raise InputError(f"Constraint references unknown variable {var}")
                if self.domains[var] != domain:
                    raise InputError(f"Constraint domain does not match variable {var}")

    @property
    def variables(self) -> tuple[str, ...]:
        """선언 순서."""
        return tuple(self.domains)

    def restrict(self, allowed: Mapping[str, Iterable[Value]]) -> PermCspInstance:
        """allowed 에 있는 변수의 도메인을 걸러낸 새 인스턴스 (제약도 함께 제한)."""
        domains = {
            x: d.restrict(allowed[x]) if x in allowed else d for x, d in self.domains.items()
        }
        constraints = [
            Binding(b.left, b.right, b.relation.restrict(domains[b.left], domains[b.right]))
            for b in self.constraints
        ]
        return PermCspInstance(domains, constraints)

    def with_constraints(self, extra: Iterable[Binding]) -> PermCspInstance:
        return PermCspInstance(self.domains, self.constraints + tuple(extra))

    @property
    def has_empty_domain(self) -> bool:
        return any(len(d) == 0 for d in self.domains.values())

    def __repr__(self) -> str:
        return f"PermCspInstance({len(self.domains)} vars, {len(self.constraints)} constraints)"


def is_satisfied(inst: PermCspInstance, alpha: Mapping[str, Value]) -> bool:
    """α 가 모든 제약을 만족하면 True.

    Raises:
        InputError: α 가 일부 변수에 값을 주지 않았거나 값이 도메인 밖일 때
    """
    missing = [x for x in inst.variables if x not in alpha]
    if missing:
        raise InputError(f"Partial valuation, missing: {missing}")
    for x in inst.variables:
        if alpha[x] not in inst.domains[x]:
            raise InputError(f"Value {alpha[x]!r} is outside the domain of {x}")
    return all(b.relation.contains(alpha[b.left], alpha[b.right]) for b in inst.constraints)


# ---------------------------------------------------------------------------
# 해법
# ---------------------------------------------------------------------------

Domains = dict[str, list[int]]


def _revise(binding: Binding, current: Domains) -> bool:
    """한 제약에 대해 양쪽 도메인의 지지되지 않는 값을 지웁니다. 변경 여부를 반환합니다."""
    rel = binding.relation
    left, right = current[binding.left], current[binding.right]
    if isinstance(rel, DownclosedRelation):
        if not left or not right:
            new_left, new_right = [], []
        else:
            cap = rel.frontier[left[0]]
            new_right = [j for j in right if j <= cap]
            floor = new_right[0] if new_right else len(rel.right)
            new_left = [i for i in left if rel.frontier[i] >= floor]
    else:
        forward = {rel.left.index(a): rel.right.index(b) for a, b in rel.mapping.items()}
        right_set = set(right)
        new_left = [i for i in left if forward.get(i) in right_set]
        matched = {forward[i] for i in new_left}
        new_right = [j for j in right if j in matched]
    changed = new_left != left or new_right != right
    current[binding.left], current[binding.right] = new_left, new_right
    return changed


def _propagate(inst: PermCspInstance, current: Domains) -> bool:
    """고정점까지 전파합니다. 빈 도메인이 생기면 False."""
    changed = True
    while changed:
        changed = False
        for binding in inst.constraints:
            if _revise(binding, current):
                changed = True
                if not current[binding.left] or not current[binding.right]:
                    return False
    return all(current[x] for x in current)


def solve(inst: PermCspInstance, limits: CapacityLimits | None = None) -> Valuation | None:
    """만족하는 valuation 을 찾습니다. 없으면 None.

    가장 작은 도메인의 변수부터 도메인 순서대로 값을 시도하는 백트래킹이며,
    각 노드에서 downclosed 임계값 전파와 permutation 채널링을 고정점까지 적용합니다.
    """
    limits = limits or default_limits()
    nodes = 0

    def search(current: Domains) -> Valuation | None:
        nonlocal nodes
        nodes += 1
        limits.check("max_search_nodes", nodes)
        if not _propagate(inst, current):
            return None
        open_vars = [x for x in inst.variables if len(current[x]) > 1]
        if not open_vars:
            alpha = {x: inst.domains[x][current[x][0]] for x in inst.variables}
            return alpha if is_satisfied(inst, alpha) else None
        var = min(open_vars, key=lambda x: (len(current[x]), x))
        for i in current[var]:
            trial = {x: list(v) for x, v in current.items()}
            trial[var] = [i]
            found = search(trial)
            if found is not None:
                return found
        return None

    start = {x: list(range(len(d))) for x, d in inst.domains.items()}
    result = search(start)
    logger.debug("Permutation CSP search visited %d nodes (sat=%s)", nodes, result is not None)
    return result


def brute_force_csp(
    inst: PermCspInstance, limits: CapacityLimits | None = None
) -> Valuation | None:
    """도메인 곱을 사전순으로 훑어 첫 번째 만족 valuation 을 반환합니다.

    Raises:
        CapacityError: 도메인 크기의 곱이 max_csp_product 를 넘을 때
    """
    variables = inst.variables
    size = math.prod(len(inst.domains[x]) for x in variables)
    (limits or default_limits()).check("max_csp_product", size)
    for values in itertools.product(*(inst.domains[x].values for x in variables)):
        alpha = dict(zip(variables, values))
        if is_satisfied(inst, alpha):
            return alpha
    return None


# ---------------------------------------------------------------------------
# FO 인코딩 그래프
# ---------------------------------------------------------------------------

Node = tuple[str, Value]


@dataclass(frozen=True)
class ColoredOrderedGraph:
    """정점은 (변수, 값), 색은 변수, 순서 ≺ 는 변수 순서대로 이어 붙인 도메인 순서입니다.

    edges 는 제약 색 이름(R{i} / pi{i}) → 간선 목록입니다.
    """

    order: tuple[Node, ...]
    edges: Mapping[str, tuple[tuple[Node, Node], ...]]
    bindings: Mapping[str, Binding]

    def is_matching(self, color: str) -> bool:
        seen: set[Node] = set()
        for u, v in self.edges[color]:
            if u in seen or v in seen:
                return False
            seen |= {u, v}
        return True

    def adjacency(self, color: str) -> ZeroOneMatrix:
        """R-셀 부분 행렬: 행은 왼쪽 변수 도메인, 열은 오른쪽 변수 도메인."""
        rel = self.bindings[color].relation
        rows = [[0] * len(rel.right) for _ in rel.left]
        for (_, a), (_, b) in self.edges[color]:
            rows[rel.left.index(a)][rel.right.index(b)] = 1
        return ZeroOneMatrix(rows)

    def padded_adjacency(self, color: str) -> ZeroOneMatrix:
        """전체 정점 순서 ≺ 위의 (대칭) 인접 행렬."""
        index = {node: i for i, node in enumerate(self.order)}
        rows = [[0] * len(self.order) for _ in self.order]
        for u, v in self.edges[color]:
            rows[index[u]][index[v]] = 1
            rows[index[v]][index[u]] = 1
        return ZeroOneMatrix(rows)

    def reconstruct(self, color: str) -> set[tuple[Value, Value]]:
        """R 색 간선 (a', b') 중 a' ≥ a, b' ≥ b 인 것이 있는 (a, b) 의 집합."""
        rel = self.bindings[color].relation
        edges = [(rel.left.index(a), rel.right.index(b)) for (_, a), (_, b) in self.edges[color]]
        return {
            (a, b)
            for i, a in enumerate(rel.left)
            for j, b in enumerate(rel.right)
            if any(ei >= i and ej >= j for ei, ej in edges)
        }


def build_fo_encoding(inst: PermCspInstance) -> ColoredOrderedGraph:
    """downclosed 제약은 경계 극대 쌍을, permutation 제약은 짝을 색 간선으로 둡니다."""
    order = tuple((x, v) for x in inst.variables for v in inst.domains[x])
    edges: dict[str, tuple[tuple[Node, Node], ...]] = {}
    bindings: dict[str, Binding] = {}
    for idx, binding in enumerate(inst.constraints):
        if isinstance(binding.relation, DownclosedRelation):
            color = f"R{idx}"
            pairs = binding.relation.boundary()
        else:
            color = f"pi{idx}"
            pairs = list(binding.relation.mapping.items())
        edges[color] = tuple(((binding.left, a), (binding.right, b)) for a, b in pairs)
        bindings[color] = binding
    return ColoredOrderedGraph(order, edges, bindings)
