"""시드 기반 랜덤 인스턴스 생성기

같은 (seed, 파라미터) 는 항상 같은 인스턴스를 만듭니다.
오라클 동치성 테스트와 `dmcut gen` 이 사용합니다.
"""
from __future__ import annotations

import logging
import random
from itertools import combinations, product

from dmcut.digraph import Digraph
from dmcut.errors import InputError
from dmcut.matrixgrid import ZeroOneMatrix
from dmcut.multicut import DmcInstance
from dmcut.permcsp import (
    Binding,
    DownclosedRelation,
    OrderedDomain,
    PermCspInstance,
    PermutationConstraint,
)
from dmcut.reductions import CliqueInstance, PsiInstance

logger = logging.getLogger(__name__)


def _check_probability(name: str, p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise InputError(f"{name} must lie in [0, 1]: {p}")


def random_dmc(
    seed: int,
    n: int = 8,
    density: float = 0.3,
    k: int = 2,
    undeletable_probability: float = 0.1,
) -> DmcInstance:
    """정점 v0..v{n-1} 위의 랜덤 유향 그래프와 세 단말 쌍.

    서로 다른 쌍은 단말을 공유할 수 있습니다. 단말이 아닌 정점은
    undeletable_probability 확률로 V∞ 에 들어갑니다.
    """
    if n < 2:
        raise InputError(f"Need at least two vertices: n={n}")
    _check_probability("density", density)
    _check_probability("undeletable_probability", undeletable_probability)
    rng = random.Random(seed)
    vertices = [f"v{i}" for i in range(n)]
    arcs = [(u, v) for u, v in product(vertices, repeat=2) if u != v and rng.random() < density]
    pairs = [tuple(rng.sample(vertices, 2)) for _ in range(3)]
    terminals = {v for pair in pairs for v in pair}
    frozen = {
        v for v in vertices if v not in terminals and rng.random() < undeletable_probability
    }
    g = Digraph({v: v not in frozen for v in vertices}, arcs)
    return DmcInstance.from_graph(g, pairs, k)


def random_psi(seed: int, h: int = 2, k: int = 1, n: int = 2, density: float = 0.5) -> PsiInstance:
    """패턴 정점 1..h, 간선 k 개 (고립 정점 없음), 부분 크기 n 인 PSI 인스턴스.

    호스트 간선은 패턴 간선에 대응하는 두 부분 사이에서만 density 확률로 만듭니다.
    """
    if h < 2 or not (h + 1) // 2 <= k <= h * (h - 1) // 2 or n < 1:
        raise InputError(f"Cannot build a pattern with h={h}, k={k}, n={n}")
    _check_probability("density", density)
    rng = random.Random(seed)
    labels = [str(i) for i in range(1, h + 1)]
    all_pairs = list(combinations(labels, 2))
    while True:
        edges = rng.sample(all_pairs, k)
        if {v for e in edges for v in e} == set(labels):
            break
    parts = {i: [f"{i}.{a}" for a in range(1, n + 1)] for i in labels}
    host = [
        (u, v)
        for i, j in sorted(edges)
        for u, v in product(parts[i], parts[j])
        if rng.random() < density
    ]
    return PsiInstance.from_parts(edges, parts, host)


def random_clique(seed: int, k: int = 2, n: int = 2, density: float = 0.5) -> CliqueInstance:
    if k < 1 or n < 1:
        raise InputError(f"Need k >= 1 and n >= 1: k={k}, n={n}")
    _check_probability("density", density)
    rng = random.Random(seed)
    parts = [[f"v{i}.{a}" for a in range(n)] for i in range(1, k + 1)]
    edges = [
        (u, v)
        for p, q in combinations(parts, 2)
        for u, v in product(p, q)
        if rng.random() < density
    ]
    return CliqueInstance.from_parts(parts, edges)


def random_matrix(
    seed: int, n: int = 6, m: int | None = None, density: float = 0.3
) -> ZeroOneMatrix:
    m = n if m is None else m
    _check_probability("density", density)
    rng = random.Random(seed)
    return ZeroOneMatrix([[int(rng.random() < density) for _ in range(m)] for _ in range(n)])


def random_frontier(rng: random.Random, left: int, right: int) -> list[int]:
    """길이 left, 값 −1..right−1 의 non-increasing 수열."""
    return sorted((rng.randint(-1, right - 1) for _ in range(left)), reverse=True)


def random_csp(
    seed: int,
    variables: int = 4,
    max_domain: int = 5,
    constraints: int = 4,
    permutation_probability: float = 0.4,
) -> PermCspInstance:
    """변수 X0.., 정수 도메인, 랜덤 downclosed / 순열 제약."""
    if variables < 2 or max_domain < 1 or constraints < 0:
        raise InputError(
            f"Invalid CSP shape: variables={variables}, max_domain={max_domain}, "
            f"constraints={constraints}"
        )
    _check_probability("permutation_probability", permutation_probability)
    rng = random.Random(seed)
    domains = {
        f"X{i}": OrderedDomain(range(rng.randint(1, max_domain))) for i in range(variables)
    }
    names = sorted(domains)
    bindings = []
    for _ in range(constraints):
        left, right = rng.sample(names, 2)
        dl, dr = domains[left], domains[right]
        if rng.random() < permutation_probability:
            size = rng.randint(0, min(len(dl), len(dr)))
            mapping = dict(zip(rng.sample(list(dl), size), rng.sample(list(dr), size)))
            relation = PermutationConstraint(dl, dr, mapping)
        else:
            relation = DownclosedRelation(dl, dr, random_frontier(rng, len(dl), len(dr)))
        bindings.append(Binding(left, right, relation))
    return PermCspInstance(domains, bindings)
