"""그림자 제거: 커버링 집합 패밀리와 bypass 드라이버

해가 있는 인스턴스를, 그림자 없는(shadowless) 해를 갖는 인스턴스 목록으로 바꿉니다.

전략:
  - oracle: brute-force 로 best shadow-maximal 해 S* 를 구해 r(S*) ∪ f(S*) 하나를 냅니다.
  - randomized: 중요 분리자를 시드 기반으로 샘플링해 여러 후보 집합을 냅니다 (정확성 보장 없음).
"""
from __future__ import annotations

import enum
import logging
import random
from dataclasses import dataclass
from typing import Iterable

from dmcut.config import CapacityLimits, ShadowSettings, default_limits, get_settings
from dmcut.digraph import (
    Digraph,
    bypass,
    enumerate_important_separators,
    reach,
    reach_reverse,
)
from dmcut.errors import InputError
from dmcut.multicut import DmcInstance, ShadowReport, VertexSet, minimal_solutions, shadows

logger = logging.getLogger(__name__)


class CoveringStrategy(str, enum.Enum):
    ORACLE = "oracle"
    RANDOMIZED = "randomized"


@dataclass(frozen=True)
class CoveringFamily:
    sets: tuple[VertexSet, ...]
    strategy: CoveringStrategy
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.sets)


def is_thin(g: Digraph, terminals_t: Iterable[str], w: Iterable[str]) -> bool:
    """w 의 모든 v 가 g − (w ∖ {v}) 에서 terminals_t 중 하나에 도달하면 True."""
    w = frozenset(w)
    targets = set(terminals_t)
    g.check_vertices(w | targets)
    for v in sorted(w):
        if v in targets:
            continue
        if not (reach(g, [v], w - {v}) & targets):
            return False
    return True


def best_shadow_maximal_solution(
    inst: DmcInstance, limits: CapacityLimits | None = None
) -> tuple[VertexSet, ShadowReport] | None:
    """최소 해 중 |r ∪ f ∪ S| 최대, 다음으로 |r| 최대, 다음으로 사전순 첫 번째 해.

    |r ∪ f ∪ S| 가 최대인 해는 포함 관계로도 극대이므로 shadow-maximal 입니다.
    """
    best = None
    best_key = None
    for s in minimal_solutions(inst, limits):
        report = shadows(inst, s)
        key = (-len(report.union | s), -len(report.reverse), tuple(sorted(s)))
        if best_key is None or key < best_key:
            best, best_key = (s, report), key
    return best


def is_covering_set(inst: DmcInstance, z: Iterable[str], solution: Iterable[str]) -> bool:
    """z ∩ S = ∅ 이고 r(S) ∪ f(S) ⊆ z 이면 True."""
    z = frozenset(z)
    solution = frozenset(solution)
    return not (z & solution) and shadows(inst, solution).union <= z


def _round_rng(pass_name: str, seed: int, round_index: int) -> random.Random:
    return random.Random(f"dmcut/{pass_name}/{seed}/{round_index}")


def _cut_off(g: Digraph, separator: frozenset[str], targets: list[str]) -> set[str]:
    """g − separator 에서 targets 에 도달하지 못하는 삭제 가능 정점."""
    alive = reach_reverse(g, targets, separator)
    return {u for u in g.deletable_vertices - separator if u not in alive}


def _sampled_union(
    g: Digraph,
    candidates: Iterable[str],
    targets: Iterable[str],
    k: int,
    rng: random.Random,
    probability: float,
    limits: CapacityLimits,
) -> set[str]:
    """샘플된 중요 분리자 X 마다 X 뒤에 가려진 정점을 모읍니다. X 자체는 넣지 않습니다."""
    targets = sorted(targets)
    picked: set[str] = set()
    for v in sorted(candidates):
        for separator in enumerate_important_separators(g, [v], targets, k, limits):
            if rng.random() < probability:
                picked |= _cut_off(g, separator, targets)
    return picked


def covering_family(
    inst: DmcInstance,
    strategy: CoveringStrategy | str = CoveringStrategy.ORACLE,
    seed: int = 0,
    settings: ShadowSettings | None = None,
    limits: CapacityLimits | None = None,
) -> CoveringFamily:
    """그림자를 덮는 후보 집합 Z 들의 패밀리를 만듭니다.

    Args:
        inst: 3-DMC 인스턴스
        strategy: "oracle" 또는 "randomized"
        seed: randomized 전략의 시드
        settings: rounds / sample_probability (미지정 시 configs/dmcut.yaml)
        limits: 용량 한도

    Returns:
        모든 Z 가 V∞ 와 서로소인 CoveringFamily. oracle 전략에서 해가 없으면 빈 패밀리.
    """
    try:
        strategy = CoveringStrategy(strategy)
    except ValueError:
        raise InputError(f"Unknown covering strategy: {strategy}") from None
    limits = limits or default_limits()

    if strategy is CoveringStrategy.ORACLE:
        best = best_shadow_maximal_solution(inst, limits)
        if best is None:
            logger.info("Oracle covering: no solution within budget k=%d", inst.k)
            return CoveringFamily((), strategy)
        s_star, report = best
        logger.info("Oracle covering: S*=%s, shadow size %d", sorted(s_star), len(report.union))
        return CoveringFamily((report.union,), strategy)

    settings = settings or get_settings().shadow_removal
    family: list[VertexSet] = [frozenset()]
    reversed_graph = inst.g.reversed()
    for round_index in range(settings.rounds):
        z_reverse = _sampled_union(
            inst.g,
            inst.deletable,
            inst.sinks,
            inst.k,
            _round_rng("reverse", seed, round_index),
            settings.sample_probability,
            limits,
        )
        frozen = inst.undeletable | z_reverse
        forward_graph = reversed_graph.with_deletable(set(inst.g.vertices) - frozen)
        z_forward = _sampled_union(
            forward_graph,
            [v for v in inst.deletable if v not in frozen],
            inst.sources,
            inst.k,
            _round_rng("forward", seed, round_index),
            settings.sample_probability,
            limits,
        )
        z = frozenset(z_reverse | z_forward)
        if z not in family:
            family.append(z)
    logger.info(
        "Randomized covering: %d distinct sets from %d rounds", len(family), settings.rounds
    )
    return CoveringFamily(tuple(family), strategy, seed)


def shadow_removal(
    inst: DmcInstance,
    strategy: CoveringStrategy | str = CoveringStrategy.ORACLE,
    seed: int = 0,
    settings: ShadowSettings | None = None,
    limits: CapacityLimits | None = None,
) -> list[DmcInstance]:
    """패밀리의 각 Z 를 bypass 한 인스턴스 목록. Z = ∅ 이면 입력 인스턴스 그대로."""
    family = covering_family(inst, strategy, seed, settings, limits)
    results = []
    for z in family.sets:
        if not z:
            results.append(inst)
            continue
        results.append(inst.with_graph(bypass(inst.g, z), inst.undeletable - z))
    return results


# ---------------------------------------------------------------------------
# randomized 전략의 경험적 성공률
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoveringSuccessRate:
    """시드별로 패밀리가 S* 의 그림자를 덮었는지 센 결과. 해가 없는 인스턴스는 skipped."""

    trials: int
    successes: int
    skipped: int = 0

    @property
    def rate(self) -> float | None:
        return self.successes / self.trials if self.trials else None

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "successes": self.successes,
            "skipped": self.skipped,
            "rate": self.rate,
        }


def family_covers(inst: DmcInstance, family: CoveringFamily, solution: Iterable[str]) -> bool:
    """패밀리의 어떤 Z 가 solution 에 대해 커버링 집합이면 True."""
    solution = frozenset(solution)
    return any(is_covering_set(inst, z, solution) for z in family.sets)


def covering_success_rate(
    instances: Iterable[DmcInstance],
    seeds: Iterable[int],
    settings: ShadowSettings | None = None,
    limits: CapacityLimits | None = None,
) -> CoveringSuccessRate:
    """randomized 패밀리가 oracle S* 의 그림자를 덮은 (인스턴스, 시드) 비율을 잽니다."""
    seeds = list(seeds)
    limits = limits or default_limits()
    trials = successes = skipped = 0
    for inst in instances:
        best = best_shadow_maximal_solution(inst, limits)
        if best is None:
            skipped += 1
            continue
        s_star, _ = best
        for seed in seeds:
            family = covering_family(inst, CoveringStrategy.RANDOMIZED, seed, settings, limits)
            trials += 1
            successes += family_covers(inst, family, s_star)
    result = CoveringSuccessRate(trials, successes, skipped)
    logger.info(
        "Randomized covering success: %d/%d (skipped %d no-instances)", successes, trials, skipped
    )
    return result
