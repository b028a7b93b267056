"""dmcut 명령행 진입점: 서브커맨드 디스패치

사용 예:
  python -m dmcut solve instance.json --seed 7
  python -m dmcut oracle instance.json
  python -m dmcut gen dmc --seed 1 --n 8
  python -m dmcut matrix analyze m.txt --grid-minor 2

종료 코드: 0 성공/참, 1 부정 답, 2 용량 한도 초과, 3 입력 오류, 4 내부 오류
출력은 정렬된 키의 JSON 이며 provenance 블록을 포함합니다 (행렬 텍스트 제외).
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict, replace
from typing import Any, Callable, Mapping, Optional, Sequence, Union

import yaml

from dmcut import __version__
from dmcut.config import Settings, load_config, settings_from_config
from dmcut.errors import CapacityError, ExtractionError, InputError
from dmcut.flowaug import augment_exhaustive, verify_augmentation
from dmcut.generators import random_clique, random_csp, random_dmc, random_matrix, random_psi
from dmcut.matrixgrid import (
    Division,
    find_grid_minor,
    find_rank_division,
    grid_rank,
    gridminor_or_contraction,
    is_grid_minor,
    is_rank_division,
    verify_matrix_contraction,
)
from dmcut.multicut import (
    DmcInstance,
    brute_force_dmc,
    brute_force_wdmc,
    is_shadowless,
    is_solution,
    is_wdmc_solution,
    minimal_solutions,
)
from dmcut.observability import configure_logging
from dmcut.permcsp import brute_force_csp, solve
from dmcut.pipeline import PipelineTrace, solve_dmc
from dmcut.reductions import (
    PsiReduction,
    brute_force_clique,
    brute_force_psi,
    clique_from_valuation,
    clique_to_permcsp,
    extract_psi_solution,
    is_clique_selection,
    is_partitioned_homomorphism,
    map_psi_solution,
    psi_to_wdmc,
)
from dmcut.serialization import (
    augmentation_from_dict,
    augmentation_to_dict,
    clique_from_dict,
    clique_to_dict,
    contraction_from_dict,
    csp_from_dict,
    csp_to_dict,
    division_from_dict,
    dmc_from_dict,
    dmc_to_dict,
    dumps,
    graph_from_dict,
    load_json,
    load_matrix,
    psi_from_dict,
    psi_to_dict,
    solution_from_dict,
    valuation_to_dict,
    wdmc_from_dict,
    wdmc_to_dict,
)
from dmcut.shadowrm import CoveringStrategy, covering_success_rate, shadow_removal

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_CAPACITY = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4

TOOL_NAME = "dmcut"

# provenance flags 에서 제외 (출력 내용에 영향 없음)
_NON_SEMANTIC = frozenset({"command", "action", "output", "config", "log_level", "seed"})

Payload = Union[dict[str, Any], str]
CommandResult = tuple[int, Payload]
Handler = Callable[[argparse.Namespace, Settings], CommandResult]


# ---------------------------------------------------------------------------
# 입력 헬퍼
# ---------------------------------------------------------------------------

def _unwrap(data: Mapping[str, Any], *keys: str) -> Mapping[str, Any]:
    """다른 서브커맨드 출력에 중첩된 페이로드를 꺼냅니다. 없으면 data 그대로."""
    for key in keys:
        nested = data.get(key)
        if isinstance(nested, dict):
            return nested
    return data


def _load_dmc(path: str) -> DmcInstance:
    return dmc_from_dict(_unwrap(load_json(path), "instance"))


def _verdict(ok: bool) -> int:
    return EXIT_OK if ok else EXIT_NEGATIVE


def _solution_payload(solution: Optional[frozenset[str]]) -> dict[str, Any]:
    if solution is None:
        return {"solution": None, "size": None}
    return {"solution": sorted(solution), "size": len(solution)}


# ---------------------------------------------------------------------------
# 3-DMC
# ---------------------------------------------------------------------------

def _cmd_solve(args: argparse.Namespace, settings: Settings) -> CommandResult:
    inst = _load_dmc(args.input)
    if args.strategy == "brute":
        solution = brute_force_dmc(inst, settings.capacity)
        return _verdict(solution is not None), _solution_payload(solution)

    overrides: dict[str, Any] = {}
    if args.zeta is not None:
        overrides["zeta"] = args.zeta
    if args.rho is not None:
        overrides["rho"] = args.rho
    if args.no_brute_check:
        overrides["brute_check"] = False
    cfg = replace(settings.irrelevant_vertex, **overrides)

    trace = PipelineTrace()
    solution = solve_dmc(
        inst,
        cfg=cfg,
        seed=args.seed,
        strategy=args.covering,
        trace=trace,
        settings=settings,
        limits=settings.capacity,
    )
    payload = _solution_payload(solution)
    payload["trace"] = trace.to_dict()
    return _verdict(solution is not None), payload


def _cmd_oracle(args: argparse.Namespace, settings: Settings) -> CommandResult:
    data = _unwrap(load_json(args.input), "instance")
    if args.weighted:
        wdmc = wdmc_from_dict(data)
        solution = brute_force_wdmc(wdmc, settings.capacity)
        payload = _solution_payload(solution)
        payload["weight"] = wdmc.weight(solution) if solution is not None else None
        return _verdict(solution is not None), payload

    inst = dmc_from_dict(data)
    if args.minimal:
        found = minimal_solutions(inst, settings.capacity)
        payload = {"minimal_solutions": sorted(sorted(s) for s in found)}
        return _verdict(bool(found)), payload
    solution = brute_force_dmc(inst, settings.capacity)
    return _verdict(solution is not None), _solution_payload(solution)


def _cmd_shadowrm(args: argparse.Namespace, settings: Settings) -> CommandResult:
    inst = _load_dmc(args.input)
    bypassed = shadow_removal(
        inst, args.strategy, args.seed, settings.shadow_removal, settings.capacity
    )
    original = set(inst.g.vertices)
    instances = [
        {"bypassed": sorted(original - set(b.g.vertices)), "instance": dmc_to_dict(b)}
        for b in bypassed
    ]
    payload = {"strategy": args.strategy, "instances": instances}
    if args.success_seeds:
        seeds = range(args.seed, args.seed + args.success_seeds)
        rate = covering_success_rate([inst], seeds, settings.shadow_removal, settings.capacity)
        payload["success_rate"] = rate.to_dict()
    return _verdict(bool(instances)), payload


def _cmd_augment(args: argparse.Namespace, settings: Settings) -> CommandResult:
    inst = _load_dmc(args.input)
    if args.pair is not None and not 1 <= args.pair <= len(inst.terminal_pairs):
        raise InputError(f"Pair index must be 1..{len(inst.terminal_pairs)}: {args.pair}")
    indices = [args.pair] if args.pair is not None else range(1, len(inst.terminal_pairs) + 1)
    augmentations = []
    for index in indices:
        s, t = inst.terminal_pairs[index - 1]
        for z, aug in augment_exhaustive(
            inst.g, s, t, inst.k, settings.augmentation, settings.capacity
        ):
            entry = augmentation_to_dict(s, t, z, aug)
            entry["pair"] = index
            augmentations.append(entry)
    return _verdict(bool(augmentations)), {"augmentations": augmentations}


# ---------------------------------------------------------------------------
# 축약
# ---------------------------------------------------------------------------

def _cmd_reduce_psi(args: argparse.Namespace, settings: Settings) -> CommandResult:
    reduction = psi_to_wdmc(psi_from_dict(load_json(args.input)))
    payload = {
        "instance": wdmc_to_dict(reduction.instance),
        "M": reduction.M,
        "W": reduction.W,
        "k_prime": reduction.k_prime,
        "roles": {v: list(role) for v, role in sorted(reduction.roles.items())},
    }
    return EXIT_OK, payload


def _cmd_reduce_clique(args: argparse.Namespace, settings: Settings) -> CommandResult:
    cl = clique_from_dict(load_json(args.input))
    return EXIT_OK, {"instance": csp_to_dict(clique_to_permcsp(cl)), "k": cl.k, "n": cl.n}


def _extracted(reduction: PsiReduction, s: frozenset[str]) -> Optional[dict[str, str]]:
    try:
        return extract_psi_solution(reduction, s)
    except ExtractionError as e:
        logger.warning("Extraction failed: %s", e)
        return None


def _cmd_verify_reduction_psi(args: argparse.Namespace, settings: Settings) -> CommandResult:
    psi = psi_from_dict(load_json(args.input))
    reduction = psi_to_wdmc(psi)
    phi = brute_force_psi(psi, settings.capacity)
    s = brute_force_wdmc(reduction.instance, settings.capacity)
    checks: dict[str, bool] = {"agree": (phi is None) == (s is None)}
    if phi is not None:
        mapped = map_psi_solution(reduction, phi)
        checks["mapped_valid"] = is_wdmc_solution(reduction.instance, mapped)
        checks["mapped_size"] = len(mapped) == reduction.k_prime
        checks["mapped_weight"] = reduction.instance.weight(mapped) == reduction.W
        checks["round_trip"] = _extracted(reduction, mapped) == phi
    if s is not None:
        extracted = _extracted(reduction, s)
        checks["extracted"] = extracted is not None and is_partitioned_homomorphism(psi, extracted)
    payload = {
        "psi": psi_to_dict(psi),
        "psi_yes": phi is not None,
        "wdmc_yes": s is not None,
        "checks": checks,
    }
    return _verdict(all(checks.values())), payload


def _cmd_verify_reduction_clique(args: argparse.Namespace, settings: Settings) -> CommandResult:
    cl = clique_from_dict(load_json(args.input))
    selection = brute_force_clique(cl, settings.capacity)
    valuation = solve(clique_to_permcsp(cl), settings.capacity)
    checks = {"agree": (selection is None) == (valuation is None)}
    if valuation is not None:
        checks["decoded_valid"] = is_clique_selection(cl, clique_from_valuation(cl, valuation))
    payload = {
        "clique": clique_to_dict(cl),
        "clique_yes": selection is not None,
        "csp_yes": valuation is not None,
        "checks": checks,
    }
    return _verdict(all(checks.values())), payload


# ---------------------------------------------------------------------------
# 행렬 / CSP
# ---------------------------------------------------------------------------

def _division_or_none(d: Optional[Division]) -> Optional[dict]:
    return d.to_dict() if d is not None else None


def _cmd_matrix_analyze(args: argparse.Namespace, settings: Settings) -> CommandResult:
    m = load_matrix(args.input)
    limits = settings.capacity
    payload: dict[str, Any] = {"shape": list(m.shape)}
    found = True
    requested = args.grid_minor or args.rank_division or args.contract or args.grid_rank

    if args.grid_minor:
        division = find_grid_minor(m, args.grid_minor, limits)
        payload["grid_minor"] = _division_or_none(division)
        found = found and division is not None
    if args.rank_division:
        division = find_rank_division(m, args.rank_division, limits)
        payload["rank_division"] = _division_or_none(division)
        found = found and division is not None
    if args.grid_rank or not requested:
        payload["grid_rank"] = grid_rank(m, limits)
    if args.contract:
        k, c = args.contract
        result = gridminor_or_contraction(m, k, c, limits)
        if isinstance(result, Division):
            payload["contraction"] = None
            payload["contraction_grid_minor"] = result.to_dict()
        else:
            report = verify_matrix_contraction(m, result, c)
            payload["contraction"] = {**result.to_dict(), "report": asdict(report)}
            payload["contraction_grid_minor"] = None
    return _verdict(found), payload


def _cmd_csp_solve(args: argparse.Namespace, settings: Settings) -> CommandResult:
    csp = csp_from_dict(_unwrap(load_json(args.input), "instance"))
    search = brute_force_csp if args.brute else solve
    valuation = search(csp, settings.capacity)
    payload = {
        "satisfiable": valuation is not None,
        "valuation": valuation_to_dict(valuation) if valuation is not None else None,
    }
    return _verdict(valuation is not None), payload


# ---------------------------------------------------------------------------
# 생성기
# ---------------------------------------------------------------------------

def _cmd_gen_dmc(args: argparse.Namespace, settings: Settings) -> CommandResult:
    inst = random_dmc(args.seed, args.n, args.density, args.k, args.undeletable_probability)
    return EXIT_OK, dmc_to_dict(inst)


def _cmd_gen_psi(args: argparse.Namespace, settings: Settings) -> CommandResult:
    return EXIT_OK, psi_to_dict(random_psi(args.seed, args.h, args.k, args.n, args.density))


def _cmd_gen_clique(args: argparse.Namespace, settings: Settings) -> CommandResult:
    return EXIT_OK, clique_to_dict(random_clique(args.seed, args.k, args.n, args.density))


def _cmd_gen_matrix(args: argparse.Namespace, settings: Settings) -> CommandResult:
    return EXIT_OK, random_matrix(args.seed, args.n, args.m, args.density).to_text()


def _cmd_gen_csp(args: argparse.Namespace, settings: Settings) -> CommandResult:
    csp = random_csp(
        args.seed,
        args.variables,
        args.max_domain,
        args.constraints,
        args.permutation_probability,
    )
    return EXIT_OK, csp_to_dict(csp)


# ---------------------------------------------------------------------------
# 검증
# ---------------------------------------------------------------------------

def _cmd_verify_solution(args: argparse.Namespace, settings: Settings) -> CommandResult:
    data = _unwrap(load_json(args.instance), "instance")
    solution = solution_from_dict(load_json(args.solution))
    if args.weighted:
        wdmc = wdmc_from_dict(data)
        valid = is_wdmc_solution(wdmc, solution)
        return _verdict(valid), {"valid": valid, "weight": wdmc.weight(solution)}
    inst = dmc_from_dict(data)
    valid = is_solution(inst, solution)
    payload = {"valid": valid, "size": len(solution), "shadowless": is_shadowless(inst, solution)}
    return _verdict(valid), payload


def _cmd_verify_augmentation(args: argparse.Namespace, settings: Settings) -> CommandResult:
    data = _unwrap(load_json(args.instance), "instance")
    g = dmc_from_dict(data).g if "terminal_pairs" in data else graph_from_dict(data)
    claimed = load_json(args.augmentation)
    if "augmentations" in claimed:
        entries = claimed["augmentations"]
        if not isinstance(entries, list) or not 0 <= args.index < len(entries):
            raise InputError(f"Augmentation index {args.index} out of range")
        claimed = entries[args.index]
    s, t, z, aug = augmentation_from_dict(claimed)
    g.check_vertices([s, t, *z])
    check = verify_augmentation(g, s, t, z, aug)
    return _verdict(check.ok), {**asdict(check), "ok": check.ok}


def _cmd_verify_division(args: argparse.Namespace, settings: Settings) -> CommandResult:
    m = load_matrix(args.matrix)
    division = division_from_dict(
        _unwrap(load_json(args.division), "grid_minor", "rank_division", "contraction_grid_minor")
    )
    if args.rank is not None:
        valid = is_rank_division(m, division, args.rank)
    else:
        valid = is_grid_minor(m, division)
    return _verdict(valid), {"valid": valid, "size": list(division.size)}


def _cmd_verify_contraction(args: argparse.Namespace, settings: Settings) -> CommandResult:
    m = load_matrix(args.matrix)
    contraction = contraction_from_dict(_unwrap(load_json(args.contraction), "contraction"))
    report = verify_matrix_contraction(m, contraction, args.c)
    return _verdict(report.valid), asdict(report)


# ---------------------------------------------------------------------------
# 커맨드 레지스트리: {"command action": handler}
# ---------------------------------------------------------------------------

COMMAND_REGISTRY: dict[str, Handler] = {
    # 3-DMC
    "solve": _cmd_solve,
    "oracle": _cmd_oracle,
    "shadowrm": _cmd_shadowrm,
    "augment": _cmd_augment,
    # 축약
    "reduce psi2wdmc": _cmd_reduce_psi,
    "reduce clique2csp": _cmd_reduce_clique,
    "verify-reduction psi2wdmc": _cmd_verify_reduction_psi,
    "verify-reduction clique2csp": _cmd_verify_reduction_clique,
    # 행렬 / CSP
    "matrix analyze": _cmd_matrix_analyze,
    "csp solve": _cmd_csp_solve,
    # 생성기
    "gen dmc": _cmd_gen_dmc,
    "gen psi": _cmd_gen_psi,
    "gen clique": _cmd_gen_clique,
    "gen matrix": _cmd_gen_matrix,
    "gen csp": _cmd_gen_csp,
    # 검증
    "verify solution": _cmd_verify_solution,
    "verify augmentation": _cmd_verify_augmentation,
    "verify division": _cmd_verify_division,
    "verify contraction": _cmd_verify_contraction,
}


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

class _ArgumentParser(argparse.ArgumentParser):
    """사용법 오류를 종료 코드 3 으로 보고하기 위해 InputError 를 발생시킵니다."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise InputError(f"{self.prog}: {message}")


def _add_seed(parser: argparse.ArgumentParser, required: bool = False) -> None:
    parser.add_argument(
        "--seed", type=int, required=required, default=None if required else 0,
        help="난수 시드 (같은 시드 → 같은 출력)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog=TOOL_NAME, description="3쌍 Directed Multicut FPT 도구 상자")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="설정 파일 경로 (기본: configs/dmcut.yaml)")
    parser.add_argument("--output", "-o", help="출력 파일 경로 (기본: stdout)")
    parser.add_argument(
        "--no-capacity-guard", action="store_true", help="용량 한도를 경고로만 처리"
    )
    parser.add_argument("--log-level", help="로그 레벨 (DEBUG, INFO, WARNING, ...)")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("solve", help="파이프라인(또는 brute force)으로 3-DMC 풀기")
    p.add_argument("input", help="3-DMC 인스턴스 JSON")
    p.add_argument("--strategy", choices=("pipeline", "brute"), default="pipeline")
    p.add_argument(
        "--covering", choices=[s.value for s in CoveringStrategy], default=None,
        help="그림자 제거 전략 (기본: 설정 파일)",
    )
    p.add_argument("--zeta", type=int, help="무관 정점 규칙 ζ")
    p.add_argument("--rho", type=int, help="무관 정점 규칙 ρ")
    p.add_argument("--no-brute-check", action="store_true", help="무관 정점 brute-force 확인 끄기")
    _add_seed(p)

    p = commands.add_parser("oracle", help="brute-force 오라클")
    p.add_argument("input", help="3-DMC (또는 --weighted 이면 2-Wt-DMC) 인스턴스 JSON")
    p.add_argument("--weighted", action="store_true", help="2쌍 가중치 인스턴스로 읽기")
    p.add_argument("--minimal", action="store_true", help="포함 관계 최소 해를 모두 출력")

    p = commands.add_parser("shadowrm", help="그림자 제거 인스턴스 목록")
    p.add_argument("input", help="3-DMC 인스턴스 JSON")
    p.add_argument(
        "--strategy", choices=[s.value for s in CoveringStrategy], default="oracle"
    )
    _add_seed(p)
    p.add_argument(
        "--success-seeds",
        type=int,
        default=0,
        metavar="N",
        help="randomized 패밀리가 oracle S* 의 그림자를 덮는 비율을 시드 N 개로 측정",
    )

    p = commands.add_parser("augment", help="단말 쌍별 흐름 증강")
    p.add_argument("input", help="3-DMC 인스턴스 JSON")
    p.add_argument("--pair", type=int, help="단말 쌍 번호 (1..3, 기본: 전부)")

    for name, help_text in (
        ("reduce", "PSI → 2-Wt-DMC, Multicolored Clique → Permutation CSP 축약"),
        ("verify-reduction", "축약 전후 오라클 답 비교"),
    ):
        group = commands.add_parser(name, help=help_text)
        kinds = group.add_subparsers(dest="action", required=True)
        for kind in ("psi2wdmc", "clique2csp"):
            k = kinds.add_parser(kind)
            k.add_argument("input", help="PSI 또는 clique 인스턴스 JSON")

    group = commands.add_parser("matrix", help="0-1 행렬 분석")
    actions = group.add_subparsers(dest="action", required=True)
    p = actions.add_parser("analyze")
    p.add_argument("input", help="0/1 텍스트 행렬")
    p.add_argument("--grid-minor", type=int, metavar="K", help="K-grid minor 찾기")
    p.add_argument("--rank-division", type=int, metavar="K", help="rank-K division 찾기")
    p.add_argument("--grid-rank", action="store_true", help="grid rank 계산")
    p.add_argument(
        "--contract", type=int, nargs=2, metavar=("K", "C"),
        help="K-grid minor 또는 4C 한도의 축약 순서",
    )

    group = commands.add_parser("csp", help="Permutation CSP")
    actions = group.add_subparsers(dest="action", required=True)
    p = actions.add_parser("solve")
    p.add_argument("input", help="CSP 인스턴스 JSON")
    p.add_argument("--brute", action="store_true", help="도메인 곱 전수 탐색 오라클 사용")

    group = commands.add_parser("gen", help="시드 기반 인스턴스 생성")
    kinds = group.add_subparsers(dest="action", required=True)
    p = kinds.add_parser("dmc")
    _add_seed(p, required=True)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--undeletable-probability", type=float, default=0.1)
    p = kinds.add_parser("psi")
    _add_seed(p, required=True)
    p.add_argument("--h", type=int, default=2, help="패턴 정점 수")
    p.add_argument("--k", type=int, default=1, help="패턴 간선 수")
    p.add_argument("--n", type=int, default=2, help="부분 크기")
    p.add_argument("--density", type=float, default=0.5)
    p = kinds.add_parser("clique")
    _add_seed(p, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--density", type=float, default=0.5)
    p = kinds.add_parser("matrix")
    _add_seed(p, required=True)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--density", type=float, default=0.3)
    p = kinds.add_parser("csp")
    _add_seed(p, required=True)
    p.add_argument("--variables", type=int, default=4)
    p.add_argument("--max-domain", type=int, default=5)
    p.add_argument("--constraints", type=int, default=4)
    p.add_argument("--permutation-probability", type=float, default=0.4)

    group = commands.add_parser("verify", help="주장된 해/증강/division 검증")
    kinds = group.add_subparsers(dest="action", required=True)
    p = kinds.add_parser("solution")
    p.add_argument("instance")
    p.add_argument("solution", help='{"solution": [...]} JSON')
    p.add_argument("--weighted", action="store_true")
    p = kinds.add_parser("augmentation")
    p.add_argument("instance")
    p.add_argument("augmentation")
    p.add_argument("--index", type=int, default=0, help="augmentations 목록의 인덱스")
    p = kinds.add_parser("division")
    p.add_argument("matrix")
    p.add_argument("division")
    p.add_argument("--rank", type=int, help="rank-K division 으로 검사 (기본: grid minor)")
    p = kinds.add_parser("contraction")
    p.add_argument("matrix")
    p.add_argument("contraction")
    p.add_argument("--c", type=int, required=True)
    return parser


def _command_key(args: argparse.Namespace) -> str:
    action = getattr(args, "action", None)
    return f"{args.command} {action}" if action else args.command


def _provenance(args: argparse.Namespace, key: str) -> dict[str, Any]:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in _NON_SEMANTIC}
    return {
        "tool": TOOL_NAME,
        "version": __version__,
        "command": key,
        "seed": getattr(args, "seed", None),
        "flags": flags,
    }


def _load_settings(args: argparse.Namespace) -> Settings:
    settings = settings_from_config(load_config(args.config))
    if args.no_capacity_guard:
        settings = replace(settings, capacity=settings.capacity.relaxed())
    return settings


def _write(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _error(message: str, kind: str, **extra: Any) -> None:
    sys.stdout.write(dumps({"error": message, "kind": kind, **extra}))


def main(argv: Optional[Sequence[str]] = None) -> int:
    key = ""
    try:
        args = build_parser().parse_args(argv)
        settings = _load_settings(args)
        configure_logging(args.log_level or settings.log_level or None)

        key = _command_key(args)
        handler = COMMAND_REGISTRY.get(key)
        if handler is None:
            logger.error("Unknown command: %s", key)
            _error(f"Unknown command: {key}", "input")
            return EXIT_INPUT

        logger.info("Dispatching command: %s", key)
        code, payload = handler(args, settings)
        if isinstance(payload, str):
            text = payload
        else:
            text = dumps({**payload, "provenance": _provenance(args, key)})
        _write(text, args.output)
        return code
    except CapacityError as e:
        logger.error("%s", e)
        _error(str(e), "capacity", guard=e.guard, value=e.value, limit=e.limit)
        return EXIT_CAPACITY
    except (InputError, OSError, ValueError, yaml.YAMLError) as e:
        logger.error("Input error: %s", e)
        _error(str(e), "input")
        return EXIT_INPUT
    except Exception:
        logger.exception("Command failed: %s", key)
        _error(f"Command failed: {key}", "internal")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
