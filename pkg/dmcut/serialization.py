"""JSON / 텍스트 입출력

인스턴스, 해, 증강, CSP, PSI, clique 페이로드를 딕셔너리와 상호 변환합니다.
형식 오류는 모두 InputError 로 보고합니다. 스키마는 docs/schemas/ 에 있습니다.
"""
from __future__ import annotations

import json
import logging
from typing import Any, Callable, Iterable, Mapping

from dmcut.digraph import Digraph, VertexFlow
from dmcut.errors import InputError
from dmcut.flowaug import AugmentParams, Augmentation, RecurrenceTable
from dmcut.matrixgrid import (
    ContractionStep,
    Division,
    MatrixContraction,
    ZeroOneMatrix,
)
from dmcut.multicut import DmcInstance, WdmcInstance
from dmcut.permcsp import (
    Binding,
    DownclosedRelation,
    OrderedDomain,
    PermCspInstance,
    PermutationConstraint,
    Value,
)
from dmcut.reductions import CliqueInstance, PsiInstance

logger = logging.getLogger(__name__)


def dumps(payload: Mapping[str, Any]) -> str:
    """정렬된 키, 두 칸 들여쓰기, 마지막 줄바꿈."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_json(path: str) -> dict[str, Any]:
    """JSON 파일을 읽습니다.

    Raises:
        InputError: 파일이 없거나 JSON 이 아니거나 최상위가 객체가 아닐 때
    """
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise InputError(f"Input file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"Invalid JSON in {path}: {e}") from e
    if not isinstance(data, dict):
        raise InputError(f"JSON root must be an object: {path}")
    return data


def _field(data: Mapping[str, Any], key: str, kind: type | tuple = object) -> Any:
    if key not in data:
        raise InputError(f"Missing field '{key}'")
    value = data[key]
    if not isinstance(value, kind):
        raise InputError(f"Field '{key}' has the wrong type: {type(value).__name__}")
    return value


def _pairs(data: Mapping[str, Any], key: str) -> list[tuple[str, str]]:
    items = _field(data, key, list)
    result = []
    for item in items:
        if not isinstance(item, list) or len(item) != 2:
            raise InputError(f"Field '{key}' must contain [u, v] pairs")
        result.append((str(item[0]), str(item[1])))
    return result


def _decoded(data: Mapping[str, Any], decode: Callable[[Mapping[str, Any]], Any]) -> Any:
    try:
        return decode(data)
    except (TypeError, ValueError, KeyError) as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"Malformed payload: {e}") from e


# ---------------------------------------------------------------------------
# 그래프 / 인스턴스
# ---------------------------------------------------------------------------

def graph_to_dict(g: Digraph) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "vertices": list(g.vertices),
        "undeletable": sorted(v for v in g.vertices if not g.is_deletable(v)),
        "arcs": [list(a) for a in g.arcs],
    }
    undeletable_arcs = [list(a) for a in g.arcs if not g.arc_deletable(*a)]
    if undeletable_arcs:
        payload["undeletable_arcs"] = undeletable_arcs
    return payload


def graph_from_dict(data: Mapping[str, Any]) -> Digraph:
    def decode(d: Mapping[str, Any]) -> Digraph:
        vertices = [str(v) for v in _field(d, "vertices", list)]
        frozen = {str(v) for v in d.get("undeletable", [])}
        unknown = sorted(frozen - set(vertices))
        if unknown:
            raise InputError(f"Unknown undeletable vertices: {unknown}")
        frozen_arcs = set(_pairs(d, "undeletable_arcs")) if "undeletable_arcs" in d else set()
        arcs = {arc: arc not in frozen_arcs for arc in _pairs(d, "arcs")}
        return Digraph({v: v not in frozen for v in vertices}, arcs)

    return _decoded(data, decode)


def dmc_to_dict(inst: DmcInstance) -> dict[str, Any]:
    payload = graph_to_dict(inst.g)
    payload["undeletable"] = sorted(inst.undeletable)
    payload["terminal_pairs"] = [list(p) for p in inst.terminal_pairs]
    payload["k"] = inst.k
    return payload


def dmc_from_dict(data: Mapping[str, Any]) -> DmcInstance:
    """3-DMC 인스턴스 JSON. 단말은 undeletable 목록에 없어도 V∞ 에 추가됩니다."""

    def decode(d: Mapping[str, Any]) -> DmcInstance:
        g = graph_from_dict(d)
        k = _field(d, "k", int)
        return DmcInstance.from_graph(g, _pairs(d, "terminal_pairs"), k)

    return _decoded(data, decode)


def wdmc_to_dict(inst: WdmcInstance) -> dict[str, Any]:
    payload = graph_to_dict(inst.g)
    payload["terminal_pairs"] = [list(p) for p in inst.terminal_pairs]
    payload["weights"] = dict(sorted(inst.wt.items()))
    payload["k"] = inst.k
    payload["W"] = inst.W
    return payload


def wdmc_from_dict(data: Mapping[str, Any]) -> WdmcInstance:
    def decode(d: Mapping[str, Any]) -> WdmcInstance:
        g = graph_from_dict(d)
        weights = {str(v): int(w) for v, w in _field(d, "weights", dict).items()}
        return WdmcInstance(
            g, tuple(_pairs(d, "terminal_pairs")), weights, _field(d, "k", int), _field(d, "W", int)
        )

    return _decoded(data, decode)


def solution_from_dict(data: Mapping[str, Any]) -> frozenset[str]:
    return frozenset(str(v) for v in _field(data, "solution", list))


# ---------------------------------------------------------------------------
# 증강
# ---------------------------------------------------------------------------

def _params_to_dict(params: AugmentParams) -> dict[str, Any]:
    payload = {"k": params.k, "c_cap": params.c_cap, "q": params.q, "p": params.p}
    if params.q_table is not None:
        payload["q_depth"] = params.q_table.depth
    return payload


def _params_from_dict(params: Mapping[str, Any]) -> AugmentParams:
    p = int(params.get("p", 1))
    table = RecurrenceTable(p, int(params["q_depth"])) if "q_depth" in params else None
    q = int(params.get("q", table[-1] if table is not None else 2))
    if table is not None and q != table[-1]:
        raise InputError(f"q={q} does not match q_{table.depth}({p})={table[-1]}")
    return AugmentParams(
        k=int(params["k"]), c_cap=int(params.get("c_cap", 64)), q=q, p=p, q_table=table
    )


def augmentation_to_dict(
    source: str, sink: str, separator: Iterable[str], aug: Augmentation
) -> dict[str, Any]:
    return {
        "source": source,
        "sink": sink,
        "separator": sorted(separator),
        "added_arcs": [list(a) for a in aug.added_arcs],
        "flow_paths": [list(p) for p in aug.flow.paths],
        "partition": [list(b) for b in aug.partition],
        "params": _params_to_dict(aug.params),
    }


def augmentation_from_dict(
    data: Mapping[str, Any],
) -> tuple[str, str, frozenset[str], Augmentation]:
    """augmentation_to_dict 의 역변환. (source, sink, separator, Augmentation)."""

    def decode(d: Mapping[str, Any]) -> tuple[str, str, frozenset[str], Augmentation]:
        source, sink = str(_field(d, "source")), str(_field(d, "sink"))
        paths = tuple(tuple(str(v) for v in p) for p in _field(d, "flow_paths", list))
        params = _field(d, "params", dict)
        aug = Augmentation(
            added_arcs=tuple(_pairs(d, "added_arcs")),
            flow=VertexFlow(source, sink, paths, len(paths)),
            partition=tuple(tuple(str(v) for v in b) for b in _field(d, "partition", list)),
            params=_params_from_dict(params),
        )
        return source, sink, frozenset(str(v) for v in _field(d, "separator", list)), aug

    return _decoded(data, decode)


# ---------------------------------------------------------------------------
# CSP
# ---------------------------------------------------------------------------

def _value_in(value: Any) -> Value:
    if isinstance(value, list):
        return tuple(_value_in(v) for v in value)
    if isinstance(value, (str, int)):
        return value
    raise InputError(f"Unsupported domain value: {value!r}")


def _value_out(value: Value) -> Any:
    if isinstance(value, tuple):
        return [_value_out(v) for v in value]
    return value


def csp_to_dict(inst: PermCspInstance) -> dict[str, Any]:
    constraints = []
    for b in inst.constraints:
        entry: dict[str, Any] = {"left": b.left, "right": b.right, "kind": b.kind}
        if isinstance(b.relation, DownclosedRelation):
            entry["frontier"] = list(b.relation.frontier)
        else:
            entry["pairs"] = [[_value_out(a), _value_out(c)] for a, c in b.relation.mapping.items()]
        constraints.append(entry)
    return {
        "variables": {x: [_value_out(v) for v in inst.domains[x]] for x in inst.variables},
        "constraints": constraints,
    }


def csp_from_dict(data: Mapping[str, Any]) -> PermCspInstance:
    """CSP JSON. downclosed 제약은 frontier (오른쪽 인덱스, -1 = BOTTOM) 나 pairs 로 줍니다."""

    def decode(d: Mapping[str, Any]) -> PermCspInstance:
        domains = {
            str(x): OrderedDomain(_value_in(v) for v in values)
            for x, values in _field(d, "variables", dict).items()
        }
        bindings = []
        for entry in _field(d, "constraints", list):
            left, right = str(_field(entry, "left")), str(_field(entry, "right"))
            if left not in domains or right not in domains:
                raise InputError(f"Constraint references unknown variable: {left}, {right}")
            dl, dr = domains[left], domains[right]
            kind = _field(entry, "kind", str)
            pairs = [(_value_in(a), _value_in(b)) for a, b in entry.get("pairs", [])]
            if kind == "downclosed":
                if "frontier" in entry:
                    relation = DownclosedRelation(dl, dr, _field(entry, "frontier", list))
                else:
                    relation = DownclosedRelation.from_pairs(dl, dr, pairs)
            elif kind == "permutation":
                relation = PermutationConstraint(dl, dr, dict(pairs))
            else:
                raise InputError(f"Unknown constraint kind: {kind}")
            bindings.append(Binding(left, right, relation))
        return PermCspInstance(domains, bindings)

    return _decoded(data, decode)


def valuation_to_dict(valuation: Mapping[str, Value]) -> dict[str, Any]:
    return {x: _value_out(v) for x, v in sorted(valuation.items())}


# ---------------------------------------------------------------------------
# PSI / clique
# ---------------------------------------------------------------------------

def psi_to_dict(psi: PsiInstance) -> dict[str, Any]:
    return {
        "pattern_edges": [list(e) for e in psi.pattern_edges],
        "parts": {i: list(psi.parts[i]) for i in psi.pattern},
        "host_edges": sorted(sorted(e) for e in psi.host_edges),
    }


def psi_from_dict(data: Mapping[str, Any]) -> PsiInstance:
    def decode(d: Mapping[str, Any]) -> PsiInstance:
        parts = {str(i): list(vs) for i, vs in _field(d, "parts", dict).items()}
        return PsiInstance.from_parts(
            _pairs(d, "pattern_edges"), parts, _pairs(d, "host_edges")
        )

    return _decoded(data, decode)


def clique_to_dict(cl: CliqueInstance) -> dict[str, Any]:
    return {
        "parts": [list(p) for p in cl.parts],
        "edges": sorted(sorted(e) for e in cl.edges),
    }


def clique_from_dict(data: Mapping[str, Any]) -> CliqueInstance:
    def decode(d: Mapping[str, Any]) -> CliqueInstance:
        parts = [list(p) for p in _field(d, "parts", list)]
        return CliqueInstance.from_parts(parts, _pairs(d, "edges"))

    return _decoded(data, decode)


# ---------------------------------------------------------------------------
# 행렬 / division
# ---------------------------------------------------------------------------

def load_matrix(path: str) -> ZeroOneMatrix:
    """한 줄에 한 행인 0/1 텍스트 파일.

    Raises:
        InputError: 파일이 없거나 형식이 잘못되었을 때
    """
    try:
        with open(path, encoding="utf-8") as f:
            return ZeroOneMatrix.from_text(f.read())
    except FileNotFoundError:
        raise InputError(f"Matrix file not found: {path}") from None


def division_from_dict(data: Mapping[str, Any]) -> Division:
    def decode(d: Mapping[str, Any]) -> Division:
        rows = tuple(int(x) for x in _field(d, "row_bounds", list))
        cols = tuple(int(x) for x in _field(d, "col_bounds", list))
        return Division(rows, cols)

    return _decoded(data, decode)


def contraction_from_dict(data: Mapping[str, Any]) -> MatrixContraction:
    def decode(d: Mapping[str, Any]) -> MatrixContraction:
        steps = []
        for step in _field(d, "steps", list):
            if not isinstance(step, list) or len(step) != 2:
                raise InputError("Contraction steps must be [axis, index] pairs")
            steps.append(ContractionStep(str(step[0]), int(step[1])))
        return MatrixContraction(tuple(steps), _field(d, "width", int))

    return _decoded(data, decode)
