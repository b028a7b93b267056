"""0-1 행렬 분석: division, grid minor, rank division, 순서 보존 축약, d-sequence 검증

행렬은 numpy int8 배열로 보관합니다. 축약 중 셀 상태는 0, 1, RED(2) 세 가지이며
밀도 계산에서 RED 는 1 로 취급합니다.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from dmcut.config import CapacityLimits, default_limits
from dmcut.errors import InputError

logger = logging.getLogger(__name__)

RED = 2
ROW = "row"
COL = "col"


# ---------------------------------------------------------------------------
# ZeroOneMatrix
# ---------------------------------------------------------------------------

class ZeroOneMatrix:
    """n × m 0-1 행렬 (읽기 전용).

    Raises:
        InputError: 2차원이 아니거나, n 또는 m 이 1 미만이거나, 0/1 이외 값이 있을 때
    """

    def __init__(self, rows: Union[Sequence[Sequence[int]], np.ndarray]) -> None:
        data = np.array(rows, dtype=np.int8)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise InputError(f"Matrix must be 2-D with n, m >= 1, got shape {data.shape}")
        if not np.isin(data, (0, 1)).all():
            raise InputError("Matrix entries must be 0 or 1")
        data.flags.writeable = False
        self.data = data

    @classmethod
    def from_text(cls, text: str) -> ZeroOneMatrix:
        """한 줄에 한 행, '0'/'1' 문자로 된 텍스트를 읽습니다."""
        lines = [line.strip() for line in text.splitlines() if line.strip()]
        if not lines:
            raise InputError("Empty matrix text")
        widths = {len(line) for line in lines}
        if len(widths) != 1 or any(ch not in "01" for line in lines for ch in line):
            raise InputError("Matrix text must be rectangular and consist of '0'/'1'")
        return cls([[int(ch) for ch in line] for line in lines])

    @classmethod
    def identity(cls, n: int) -> ZeroOneMatrix:
        return cls(np.eye(n, dtype=np.int8))

    @classmethod
    def ones(cls, n: int, m: int | None = None) -> ZeroOneMatrix:
        return cls(np.ones((n, m or n), dtype=np.int8))

    def to_text(self) -> str:
        return "\n".join("".join(str(int(x)) for x in row) for row in self.data) + "\n"

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.data.shape[0]), int(self.data.shape[1]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ZeroOneMatrix):
            return NotImplemented
        return self.data.shape == other.data.shape and bool((self.data == other.data).all())

    def __repr__(self) -> str:
        n, m = self.shape
        return f"ZeroOneMatrix({n}x{m}, ones={int(self.data.sum())})"


def _as_array(m: Union[ZeroOneMatrix, np.ndarray]) -> np.ndarray:
    return m.data if isinstance(m, ZeroOneMatrix) else np.asarray(m)


# ---------------------------------------------------------------------------
# Division
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Division:
    """행 경계 0 = i_0 < … < i_r = n, 열 경계 0 = j_0 < … < j_c = m."""

    row_bounds: tuple[int, ...]
    col_bounds: tuple[int, ...]

    def __post_init__(self) -> None:
        for bounds in (self.row_bounds, self.col_bounds):
            if len(bounds) < 2 or bounds[0] != 0:
                raise InputError(f"Division bounds must start at 0: {bounds}")
            if any(a >= b for a, b in zip(bounds, bounds[1:])):
                raise InputError(f"Division bounds must be strictly increasing: {bounds}")
        object.__setattr__(self, "row_bounds", tuple(int(x) for x in self.row_bounds))
        object.__setattr__(self, "col_bounds", tuple(int(x) for x in self.col_bounds))

    @property
    def size(self) -> tuple[int, int]:
        return (len(self.row_bounds) - 1, len(self.col_bounds) - 1)

    def fits(self, shape: tuple[int, int]) -> bool:
        return self.row_bounds[-1] == shape[0] and self.col_bounds[-1] == shape[1]

    def cells(self, m: Union[ZeroOneMatrix, np.ndarray]) -> Iterator[tuple[int, int, np.ndarray]]:
        data = _as_array(m)
        if not self.fits(data.shape):
            raise InputError(f"Division {self.size} does not fit matrix shape {data.shape}")
        for i, (r0, r1) in enumerate(zip(self.row_bounds, self.row_bounds[1:])):
            for j, (c0, c1) in enumerate(zip(self.col_bounds, self.col_bounds[1:])):
                yield i, j, data[r0:r1, c0:c1]

    def lift(
        self, row_groups: Sequence[Sequence[int]], col_groups: Sequence[Sequence[int]]
    ) -> Division:
        """축약된 행렬의 division 을 원래 행/열 번호로 옮깁니다.

        row_groups[i] 는 축약 행렬의 i 번째 행이 덮는 원래 행 (연속 구간) 입니다.
        """
        def lifted(bounds: tuple[int, ...], groups: Sequence[Sequence[int]]) -> tuple[int, ...]:
            starts = [min(group) for group in groups]
            end = max(groups[-1]) + 1
            return tuple(starts[b] for b in bounds[:-1]) + (end,)

        return Division(lifted(self.row_bounds, row_groups), lifted(self.col_bounds, col_groups))

    def to_dict(self) -> dict:
        return {"row_bounds": list(self.row_bounds), "col_bounds": list(self.col_bounds)}


def is_grid_minor(m: Union[ZeroOneMatrix, np.ndarray], division: Division) -> bool:
    """정사각 division 의 모든 셀에 1 이 있으면 True (RED 도 1 로 셉니다)."""
    r, c = division.size
    return r == c and all(cell.any() for _, _, cell in division.cells(m))


def _distinct_rows(cell: np.ndarray) -> int:
    return int(np.unique(cell, axis=0).shape[0])


def _distinct_cols(cell: np.ndarray) -> int:
    return int(np.unique(cell, axis=1).shape[1])


def is_rank_division(m: Union[ZeroOneMatrix, np.ndarray], division: Division, k: int) -> bool:
    """k-division 이고 모든 셀이 서로 다른 행 k 개와 서로 다른 열 k 개를 가지면 True."""
    if division.size != (k, k):
        return False
    return all(
        _distinct_rows(cell) >= k and _distinct_cols(cell) >= k
        for _, _, cell in division.cells(m)
    )


# ---------------------------------------------------------------------------
# Grid minor
# ---------------------------------------------------------------------------

def _check_k(shape: tuple[int, int], k: int) -> None:
    if not 1 <= k <= min(shape):
        raise InputError(f"k must satisfy 1 <= k <= min(n, m) = {min(shape)}, got {k}")


def _interval_divisions(n: int, k: int, min_height: int = 1) -> Iterator[tuple[int, ...]]:
    for cuts in combinations(range(1, n), k - 1):
        bounds = (0,) + cuts + (n,)
        if all(b - a >= min_height for a, b in zip(bounds, bounds[1:])):
            yield bounds


def _greedy_columns(grouped: np.ndarray, k: int) -> tuple[int, ...] | None:
    """행 그룹별 OR 행렬 grouped (k × m) 에서 가장 먼저 닫히는 열 블록 k 개를 찾습니다."""
    m = grouped.shape[1]
    bounds = [0]
    seen = np.zeros(grouped.shape[0], dtype=bool)
    for j in range(m):
        seen |= grouped[:, j].astype(bool)
        if len(bounds) < k and seen.all():
            bounds.append(j + 1)
            seen[:] = False
    if len(bounds) < k:
        return None
    last = bounds[-1]
    if last >= m or not grouped[:, last:].any(axis=1).all():
        return None
    return tuple(bounds) + (m,)


def find_grid_minor(
    m: Union[ZeroOneMatrix, np.ndarray], k: int, limits: CapacityLimits | None = None
) -> Division | None:
    """모든 셀에 1 이 있는 k-division 을 찾습니다 (정확). 없으면 None.

    행 division 은 전부 열거하고, 열 division 은 가장 먼저 닫히는 블록을 고르는 greedy 로
    완성합니다.

    Raises:
        InputError: k 가 1 ≤ k ≤ min(n, m) 을 벗어날 때
    """
    data = _as_array(m).astype(bool)
    n, cols = data.shape
    _check_k((n, cols), k)
    (limits or default_limits()).check("max_subsets", math.comb(n - 1, k - 1))
    for rows in _interval_divisions(n, k):
        grouped = np.logical_or.reduceat(data, list(rows[:-1]), axis=0)
        col_bounds = _greedy_columns(grouped, k)
        if col_bounds is not None:
            return Division(rows, col_bounds)
    return None


def exhaustive_grid_minor(m: Union[ZeroOneMatrix, np.ndarray], k: int) -> Division | None:
    """행/열 division 을 모두 열거하는 오라클."""
    data = _as_array(m)
    n, cols = data.shape
    _check_k((n, cols), k)
    for rows in _interval_divisions(n, k):
        for col_bounds in _interval_divisions(cols, k):
            division = Division(rows, col_bounds)
            if is_grid_minor(data, division):
                return division
    return None


# ---------------------------------------------------------------------------
# Rank division / grid rank
# ---------------------------------------------------------------------------

def _greedy_rank_columns(data: np.ndarray, rows: tuple[int, ...], k: int) -> tuple[int, ...] | None:
    """셀의 서로 다른 행/열 수는 열 블록을 넓혀도 줄지 않으므로 가장 먼저 닫히는 블록을 고릅니다."""
    m = data.shape[1]
    bands = [data[a:b] for a, b in zip(rows, rows[1:])]

    def closed(c0: int, c1: int) -> bool:
        return all(
            _distinct_rows(band[:, c0:c1]) >= k and _distinct_cols(band[:, c0:c1]) >= k
            for band in bands
        )

    bounds = [0]
    for j in range(1, m + 1):
        if len(bounds) == k:
            break
        if closed(bounds[-1], j):
            bounds.append(j)
    if len(bounds) < k or bounds[-1] >= m or not closed(bounds[-1], m):
        return None
    return tuple(bounds) + (m,)


def find_rank_division(
    m: Union[ZeroOneMatrix, np.ndarray], k: int, limits: CapacityLimits | None = None
) -> Division | None:
    """rank-k division 을 찾습니다. 없으면 None.

    Raises:
        CapacityError: 행렬 크기가 max_matrix_dim 을 넘을 때
    """
    data = _as_array(m)
    n, cols = data.shape
    _check_k((n, cols), k)
    limits = limits or default_limits()
    limits.check("max_matrix_dim", max(n, cols))
    if k == 1:
        return Division((0, n), (0, cols))
    for rows in _interval_divisions(n, k, min_height=k):
        col_bounds = _greedy_rank_columns(data, rows, k)
        if col_bounds is not None:
            return Division(rows, col_bounds)
    return None


def grid_rank(m: Union[ZeroOneMatrix, np.ndarray], limits: CapacityLimits | None = None) -> int:
    """rank-k division 이 존재하는 최대 k (k 에 대해 단조이므로 처음 실패하면 멈춥니다)."""
    data = _as_array(m)
    best = 1
    for k in range(2, min(data.shape) + 1):
        if find_rank_division(data, k, limits) is None:
            break
        best = k
    return best


# ---------------------------------------------------------------------------
# 순서 보존 축약
# ---------------------------------------------------------------------------

def light_consecutive_lines(
    m: Union[ZeroOneMatrix, np.ndarray], c: int, axis: int = 0
) -> int | None:
    """1(또는 RED)의 개수 합이 4c − 1 이하인 첫 번째 연속 줄 쌍의 0-기반 인덱스 i (줄 i, i+1).

    Raises:
        InputError: 해당 축의 줄이 2개 미만일 때
    """
    data = _as_array(m)
    counts = (data != 0).sum(axis=1 - axis)
    if len(counts) < 2:
        raise InputError("Need at least two lines to find a light pair")
    sums = counts[:-1] + counts[1:]
    hits = np.flatnonzero(sums <= 4 * c - 1)
    return int(hits[0]) if hits.size else None


@dataclass(frozen=True)
class ContractionStep:
    axis: str
    index: int


@dataclass(frozen=True)
class MatrixContraction:
    """연속한 줄 병합 순서. width 는 모든 중간 행렬에서 한 줄의 RED 개수 최댓값입니다."""

    steps: tuple[ContractionStep, ...]
    width: int

    def to_dict(self) -> dict:
        return {"steps": [[s.axis, s.index] for s in self.steps], "width": self.width}


def _merge(state: np.ndarray, axis: str, i: int) -> np.ndarray:
    if axis == COL:
        return _merge(state.T, ROW, i).T
    a, b = state[i], state[i + 1]
    merged = np.where((a == b) & (a != RED), a, RED).astype(np.int8)
    return np.vstack([state[:i], merged[None, :], state[i + 2:]])


def _red_width(state: np.ndarray) -> int:
    red = state == RED
    return int(max(red.sum(axis=1).max(), red.sum(axis=0).max()))


def gridminor_or_contraction(
    m: Union[ZeroOneMatrix, np.ndarray],
    k: int,
    c: int,
    limits: CapacityLimits | None = None,
) -> Union[Division, MatrixContraction]:
    """k-grid minor 또는 순서를 지키는 축약 순서를 반환합니다.

    grid minor 는 정확히 먼저 찾고, 없으면 긴 축에서 1/RED 합이 4c − 1 이하인 연속 쌍을
    병합합니다. 그런 쌍이 없으면 가장 가벼운 쌍을 병합하고 경고를 남깁니다.
    """
    data = _as_array(m).astype(np.int8)
    minor = find_grid_minor(data, k, limits)
    if minor is not None:
        return minor

    state = data.copy()
    steps: list[ContractionStep] = []
    width = _red_width(state)
    while state.shape != (1, 1):
        rows, cols = state.shape
        axis = ROW if (rows >= cols and rows > 1) or cols == 1 else COL
        axis_index = 0 if axis == ROW else 1
        index = light_consecutive_lines(state, c, axis_index)
        if index is None:
            counts = (state != 0).sum(axis=1 - axis_index)
            sums = counts[:-1] + counts[1:]
            index = int(np.argmin(sums))
            logger.warning(
                "No %s pair within 4c-1=%d; merging lightest pair %d (load %d)",
                axis, 4 * c - 1, index, int(sums[index]),
            )
        state = _merge(state, axis, index)
        steps.append(ContractionStep(axis, index))
        width = max(width, _red_width(state))
    return MatrixContraction(tuple(steps), width)


@dataclass(frozen=True)
class ContractionReport:
    valid: bool
    width: int
    max_merged_load: int


def verify_matrix_contraction(
    m: Union[ZeroOneMatrix, np.ndarray], contraction: MatrixContraction, c: int
) -> ContractionReport:
    """축약 순서를 다시 실행해 병합된 줄마다 1/RED 가 4c 개 이하인지 확인합니다.

    Raises:
        InputError: 범위를 벗어난 병합 단계가 있을 때
    """
    state = _as_array(m).astype(np.int8).copy()
    width = _red_width(state)
    load = 0
    for step in contraction.steps:
        if step.axis not in (ROW, COL):
            raise InputError(f"Unknown contraction axis: {step.axis}")
        lines = state.shape[0] if step.axis == ROW else state.shape[1]
        if not 0 <= step.index < lines - 1:
            raise InputError(f"Contraction index {step.index} out of range for {lines} lines")
        state = _merge(state, step.axis, step.index)
        merged = state[step.index] if step.axis == ROW else state[:, step.index]
        load = max(load, int((merged != 0).sum()))
        width = max(width, _red_width(state))
    valid = load <= 4 * c and width == contraction.width
    return ContractionReport(valid, width, load)


# ---------------------------------------------------------------------------
# 순열 인접 행렬
# ---------------------------------------------------------------------------

def adj_of_permutation(
    pi: Mapping[Hashable, Hashable], d1: Sequence[Hashable], d2: Sequence[Hashable]
) -> ZeroOneMatrix:
    """|d1| × |d2| 행렬, (x, y) 는 y = π(x) 일 때만 1.

    Raises:
        InputError: π 가 단사가 아니거나 정의역/공역이 도메인 밖일 때
    """
    rows = {x: i for i, x in enumerate(d1)}
    cols = {y: j for j, y in enumerate(d2)}
    if len(set(pi.values())) != len(pi):
        raise InputError("Permutation constraint is not a bijection")
    data = np.zeros((len(d1), len(d2)), dtype=np.int8)
    for x, y in pi.items():
        if x not in rows or y not in cols:
            raise InputError(f"Permutation pair ({x!r}, {y!r}) lies outside the domains")
        data[rows[x], cols[y]] = 1
    return ZeroOneMatrix(data)


# ---------------------------------------------------------------------------
# Trigraph / d-sequence
# ---------------------------------------------------------------------------

def _edge(u: str, v: str) -> frozenset[str]:
    return frozenset((u, v))


class Trigraph:
    """검은 간선과 빨간 간선 집합이 서로소인 그래프."""

    def __init__(
        self,
        vertices: Iterable[str],
        black: Iterable[tuple[str, str]] = (),
        red: Iterable[tuple[str, str]] = (),
    ) -> None:
        self.vertices = set(vertices)
        self.black = {_edge(u, v) for u, v in black}
        self.red = {_edge(u, v) for u, v in red}
        if self.black & self.red:
            raise InputError("Black and red edge sets must be disjoint")
        for e in self.black | self.red:
            if len(e) != 2 or not e <= self.vertices:
                raise InputError(f"Invalid trigraph edge: {sorted(e)}")

    def copy(self) -> Trigraph:
        g = Trigraph(())
        g.vertices, g.black, g.red = set(self.vertices), set(self.black), set(self.red)
        return g

    def red_degree(self) -> int:
        degree = {v: 0 for v in self.vertices}
        for e in self.red:
            for v in e:
                degree[v] += 1
        return max(degree.values(), default=0)

    def contract(self, u: str, v: str) -> None:
        """v 를 u 로 합칩니다. uz 는 uz, vz 가 모두 검은색일 때만 검은색으로 남습니다."""
        if u == v or u not in self.vertices or v not in self.vertices:
            raise InputError(f"Malformed contraction step ({u}, {v})")
        others = self.vertices - {u, v}
        black, red = set(), set()
        for z in others:
            uz, vz = _edge(u, z), _edge(v, z)
            if uz in self.black and vz in self.black:
                black.add(uz)
            elif {uz, vz} & (self.black | self.red):
                red.add(uz)
        keep = {e for e in self.black if not e & {u, v}}
        keep_red = {e for e in self.red if not e & {u, v}}
        self.vertices.discard(v)
        self.black = keep | black
        self.red = keep_red | red


def verify_d_sequence(g: Trigraph, steps: Sequence[tuple[str, str]]) -> int:
    """축약 순서를 적용해 모든 중간 trigraph 의 최대 빨간 차수를 반환합니다.

    Raises:
        InputError: 잘못된 단계가 있거나 마지막이 단일 정점이 아닐 때
    """
    current = g.copy()
    width = current.red_degree()
    for u, v in steps:
        current.contract(u, v)
        width = max(width, current.red_degree())
    if len(current.vertices) != 1:
        raise InputError(f"Sequence ends with {len(current.vertices)} vertices, expected 1")
    return width
