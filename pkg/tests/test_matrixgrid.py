"""0-1 행렬 / division / grid minor / rank division / 축약 테스트"""

from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tests.strategies import matrices


def _transpose_permutation(n):
    """n² 원소에서 (i, j) ↦ (j, i). 자연스러운 n-division 의 모든 셀에 1 이 하나씩 있습니다."""
    from dmcut.matrixgrid import adj_of_permutation

    domain = list(range(n * n))
    pi = {i * n + j: j * n + i for i in range(n) for j in range(n)}
    return adj_of_permutation(pi, domain, domain)


def _divisions(length, k):
    for cuts in combinations(range(1, length), k - 1):
        yield (0,) + cuts + (length,)


# ---------------------------------------------------------------------------
# ZeroOneMatrix / Division
# ---------------------------------------------------------------------------

class TestZeroOneMatrix:
    def test_from_text(self):
        from dmcut.matrixgrid import ZeroOneMatrix

        m = ZeroOneMatrix.from_text("010\n110\n")
        assert m.shape == (2, 3)
        assert m.to_text() == "010\n110\n"
        assert m == ZeroOneMatrix([[0, 1, 0], [1, 1, 0]])

    @pytest.mark.parametrize("text", ["", "01\n1\n", "012\n"])
    def test_bad_text(self, text):
        from dmcut.errors import InputError
        from dmcut.matrixgrid import ZeroOneMatrix

        with pytest.raises(InputError):
            ZeroOneMatrix.from_text(text)

    def test_bad_entries(self):
        from dmcut.errors import InputError
        from dmcut.matrixgrid import ZeroOneMatrix

        with pytest.raises(InputError):
            ZeroOneMatrix([[0, 2]])
        with pytest.raises(InputError):
            ZeroOneMatrix([[]])

    def test_read_only(self):
        from dmcut.matrixgrid import ZeroOneMatrix

        m = ZeroOneMatrix.identity(2)
        with pytest.raises(ValueError):
            m.data[0, 1] = 1


class TestDivision:
    @pytest.mark.parametrize("rows", [(1, 2), (0,), (0, 2, 2)])
    def test_invalid_bounds(self, rows):
        from dmcut.errors import InputError
        from dmcut.matrixgrid import Division

        with pytest.raises(InputError):
            Division(rows, (0, 1))

    def test_size_and_dict(self):
        from dmcut.matrixgrid import Division

        d = Division((0, 1, 3), (0, 2))
        assert d.size == (2, 1)
        assert d.to_dict() == {"row_bounds": [0, 1, 3], "col_bounds": [0, 2]}

    def test_cells_must_fit(self):
        from dmcut.errors import InputError
        from dmcut.matrixgrid import Division, ZeroOneMatrix

        with pytest.raises(InputError):
            list(Division((0, 2), (0, 2)).cells(ZeroOneMatrix.ones(3)))

    def test_lift(self):
        from dmcut.matrixgrid import Division

        lifted = Division((0, 1, 3), (0, 1)).lift([[0, 1], [2], [3, 4]], [[0, 1, 2]])
        assert lifted == Division((0, 2, 5), (0, 3))


# ---------------------------------------------------------------------------
# Grid minor
# ---------------------------------------------------------------------------

class TestGridMinor:
    def test_ones_has_full_grid(self):
        from dmcut.matrixgrid import Division, ZeroOneMatrix, find_grid_minor, is_grid_minor

        m = ZeroOneMatrix.ones(3)
        d = find_grid_minor(m, 3)
        assert d == Division((0, 1, 2, 3), (0, 1, 2, 3))
        assert is_grid_minor(m, d)

    def test_identity_has_no_2_grid(self):
        from dmcut.matrixgrid import ZeroOneMatrix, find_grid_minor

        assert find_grid_minor(ZeroOneMatrix.identity(8), 2) is None

    @pytest.mark.parametrize("n", [2, 3])
    def test_transpose_permutation(self, n):
        from dmcut.matrixgrid import find_grid_minor, is_grid_minor

        m = _transpose_permutation(n)
        d = find_grid_minor(m, n)
        assert d is not None
        assert is_grid_minor(m, d)

    def test_k_out_of_range(self):
        from dmcut.errors import InputError
        from dmcut.matrixgrid import ZeroOneMatrix, find_grid_minor

        with pytest.raises(InputError):
            find_grid_minor(ZeroOneMatrix.ones(2, 3), 3)

    @given(matrices(), st.data())
    @settings(max_examples=200)
    def test_matches_exhaustive(self, m, data):
        from dmcut.matrixgrid import exhaustive_grid_minor, find_grid_minor, is_grid_minor

        k = data.draw(st.integers(min_value=1, max_value=min(m.shape)))
        found = find_grid_minor(m, k)
        assert (found is None) == (exhaustive_grid_minor(m, k) is None)
        if found is not None:
            assert found.size == (k, k)
            assert is_grid_minor(m, found)


# ---------------------------------------------------------------------------
# Rank division / grid rank
# ---------------------------------------------------------------------------

class TestRankDivision:
    def test_trivial_k1(self):
        from dmcut.matrixgrid import Division, ZeroOneMatrix, find_rank_division

        assert find_rank_division(ZeroOneMatrix.ones(2, 3), 1) == Division((0, 2), (0, 3))

    def test_grid_rank_of_simple_matrices(self):
        from dmcut.matrixgrid import ZeroOneMatrix, grid_rank

        assert grid_rank(ZeroOneMatrix.ones(5)) == 1
        assert grid_rank(ZeroOneMatrix.identity(6)) == 1

    def test_transpose_permutation_rank(self):
        from dmcut.matrixgrid import find_rank_division, is_rank_division

        m = _transpose_permutation(2)
        d = find_rank_division(m, 2)
        assert d is not None
        assert is_rank_division(m, d, 2)

    def test_capacity_guard(self):
        from dmcut.config import CapacityLimits
        from dmcut.errors import CapacityError
        from dmcut.matrixgrid import ZeroOneMatrix, find_rank_division

        with pytest.raises(CapacityError):
            find_rank_division(ZeroOneMatrix.ones(5), 2, CapacityLimits(max_matrix_dim=4))

    @given(matrices(max_rows=5, max_cols=5, min_rows=2, min_cols=2))
    @settings(max_examples=150)
    def test_rank_2_matches_exhaustive(self, m):
        from dmcut.matrixgrid import Division, find_rank_division, is_rank_division

        n, cols = m.shape
        exists = any(
            is_rank_division(m, Division(rows, col_bounds), 2)
            for rows in _divisions(n, 2)
            for col_bounds in _divisions(cols, 2)
        )
        found = find_rank_division(m, 2)
        assert (found is not None) == exists
        if found is not None:
            assert is_rank_division(m, found, 2)


# ---------------------------------------------------------------------------
# 축약
# ---------------------------------------------------------------------------

class TestContraction:
    def test_light_consecutive_lines(self):
        from dmcut.matrixgrid import ZeroOneMatrix, light_consecutive_lines

        m = ZeroOneMatrix([[1, 1, 1], [1, 1, 0], [0, 0, 0]])
        assert light_consecutive_lines(m, 1) == 1
        assert light_consecutive_lines(m, 2) == 0
        assert light_consecutive_lines(m, 1, axis=1) == 1

    def test_light_needs_two_lines(self):
        from dmcut.errors import InputError
        from dmcut.matrixgrid import ZeroOneMatrix, light_consecutive_lines

        with pytest.raises(InputError):
            light_consecutive_lines(ZeroOneMatrix([[1, 0]]), 1)

    def test_identity_contracts(self):
        from dmcut.matrixgrid import (
            MatrixContraction,
            ZeroOneMatrix,
            gridminor_or_contraction,
            verify_matrix_contraction,
        )

        m = ZeroOneMatrix.identity(8)
        result = gridminor_or_contraction(m, 2, 4)
        assert isinstance(result, MatrixContraction)
        assert len(result.steps) == 14
        report = verify_matrix_contraction(m, result, 4)
        assert report.valid
        assert report.width == result.width

    def test_grid_minor_wins(self):
        from dmcut.matrixgrid import Division, ZeroOneMatrix, gridminor_or_contraction

        assert isinstance(gridminor_or_contraction(ZeroOneMatrix.ones(4), 2, 1), Division)

    def test_verify_rejects_bad_step(self):
        from dmcut.errors import InputError
        from dmcut.matrixgrid import (
            ContractionStep,
            MatrixContraction,
            ZeroOneMatrix,
            verify_matrix_contraction,
        )

        bad = MatrixContraction((ContractionStep("row", 3),), 0)
        with pytest.raises(InputError):
            verify_matrix_contraction(ZeroOneMatrix.identity(3), bad, 1)
        sideways = MatrixContraction((ContractionStep("diag", 0),), 0)
        with pytest.raises(InputError):
            verify_matrix_contraction(ZeroOneMatrix.identity(3), sideways, 1)

    def test_verify_reports_wrong_width(self):
        from dataclasses import replace

        from dmcut.matrixgrid import (
            ZeroOneMatrix,
            gridminor_or_contraction,
            verify_matrix_contraction,
        )

        m = ZeroOneMatrix.identity(4)
        result = gridminor_or_contraction(m, 2, 4)
        assert not verify_matrix_contraction(m, replace(result, width=result.width + 1), 4).valid

    @given(matrices(), st.integers(min_value=1, max_value=3), st.data())
    @settings(max_examples=100)
    def test_result_verifies(self, m, c, data):
        from dmcut.matrixgrid import (
            Division,
            gridminor_or_contraction,
            is_grid_minor,
            verify_matrix_contraction,
        )

        k = data.draw(st.integers(min_value=1, max_value=min(m.shape)))
        result = gridminor_or_contraction(m, k, c)
        if isinstance(result, Division):
            assert is_grid_minor(m, result)
            return
        assert len(result.steps) == sum(m.shape) - 2
        assert verify_matrix_contraction(m, result, c).width == result.width


# ---------------------------------------------------------------------------
# Trigraph / d-sequence
# ---------------------------------------------------------------------------

class TestDSequence:
    def test_path_contracts_with_width_one(self):
        from dmcut.matrixgrid import Trigraph, verify_d_sequence

        g = Trigraph("abc", black=[("a", "b"), ("b", "c")])
        assert verify_d_sequence(g, [("a", "b"), ("a", "c")]) == 1

    def test_sequence_must_end_in_single_vertex(self):
        from dmcut.errors import InputError
        from dmcut.matrixgrid import Trigraph, verify_d_sequence

        with pytest.raises(InputError):
            verify_d_sequence(Trigraph("abc"), [("a", "b")])

    def test_overlapping_colours(self):
        from dmcut.errors import InputError
        from dmcut.matrixgrid import Trigraph

        with pytest.raises(InputError):
            Trigraph("ab", black=[("a", "b")], red=[("b", "a")])
