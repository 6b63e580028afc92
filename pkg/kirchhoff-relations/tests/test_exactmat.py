"""Tests for exact matrices, elimination and the matrix text format."""

import itertools
import sys
from pathlib import Path
from textwrap import dedent

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent / "scripts"))

import exactmat as em
from conftest import F3, F5, F7, all_vectors, mat, matrices, permutations
from errors import KirrelError, ModulusMismatchError, ParseError, ShapeError
from exactmat import ExactMatrix, Permutation
from gfp import Prime

SUM_COPY_H = [[1, 1, -1, 0], [0, 0, 1, -1]]
SUM_COPY_G = [[1, 0, 1, 1], [0, 1, 1, 1]]


class TestExactMatrix:
    def test_entries_reduced_and_frozen(self, f5: Prime) -> None:
        """Entries are reduced on construction and the array is read-only."""
        m = mat([[-1, 7]], f5)
        assert m.tolist() == [[4, 2]]
        with pytest.raises(ValueError, match="read-only"):
            m.entries[0, 0] = 1

    def test_rejects_non_2d(self, f5: Prime) -> None:
        """Only 2-D arrays make matrices."""
        with pytest.raises(ShapeError):
            ExactMatrix(np.array([1, 2, 3]), f5)

    def test_equality_includes_modulus(self) -> None:
        """Equal entries over different fields are different matrices."""
        assert mat([[1, 2]], F5) != mat([[1, 2]], F7)
        assert mat([[1, 2]], F5) == mat([[6, -3]], F5)

    def test_arithmetic(self, f5: Prime) -> None:
        """Addition, subtraction, negation and scaling stay in the field."""
        a, b = mat([[1, 2], [3, 4]], f5), mat([[4, 4], [0, 1]], f5)
        assert (a + b).tolist() == [[0, 1], [3, 0]]
        assert (a - b).tolist() == [[2, 3], [3, 3]]
        assert (-a).tolist() == [[4, 3], [2, 1]]
        assert a.scale(2).tolist() == [[2, 4], [1, 3]]
        assert (a @ b).tolist() == [[4, 1], [2, 1]]

    def test_mixed_moduli(self) -> None:
        """Operations refuse matrices over different fields."""
        with pytest.raises(ModulusMismatchError):
            _ = mat([[1]], F5) @ mat([[1]], F7)

    def test_matmul_shape_mismatch(self, f5: Prime) -> None:
        """Inner dimensions must agree."""
        with pytest.raises(ShapeError):
            _ = em.zeros(2, 3, f5) @ em.zeros(2, 3, f5)

    def test_empty_shapes(self, f3: Prime) -> None:
        """Zero-row and zero-column matrices are first class."""
        a = em.zeros(0, 3, f3)
        assert em.rank(a) == 0
        assert em.kernel_basis(a) == em.identity(3, f3)
        assert (em.zeros(2, 0, f3) @ em.zeros(0, 4, f3)).is_zero()


class TestRref:
    def test_sum_copy(self, f5: Prime) -> None:
        """Known reduction with pivots in columns 0 and 2."""
        reduced, pivots = em.rref(mat(SUM_COPY_H, f5))
        assert reduced.tolist() == [[1, 1, 0, 4], [0, 0, 1, 4]]
        assert pivots == (0, 2)

    def test_identity_and_zero(self, f5: Prime) -> None:
        """Identity is already reduced; zero has rank 0."""
        eye = em.identity(3, f5)
        assert em.rref(eye) == (eye, (0, 1, 2))
        zero = em.zeros(2, 4, f5)
        assert em.rref(zero) == (zero, ())

    def test_keeps_shape(self, f3: Prime) -> None:
        """Zero rows sink to the bottom instead of being dropped."""
        reduced, pivots = em.rref(mat([[0, 0], [1, 2], [2, 1]], f3))
        assert reduced.tolist() == [[1, 2], [0, 0], [0, 0]]
        assert pivots == (0,)

    @given(st.data())
    def test_reduced_form_properties(self, data: st.DataObject) -> None:
        """Leading ones, cleared pivot columns, idempotence and preserved span."""
        rows, cols = data.draw(st.integers(0, 4)), data.draw(st.integers(0, 5))
        m = data.draw(matrices(F5, rows, cols))
        reduced, pivots = em.rref(m)
        assert list(pivots) == sorted(set(pivots))
        for i, c in enumerate(pivots):
            column = reduced.entries[:, c]
            assert column[i] == 1
            assert np.count_nonzero(column) == 1
        assert em.rref(reduced) == (reduced, pivots)
        assert em.row_space_equal(m, reduced)

    def test_canonical_exhaustive(self, f3: Prime) -> None:
        """Equal row spaces give equal RREFs for every 2x2 matrix over F_3."""
        spans: dict[frozenset[tuple[int, ...]], ExactMatrix] = {}
        for entries in itertools.product(range(3), repeat=4):
            m = ExactMatrix(np.array(entries).reshape(2, 2), f3)
            span = frozenset(tuple(int(x) for x in v) for v in all_vectors(2, f3) @ m.entries % 3)
            basis = em.row_basis(m)[0]
            assert spans.setdefault(span, basis) == basis


class TestKernelAndSolve:
    def test_sum_copy_kernel(self, f5: Prime) -> None:
        """The kernel of the sum-then-copy parity check is spanned by its generator."""
        kernel = em.kernel_basis(mat(SUM_COPY_H, f5))
        assert em.row_space_equal(kernel, mat(SUM_COPY_G, f5))
        assert (mat(SUM_COPY_H, f5) @ mat(SUM_COPY_G, f5).T).is_zero()
        assert em.rank(mat(SUM_COPY_G, f5)) == 2

    def test_trivial_and_full_kernels(self, f3: Prime) -> None:
        """Identity has no kernel; a zero row has all of F^n."""
        assert em.kernel_basis(em.identity(3, f3)).rows == 0
        assert em.rank(em.kernel_basis(em.zeros(1, 3, f3))) == 3

    @given(st.data())
    def test_rank_nullity(self, data: st.DataObject) -> None:
        """rank + nullity = cols and M·Kᵀ = 0."""
        rows, cols = data.draw(st.integers(0, 4)), data.draw(st.integers(0, 5))
        m = data.draw(matrices(F7, rows, cols))
        kernel = em.kernel_basis(m)
        assert em.rank(m) + kernel.rows == cols
        assert em.rank(kernel) == kernel.rows
        assert (m @ kernel.T).is_zero()

    def test_solve_identity(self, f5: Prime) -> None:
        """x = b with an empty kernel."""
        found = em.solve(em.identity(3, f5), [1, 2, 3])
        assert found is not None
        particular, kernel = found
        assert particular.tolist() == [1, 2, 3]
        assert kernel.rows == 0

    def test_solve_inconsistent(self, f3: Prime) -> None:
        """0 = 1 has no solution."""
        assert em.solve(em.zeros(1, 2, f3), [1]) is None

    def test_solve_underdetermined(self, f3: Prime) -> None:
        """x + y = 0 has particular solution 0 and kernel span{(1, 2)}."""
        found = em.solve(mat([[1, 1]], f3), [0])
        assert found is not None
        particular, kernel = found
        assert particular.tolist() == [0, 0]
        assert em.row_space_equal(kernel, mat([[1, 2]], f3))

    def test_solve_shape_mismatch(self, f3: Prime) -> None:
        """The right-hand side must match the row count."""
        with pytest.raises(ShapeError):
            em.solve(em.identity(2, f3), [1, 2, 0])

    @given(st.data())
    def test_solve_matches_enumeration(self, data: st.DataObject) -> None:
        """Solution sets agree with brute force over F_3."""
        rows, cols = data.draw(st.integers(1, 3)), data.draw(st.integers(1, 3))
        m = data.draw(matrices(F3, rows, cols))
        b = np.array(data.draw(st.lists(st.integers(0, 2), min_size=rows, max_size=rows)))
        brute = {
            tuple(int(x) for x in v)
            for v in all_vectors(cols, F3)
            if not ((m.entries @ v - b) % 3).any()
        }
        found = em.solve(m, b)
        if found is None:
            assert not brute
            return
        particular, kernel = found
        coeffs = all_vectors(kernel.rows, F3)
        solutions = {tuple(int(x) for x in v) for v in (coeffs @ kernel.entries + particular) % 3}
        assert solutions == brute

    def test_inverse(self, f7: Prime) -> None:
        """inverse(M) @ M = 1; singular matrices raise."""
        m = mat([[2, 1], [1, 1]], f7)
        assert em.inverse(m) @ m == em.identity(2, f7)
        with pytest.raises(ShapeError, match="singular"):
            em.inverse(mat([[1, 2], [2, 4]], f7))


class TestRowSpaceEqual:
    def test_row_swap_and_scaling(self, f5: Prime) -> None:
        """Row operations preserve the span."""
        a = mat([[1, 2, 3], [0, 1, 4]], f5)
        assert em.row_space_equal(a, mat([[0, 1, 4], [1, 2, 3]], f5))
        assert em.row_space_equal(a, a.scale(2))

    def test_different_spans(self, f3: Prime) -> None:
        """span{(1, 0)} differs from span{(0, 1)}."""
        assert not em.row_space_equal(mat([[1, 0]], f3), mat([[0, 1]], f3))


class TestPermutation:
    def test_rejects_non_bijection(self) -> None:
        """Images must be a permutation of 0..N-1."""
        with pytest.raises(KirrelError):
            Permutation((0, 0, 1))

    def test_identity_permute(self, f5: Prime) -> None:
        """The identity permutation leaves columns in place."""
        m = mat([[1, 2, 3]], f5)
        assert em.permute_cols(m, Permutation.identity(3)) == m

    def test_moves_column_to_image(self, f5: Prime) -> None:
        """Column t lands at images[t]."""
        sigma = Permutation((2, 0, 1))
        assert em.permute_cols(mat([[1, 2, 3]], f5), sigma).tolist() == [[2, 3, 1]]
        assert sigma.apply([1, 2, 3]).tolist() == [2, 3, 1]
        assert sigma.order() == (1, 2, 0)

    @given(permutations(5))
    def test_matrix_and_inverse(self, sigma: Permutation) -> None:
        """permute_cols is right multiplication; the inverse undoes it."""
        m = ExactMatrix(np.arange(10).reshape(2, 5), F7)
        assert em.permute_cols(m, sigma) == m @ sigma.as_matrix(F7)
        assert em.permute_cols(em.permute_cols(m, sigma), sigma.inverse()) == m
        assert sigma.then(sigma.inverse()).is_identity()
        assert Permutation.from_order(sigma.order()) == sigma

    def test_doubled(self) -> None:
        """doubled() acts the same way on both halves."""
        assert Permutation((1, 0)).doubled().images == (1, 0, 3, 2)


class TestLayout:
    def test_block_and_stacks(self, f5: Prime) -> None:
        """Blocks, stacks and block diagonals assemble as expected."""
        m = mat([[1, 2, 3], [4, 0, 1]], f5)
        assert em.block(m, [1], slice(0, 2)).tolist() == [[4, 0]]
        assert em.block(m, slice(None), [2, 0]).tolist() == [[3, 1], [1, 4]]
        assert em.hstack(m, m).cols == 6
        assert em.vstack(m, m).rows == 4
        assert em.block_diag(mat([[1]], f5), mat([[2, 3]], f5)).tolist() == [
            [1, 0, 0],
            [0, 2, 3],
        ]

    def test_stack_shape_mismatch(self, f5: Prime) -> None:
        """Stacking needs matching edges."""
        with pytest.raises(ShapeError):
            em.hstack(em.zeros(1, 2, f5), em.zeros(2, 2, f5))
        with pytest.raises(ShapeError):
            em.vstack(em.zeros(1, 2, f5), em.zeros(1, 3, f5))


class TestTextFormat:
    def test_format(self, f5: Prime) -> None:
        """Header line then one line per row."""
        assert em.format_matrix(mat([[1, 2], [3, 4]], f5)) == "p 5 2 2\n1 2\n3 4\n"
        assert em.format_matrix(em.zeros(3, 0, f5)) == "p 5 3 0\n"

    def test_parse_reduces_negative_entries(self) -> None:
        """Negative integers are accepted and reduced."""
        text = dedent(
            """\
            # comment
            p 7 2 3
            1 -1 0
            8 2 -7
            """
        )
        assert em.parse_matrix(text).tolist() == [[1, 6, 0], [1, 2, 0]]

    def test_parse_reduces_huge_entries(self) -> None:
        """Integers past 64 bits are reduced before storage."""
        assert em.parse_matrix("p 5 1 2\n99999999999999999999 1\n").tolist() == [[4, 1]]
        assert em.parse_matrix("p 5 1 1\n-99999999999999999999\n").tolist() == [[1]]

    def test_reduce_vector_accepts_huge_integers(self, f5: Prime) -> None:
        assert em.reduce_vector([10**30 + 2, -(10**30)], f5).tolist() == [2, 0]

    def test_round_trip(self, f7: Prime) -> None:
        """Printing and parsing give back the same matrix."""
        m = mat([[1, 2, 3], [4, 5, 6]], f7)
        assert em.parse_matrix(em.format_matrix(m)) == m

    def test_modulus_override(self) -> None:
        """An override re-reduces entries modulo the new prime."""
        assert em.parse_matrix("p 7 1 2\n5 6\n", modulus_override=3).tolist() == [[2, 0]]

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "q 5 1 1\n1\n",
            "p 5 2 2\n1 2\n",
            "p 5 1 2\n1 2 3\n",
            "p 5 1 1\nx\n",
            "p 4 1 1\n1\n",
            "p 5 1 1\n1\n2\n",
        ],
    )
    def test_malformed(self, text: str) -> None:
        """Malformed matrix text raises ParseError."""
        with pytest.raises(ParseError):
            em.parse_matrix(text)

    def test_json(self, f5: Prime) -> None:
        """JSON mirrors the text format field for field."""
        assert em.matrix_to_json(mat([[1, 2]], f5)) == {
            "modulus": 5,
            "rows": 1,
            "cols": 2,
            "entries": [[1, 2]],
        }
