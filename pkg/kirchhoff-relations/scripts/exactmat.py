"""Dense exact matrices over F_p with elimination primitives.

Entries are ``int64`` numpy arrays reduced into ``[0, p)`` and frozen after
construction. Every routine returns a new matrix. Empty shapes (0 rows or 0
columns) are valid everywhere.

Text format::

    p <modulus> <rows> <cols>
    <row 0 entries, space separated>
    ...

Negative and arbitrarily large entries are accepted and reduced. A matrix
with zero columns has no row lines.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from errors import KirrelError, ModulusMismatchError, ParseError, ShapeError
from gfp import Prime, inv_int

type Index = slice | Sequence[int]


@dataclass(frozen=True, eq=False)
class ExactMatrix:
    """A matrix over F_p. ``entries`` is a read-only 2-D ``int64`` array."""

    entries: np.ndarray
    modulus: Prime

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.int64)
        if arr.ndim != 2:  # noqa: PLR2004
            msg = f"Matrix entries must be 2-D, got shape {arr.shape}"
            raise ShapeError(msg, details={"shape": arr.shape})
        arr %= self.modulus.p
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def rows(self) -> int:
        """Number of rows."""
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        """Number of columns."""
        return int(self.entries.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        """``(rows, cols)``."""
        return self.rows, self.cols

    @property
    def p(self) -> int:
        """The modulus as a plain integer."""
        return self.modulus.p

    @property
    def T(self) -> ExactMatrix:  # noqa: N802
        """Transpose."""
        return transpose(self)

    def is_zero(self) -> bool:
        """True when every entry is zero (vacuously for empty shapes)."""
        return not self.entries.any()

    def tolist(self) -> list[list[int]]:
        """Entries as nested Python ints, for printing and JSON."""
        return [[int(x) for x in row] for row in self.entries]

    def row(self, i: int) -> np.ndarray:
        """A writable copy of row ``i``."""
        return self.entries[i].copy()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (
            self.modulus == other.modulus
            and self.shape == other.shape
            and bool(np.array_equal(self.entries, other.entries))
        )

    def __hash__(self) -> int:
        return hash((self.modulus.p, self.shape, self.entries.tobytes()))

    def __repr__(self) -> str:
        return f"ExactMatrix(p={self.p}, {self.tolist()})"

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        return matmul(self, other)

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        _check_same(self, other)
        return ExactMatrix(self.entries + other.entries, self.modulus)

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        _check_same(self, other)
        return ExactMatrix(self.entries - other.entries, self.modulus)

    def __neg__(self) -> ExactMatrix:
        return ExactMatrix(-self.entries, self.modulus)

    def scale(self, factor: int) -> ExactMatrix:
        """Multiply every entry by ``factor`` (reduced first)."""
        return ExactMatrix(self.entries * (int(factor) % self.p), self.modulus)


@dataclass(frozen=True)
class Permutation:
    """A bijection on ``{0..N-1}``; column ``t`` moves to position ``images[t]``."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            msg = f"Not a permutation: {images}"
            raise KirrelError(msg, details={"images": images})
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        """The permutation that leaves all ``n`` points in place."""
        return cls(tuple(range(n)))

    @classmethod
    def from_order(cls, order: Sequence[int]) -> Permutation:
        """Permutation that lists the columns ``order`` first-to-last."""
        images = [0] * len(order)
        for position, column in enumerate(order):
            images[column] = position
        return cls(tuple(images))

    def __len__(self) -> int:
        return len(self.images)

    def inverse(self) -> Permutation:
        """Undo ``self``: ``self.then(self.inverse())`` is the identity."""
        return Permutation.from_order(self.images)

    def then(self, other: Permutation) -> Permutation:
        """Apply ``self`` first, then ``other``."""
        if len(other) != len(self):
            msg = "Permutations act on different sizes"
            raise ShapeError(msg, details={"left": len(self), "right": len(other)})
        return Permutation(tuple(other.images[i] for i in self.images))

    def order(self) -> tuple[int, ...]:
        """Original column found at each target position."""
        return self.inverse().images

    def is_identity(self) -> bool:
        """True when no point moves."""
        return self.images == tuple(range(len(self.images)))

    def apply(self, vector: Sequence[int] | np.ndarray) -> np.ndarray:
        """Move entry ``t`` of ``vector`` to position ``images[t]``."""
        values = np.asarray(vector, dtype=np.int64)
        out = np.zeros_like(values)
        out[list(self.images)] = values
        return out

    def as_matrix(self, modulus: Prime) -> ExactMatrix:
        """Matrix P with ``permute_cols(M, self) == M @ P``."""
        n = len(self.images)
        entries = np.zeros((n, n), dtype=np.int64)
        entries[np.arange(n), list(self.images)] = 1
        return ExactMatrix(entries, modulus)

    def doubled(self) -> Permutation:
        """The same permutation applied to both halves of a 2N-vector."""
        n = len(self.images)
        return Permutation(self.images + tuple(n + i for i in self.images))


def _check_same(a: ExactMatrix, b: ExactMatrix) -> None:
    if a.modulus != b.modulus:
        msg = f"Matrices over F_{a.p} and F_{b.p} cannot be combined"
        raise ModulusMismatchError(msg, details={"left": a.p, "right": b.p})
    if a.shape != b.shape:
        msg = f"Shape mismatch: {a.shape} vs {b.shape}"
        raise ShapeError(msg, details={"left": a.shape, "right": b.shape})


def _check_modulus(*matrices: ExactMatrix) -> Prime:
    moduli = {m.modulus for m in matrices}
    if len(moduli) > 1:
        msg = f"Mixed moduli: {sorted(m.p for m in moduli)}"
        raise ModulusMismatchError(msg, details={"moduli": sorted(m.p for m in moduli)})
    return matrices[0].modulus


def from_rows(
    rows: Iterable[Iterable[int]], modulus: Prime, cols: int | None = None
) -> ExactMatrix:
    """Build a matrix from nested integer rows.

    ``cols`` is required only when ``rows`` is empty.
    """
    materialized = [[int(x) % modulus.p for x in row] for row in rows]
    if not materialized:
        return zeros(0, cols or 0, modulus)
    width = len(materialized[0])
    if any(len(r) != width for r in materialized):
        msg = "Ragged rows"
        raise ShapeError(msg, details={"widths": [len(r) for r in materialized]})
    if cols is not None and cols != width:
        msg = f"Expected {cols} columns, got {width}"
        raise ShapeError(msg, details={"expected": cols, "actual": width})
    if width == 0:
        return zeros(len(materialized), 0, modulus)
    return ExactMatrix(np.array(materialized, dtype=np.int64), modulus)


def zeros(rows: int, cols: int, modulus: Prime) -> ExactMatrix:
    """All-zero matrix of the given shape."""
    return ExactMatrix(np.zeros((rows, cols), dtype=np.int64), modulus)


def identity(n: int, modulus: Prime) -> ExactMatrix:
    """The ``n x n`` identity."""
    return ExactMatrix(np.eye(n, dtype=np.int64), modulus)


def row_vector(values: Sequence[int] | np.ndarray, modulus: Prime) -> ExactMatrix:
    """A ``1 x n`` matrix holding ``values``."""
    return ExactMatrix(np.asarray(values, dtype=np.int64).reshape(1, -1), modulus)


def reduce_vector(values: Sequence[int] | np.ndarray, modulus: Prime) -> np.ndarray:
    """Copy ``values`` into a fresh int64 vector reduced into ``[0, p)``.

    Python integers are reduced before conversion, so arbitrarily large ones
    are fine.
    """
    if isinstance(values, np.ndarray):
        return values.astype(np.int64).reshape(-1) % modulus.p
    return np.array([int(v) % modulus.p for v in values], dtype=np.int64)


def transpose(matrix: ExactMatrix) -> ExactMatrix:
    """Swap rows and columns."""
    return ExactMatrix(matrix.entries.T, matrix.modulus)


def matmul(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Exact product; entries stay below 2**63 because p < 2**24."""
    modulus = _check_modulus(a, b)
    if a.cols != b.rows:
        msg = f"Cannot multiply {a.shape} by {b.shape}"
        raise ShapeError(msg, details={"left": a.shape, "right": b.shape})
    return ExactMatrix(a.entries @ b.entries % modulus.p, modulus)


def mat_vec(matrix: ExactMatrix, vector: Sequence[int] | np.ndarray) -> np.ndarray:
    """Product ``M v`` as a plain vector.

    Raises:
        ShapeError: If the vector length differs from the column count.

    """
    values = np.asarray(vector, dtype=np.int64).reshape(-1)
    if values.shape[0] != matrix.cols:
        msg = f"Vector of length {values.shape[0]} vs {matrix.cols} columns"
        raise ShapeError(msg, details={"length": values.shape[0], "cols": matrix.cols})
    return matrix.entries @ (values % matrix.p) % matrix.p


def permute_cols(matrix: ExactMatrix, sigma: Permutation) -> ExactMatrix:
    """Move column ``t`` to position ``sigma.images[t]``.

    Raises:
        ShapeError: If ``sigma`` acts on a different number of points.

    """
    if len(sigma) != matrix.cols:
        msg = f"Permutation on {len(sigma)} points vs {matrix.cols} columns"
        raise ShapeError(msg, details={"sigma": len(sigma), "cols": matrix.cols})
    out = np.zeros_like(matrix.entries)
    out[:, list(sigma.images)] = matrix.entries
    return ExactMatrix(out, matrix.modulus)


def _as_index(index: Index, size: int) -> np.ndarray:
    if isinstance(index, slice):
        return np.arange(size)[index]
    return np.asarray(list(index), dtype=np.intp)


def block(matrix: ExactMatrix, rows: Index, cols: Index) -> ExactMatrix:
    """Sub-matrix on the given row and column ranges (slices or index lists)."""
    r = _as_index(rows, matrix.rows)
    c = _as_index(cols, matrix.cols)
    return ExactMatrix(matrix.entries[np.ix_(r, c)], matrix.modulus)


def hstack(*matrices: ExactMatrix) -> ExactMatrix:
    """Place matrices side by side; row counts must agree."""
    modulus = _check_modulus(*matrices)
    if len({m.rows for m in matrices}) > 1:
        msg = "hstack needs equal row counts"
        raise ShapeError(msg, details={"rows": [m.rows for m in matrices]})
    return ExactMatrix(np.hstack([m.entries for m in matrices]), modulus)


def vstack(*matrices: ExactMatrix) -> ExactMatrix:
    """Stack matrices top to bottom; column counts must agree."""
    modulus = _check_modulus(*matrices)
    if len({m.cols for m in matrices}) > 1:
        msg = "vstack needs equal column counts"
        raise ShapeError(msg, details={"cols": [m.cols for m in matrices]})
    return ExactMatrix(np.vstack([m.entries for m in matrices]), modulus)


def block_diag(*matrices: ExactMatrix) -> ExactMatrix:
    """Block-diagonal matrix with zeros off the blocks."""
    modulus = _check_modulus(*matrices)
    out = np.zeros(
        (sum(m.rows for m in matrices), sum(m.cols for m in matrices)), dtype=np.int64
    )
    r = c = 0
    for m in matrices:
        out[r : r + m.rows, c : c + m.cols] = m.entries
        r += m.rows
        c += m.cols
    return ExactMatrix(out, modulus)


def rref(matrix: ExactMatrix) -> tuple[ExactMatrix, tuple[int, ...]]:
    """Reduced row echelon form and its pivot columns.

    Pivots are the first nonzero entry found scanning columns left to right,
    rows top-down. The result keeps the input shape; zero rows sink to the
    bottom.
    """
    p = matrix.p
    work = matrix.entries.copy()
    n_rows, n_cols = work.shape
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        candidates = np.flatnonzero(work[r:, c])
        if candidates.size == 0:
            continue
        pivot = r + int(candidates[0])
        if pivot != r:
            work[[r, pivot]] = work[[pivot, r]]
        work[r] = work[r] * inv_int(int(work[r, c]), p) % p
        factors = work[:, c].copy()
        factors[r] = 0
        work = (work - np.outer(factors, work[r])) % p
        pivots.append(c)
        r += 1
    return ExactMatrix(work, matrix.modulus), tuple(pivots)


def row_basis(matrix: ExactMatrix) -> tuple[ExactMatrix, tuple[int, ...]]:
    """RREF with the zero rows dropped: the canonical basis of the row space."""
    reduced, pivots = rref(matrix)
    return block(reduced, slice(0, len(pivots)), slice(None)), pivots


def rank(matrix: ExactMatrix) -> int:
    """Number of pivots in the RREF."""
    return len(rref(matrix)[1])


def kernel_basis(matrix: ExactMatrix) -> ExactMatrix:
    """Rows spanning ``{v | M v = 0}``, one per free column."""
    p = matrix.p
    reduced, pivots = rref(matrix)
    pivot_set = set(pivots)
    free = [c for c in range(matrix.cols) if c not in pivot_set]
    basis = np.zeros((len(free), matrix.cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, c in enumerate(pivots):
            basis[k, c] = -reduced.entries[i, f] % p
    return ExactMatrix(basis, matrix.modulus)


def solve(
    matrix: ExactMatrix, rhs: Sequence[int] | np.ndarray
) -> tuple[np.ndarray, ExactMatrix] | None:
    """Solve ``M x = b``.

    Returns:
        ``(particular, kernel)`` with the solution set equal to
        ``particular + rowspan(kernel)``, or ``None`` when inconsistent.

    Raises:
        ShapeError: If ``len(b)`` differs from the row count.

    """
    b = np.asarray(rhs, dtype=np.int64).reshape(-1)
    if b.shape[0] != matrix.rows:
        msg = f"Right-hand side has {b.shape[0]} entries, matrix has {matrix.rows} rows"
        raise ShapeError(msg, details={"rhs": b.shape[0], "rows": matrix.rows})
    augmented = hstack(matrix, ExactMatrix(b.reshape(-1, 1), matrix.modulus))
    reduced, pivots = rref(augmented)
    if matrix.cols in pivots:
        return None
    particular = np.zeros(matrix.cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        particular[c] = reduced.entries[i, -1]
    return particular, kernel_basis(matrix)


def inverse(matrix: ExactMatrix) -> ExactMatrix:
    """Inverse of a square matrix.

    Raises:
        ShapeError: If the matrix is not square or is singular.

    """
    n = matrix.rows
    if matrix.cols != n:
        msg = f"Only square matrices are invertible, got {matrix.shape}"
        raise ShapeError(msg, details={"shape": matrix.shape})
    reduced, pivots = rref(hstack(matrix, identity(n, matrix.modulus)))
    left_pivots = tuple(c for c in pivots if c < n)
    if left_pivots != tuple(range(n)):
        msg = "Matrix is singular"
        raise ShapeError(msg, details={"rank": len(left_pivots)})
    return block(reduced, slice(None), slice(n, 2 * n))


def row_space_equal(a: ExactMatrix, b: ExactMatrix) -> bool:
    """Compare row spans through their canonical bases.

    Raises:
        ShapeError: If the matrices have different column counts.
        ModulusMismatchError: If they live over different fields.

    """
    if a.cols != b.cols:
        msg = f"Row spaces live in F^{a.cols} and F^{b.cols}"
        raise ShapeError(msg, details={"left": a.cols, "right": b.cols})
    _check_modulus(a, b)
    return row_basis(a)[0] == row_basis(b)[0]


def format_matrix(matrix: ExactMatrix) -> str:
    """Render in the text format, trailing newline included."""
    lines = [f"p {matrix.p} {matrix.rows} {matrix.cols}"]
    if matrix.cols:
        lines.extend(" ".join(str(int(x)) for x in row) for row in matrix.entries)
    return "\n".join(lines) + "\n"


def matrix_to_json(matrix: ExactMatrix) -> dict[str, Any]:
    """JSON object with the same fields as the text header plus ``entries``."""
    return {
        "modulus": matrix.p,
        "rows": matrix.rows,
        "cols": matrix.cols,
        "entries": matrix.tolist(),
    }


def _ints(tokens: Sequence[str], line: str) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        msg = f"Expected integers, got: {line!r}"
        raise ParseError(msg, details={"line": line}) from exc


def parse_matrix_lines(
    lines: list[str], modulus_override: int | None = None
) -> tuple[ExactMatrix, list[str]]:
    """Consume one matrix block from ``lines`` and return it with the remainder."""
    body = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not body:
        msg = "Missing matrix header"
        raise ParseError(msg)
    header = body[0].split()
    if len(header) != 4 or header[0] != "p":  # noqa: PLR2004
        msg = f"Bad matrix header: {body[0]!r} (expected 'p <modulus> <rows> <cols>')"
        raise ParseError(msg, details={"line": body[0]})
    p, n_rows, n_cols = _ints(header[1:], body[0])
    try:
        modulus = Prime(modulus_override if modulus_override is not None else p)
    except KirrelError as exc:
        raise ParseError(str(exc), details=exc.details) from exc
    if n_rows < 0 or n_cols < 0:
        msg = f"Negative matrix shape in {body[0]!r}"
        raise ParseError(msg, details={"line": body[0]})
    if n_cols == 0:
        return zeros(n_rows, 0, modulus), body[1:]
    rows = body[1 : 1 + n_rows]
    if len(rows) != n_rows:
        msg = f"Expected {n_rows} rows, found {len(rows)}"
        raise ParseError(msg, details={"expected": n_rows, "found": len(rows)})
    values = []
    for line in rows:
        row = _ints(line.split(), line)
        if len(row) != n_cols:
            msg = f"Expected {n_cols} entries, got {len(row)}: {line!r}"
            raise ParseError(msg, details={"line": line})
        values.append(row)
    return from_rows(values, modulus, cols=n_cols), body[1 + n_rows :]


def parse_matrix(text: str, modulus_override: int | None = None) -> ExactMatrix:
    """Parse exactly one matrix block.

    Args:
        text: Matrix text; blank lines and ``#`` comments are skipped.
        modulus_override: Prime to use instead of the one in the header.

    Returns:
        The matrix with entries reduced modulo the chosen prime.

    Raises:
        ParseError: On a malformed block or trailing content.

    """
    matrix, rest = parse_matrix_lines(text.splitlines(), modulus_override)
    if rest:
        msg = f"Trailing content after matrix: {rest[0]!r}"
        raise ParseError(msg, details={"line": rest[0]})
    return matrix
