"""Linear and affine relations over F_p.

A relation ``m -> n`` is an affine subspace of ``F^m ⊕ F^n`` with the domain
coordinates first. Subspaces are stored canonically (RREF basis without zero
rows, offset reduced to zero on every pivot column), so structural equality
is relational equality. Parity-check matrices are derived on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

import exactmat as em
from errors import (
    AffineRelationError,
    KirrelError,
    ModulusMismatchError,
    ParseError,
    ShapeError,
)
from exactmat import ExactMatrix, Permutation
from gfp import Prime


def _pivots_of(basis: ExactMatrix) -> tuple[int, ...]:
    return tuple(int(np.flatnonzero(row)[0]) for row in basis.entries)


@dataclass(frozen=True)
class AffineSubspace:
    """``offset + rowspan(basis)`` inside ``F^ambient_dim``, or the empty set.

    The constructor canonicalizes whatever generators and offset it is given.
    """

    ambient_dim: int
    modulus: Prime
    basis: ExactMatrix
    offset: tuple[int, ...] = ()
    consistent: bool = True

    def __post_init__(self) -> None:
        if self.basis.cols != self.ambient_dim:
            msg = f"Basis has {self.basis.cols} columns, ambient dimension is {self.ambient_dim}"
            raise ShapeError(msg, details={"cols": self.basis.cols, "ambient": self.ambient_dim})
        if self.basis.modulus != self.modulus:
            msg = f"Basis over F_{self.basis.p}, subspace over F_{self.modulus}"
            raise ModulusMismatchError(
                msg, details={"basis": self.basis.p, "space": self.modulus.p}
            )
        if not self.consistent:
            object.__setattr__(self, "basis", em.zeros(0, self.ambient_dim, self.modulus))
            object.__setattr__(self, "offset", (0,) * self.ambient_dim)
            return
        offset = em.reduce_vector(
            self.offset if len(self.offset) else np.zeros(self.ambient_dim, dtype=np.int64),
            self.modulus,
        )
        if offset.shape[0] != self.ambient_dim:
            msg = f"Offset has {offset.shape[0]} entries, ambient dimension is {self.ambient_dim}"
            raise ShapeError(msg, details={"offset": offset.shape[0], "ambient": self.ambient_dim})
        basis, pivots = em.row_basis(self.basis)
        offset = _reduce_against(offset, basis, pivots)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "offset", tuple(int(x) for x in offset))

    @classmethod
    def empty(cls, ambient_dim: int, modulus: Prime) -> AffineSubspace:
        """The empty set, marked inconsistent, with no basis rows."""
        return cls(ambient_dim, modulus, em.zeros(0, ambient_dim, modulus), consistent=False)

    @classmethod
    def full(cls, ambient_dim: int, modulus: Prime) -> AffineSubspace:
        """The whole of ``F_p^ambient_dim``."""
        return cls(ambient_dim, modulus, em.identity(ambient_dim, modulus))

    @property
    def dim(self) -> int:
        """Dimension of the direction space (-1 for the empty set)."""
        return self.basis.rows if self.consistent else -1

    @property
    def pivots(self) -> tuple[int, ...]:
        """Pivot columns of the canonical basis."""
        return _pivots_of(self.basis)

    @property
    def is_linear(self) -> bool:
        """Non-empty with a zero offset."""
        return self.consistent and not any(self.offset)

    @property
    def offset_vector(self) -> np.ndarray:
        """The canonical offset as a fresh int64 vector."""
        return np.array(self.offset, dtype=np.int64)

    def direction(self) -> AffineSubspace:
        """The linear subspace parallel to this one (empty stays empty)."""
        if not self.consistent:
            return self
        return AffineSubspace(self.ambient_dim, self.modulus, self.basis)

    def reduce(self, vector: np.ndarray) -> np.ndarray:
        """Reduce a vector against the basis; zero iff it lies in the direction."""
        return _reduce_against(em.reduce_vector(vector, self.modulus), self.basis, self.pivots)

    def contains(self, vector: np.ndarray | list[int] | tuple[int, ...]) -> bool:
        """Membership test; the empty set contains nothing.

        Raises:
            ShapeError: If the vector length differs from the ambient dimension.

        """
        values = em.reduce_vector(vector, self.modulus)
        if values.shape[0] != self.ambient_dim:
            msg = f"Vector of length {values.shape[0]} in F^{self.ambient_dim}"
            raise ShapeError(msg, details={"length": values.shape[0], "ambient": self.ambient_dim})
        if not self.consistent:
            return False
        return not self.reduce(values - self.offset_vector).any()

    def parity_check(self) -> ExactMatrix:
        """Canonical (RREF) matrix whose kernel is the direction space."""
        return em.row_basis(em.kernel_basis(self.basis))[0]

    def generators(self) -> list[np.ndarray]:
        """Offset followed by the basis rows."""
        return [self.offset_vector, *(row.copy() for row in self.basis.entries)]


def _reduce_against(
    vector: np.ndarray, basis: ExactMatrix, pivots: tuple[int, ...]
) -> np.ndarray:
    out = vector.copy()
    for i, c in enumerate(pivots):
        if out[c]:
            out = (out - out[c] * basis.entries[i]) % basis.p
    return out


@dataclass(frozen=True)
class LinearRelation:
    """A relation ``dom -> cod``; columns are domain coordinates, then codomain."""

    dom: int
    cod: int
    space: AffineSubspace

    def __post_init__(self) -> None:
        if self.dom < 0 or self.cod < 0:
            msg = f"Wire counts must be non-negative, got {self.dom} -> {self.cod}"
            raise ShapeError(msg, details={"dom": self.dom, "cod": self.cod})
        if self.space.ambient_dim != self.dom + self.cod:
            msg = (
                f"Relation {self.dom} -> {self.cod} needs ambient dimension "
                f"{self.dom + self.cod}, got {self.space.ambient_dim}"
            )
            raise ShapeError(msg, details={"dom": self.dom, "cod": self.cod})

    @property
    def modulus(self) -> Prime:
        """Field of the underlying space."""
        return self.space.modulus

    @property
    def dim(self) -> int:
        """Dimension of the direction space, -1 when empty."""
        return self.space.dim

    @property
    def is_linear(self) -> bool:
        """True for a subspace rather than a proper affine one."""
        return self.space.is_linear

    @property
    def is_empty(self) -> bool:
        """True when no pair is related."""
        return not self.space.consistent

    def contains(self, x: np.ndarray | list[int], y: np.ndarray | list[int]) -> bool:
        """Whether ``x`` in the domain is related to ``y`` in the codomain."""
        return self.space.contains(np.concatenate([np.asarray(x), np.asarray(y)]))


@dataclass(frozen=True)
class StandardForm:
    """``H = (1 | A)σ`` and ``G = (-Aᵀ | 1)σ``."""

    A: ExactMatrix
    sigma: Permutation
    k: int

    def parity_check(self) -> ExactMatrix:
        """``(1 | A)`` with columns moved back by ``σ``."""
        r = self.A.rows
        left = em.hstack(em.identity(r, self.A.modulus), self.A)
        return em.permute_cols(left, self.sigma.inverse())

    def generator(self) -> ExactMatrix:
        """``(-Aᵀ | 1)`` with columns moved back by ``σ``."""
        left = em.hstack(-self.A.T, em.identity(self.k, self.A.modulus))
        return em.permute_cols(left, self.sigma.inverse())


def _same_modulus(*relations: LinearRelation) -> Prime:
    moduli = {r.modulus for r in relations}
    if len(moduli) > 1:
        msg = f"Relations over different fields: {sorted(m.p for m in moduli)}"
        raise ModulusMismatchError(msg, details={"moduli": sorted(m.p for m in moduli)})
    return relations[0].modulus


def _require_linear(relation: LinearRelation, operation: str) -> None:
    if not relation.is_linear:
        kind = "empty" if relation.is_empty else "affine"
        msg = (
            f"{operation} needs a linear relation, got an {kind} one; "
            "use affine_parity_check or the direction space instead"
        )
        raise AffineRelationError(msg, details={"operation": operation, "kind": kind})


def _check_width(matrix: ExactMatrix, m: int, n: int) -> None:
    if matrix.cols != m + n:
        msg = f"Matrix has {matrix.cols} columns, relation {m} -> {n} needs {m + n}"
        raise ShapeError(msg, details={"cols": matrix.cols, "dom": m, "cod": n})


# Constructors


def from_generator(G: ExactMatrix, m: int, n: int) -> LinearRelation:
    """Relation spanned by the rows of ``G``."""
    _check_width(G, m, n)
    return LinearRelation(m, n, AffineSubspace(m + n, G.modulus, G))


def from_affine(
    G: ExactMatrix, offset: np.ndarray | list[int], m: int, n: int
) -> LinearRelation:
    """Relation ``offset + rowspan(G)``.

    Args:
        G: Generator rows, ``m + n`` columns wide.
        offset: Any point of the relation; it is canonicalized against ``G``.
        m: Domain width.
        n: Codomain width.

    Returns:
        The affine relation ``m -> n``.

    Raises:
        ShapeError: If ``G`` is not ``m + n`` columns wide.

    """
    _check_width(G, m, n)
    return LinearRelation(m, n, AffineSubspace(m + n, G.modulus, G, tuple(int(x) for x in offset)))


def from_parity_check(
    H: ExactMatrix, m: int, n: int, rhs: np.ndarray | list[int] | None = None
) -> LinearRelation:
    """Relation ``{v | H v = rhs}`` (``rhs`` defaults to zero)."""
    _check_width(H, m, n)
    if rhs is None:
        return from_generator(em.kernel_basis(H), m, n)
    found = em.solve(H, rhs)
    if found is None:
        return empty_relation(m, n, H.modulus)
    particular, kernel = found
    return from_affine(kernel, particular, m, n)


def identity(n: int, modulus: Prime) -> LinearRelation:
    """The diagonal ``{(x, x)}`` on ``n`` wires."""
    return iota(em.identity(n, modulus))


def zero_relation(m: int, n: int, modulus: Prime) -> LinearRelation:
    """Relates only ``0`` to ``0``."""
    return from_generator(em.zeros(0, m + n, modulus), m, n)


def full_relation(m: int, n: int, modulus: Prime) -> LinearRelation:
    """Relates everything to everything."""
    return LinearRelation(m, n, AffineSubspace.full(m + n, modulus))


def empty_relation(m: int, n: int, modulus: Prime) -> LinearRelation:
    """Relates nothing."""
    return LinearRelation(m, n, AffineSubspace.empty(m + n, modulus))


def iota(M: ExactMatrix) -> LinearRelation:
    """Graph ``{(x, Mx)}`` of an ``n x m`` matrix, as a relation ``m -> n``."""
    n, m = M.shape
    return from_generator(em.hstack(em.identity(m, M.modulus), M.T), m, n)


# Views


def parity_check(relation: LinearRelation) -> ExactMatrix:
    """Canonical ``H`` with the relation equal to ``ker H``.

    Raises:
        AffineRelationError: If the relation is affine or empty.

    """
    _require_linear(relation, "parity_check")
    return relation.space.parity_check()


def generator(relation: LinearRelation) -> ExactMatrix:
    """Canonical ``G`` whose rows span the relation.

    Raises:
        AffineRelationError: If the relation is affine or empty.

    """
    _require_linear(relation, "generator")
    return relation.space.basis


def affine_parity_check(relation: LinearRelation) -> tuple[ExactMatrix, np.ndarray]:
    """``(H, b)`` with ``H v = b`` exactly on the relation.

    The empty relation gets the single unsatisfiable row ``0 = 1``.
    """
    space = relation.space
    if not space.consistent:
        return em.zeros(1, space.ambient_dim, space.modulus), np.ones(1, dtype=np.int64)
    H = space.parity_check()
    return H, em.mat_vec(H, space.offset_vector)


def standard_form(relation: LinearRelation) -> StandardForm:
    """``(A, σ)`` with pivot columns of the canonical parity check moved first."""
    _require_linear(relation, "standard_form")
    H = relation.space.parity_check()
    pivots = _pivots_of(H)
    pivot_set = set(pivots)
    free = [c for c in range(H.cols) if c not in pivot_set]
    sigma = Permutation.from_order([*pivots, *free])
    return StandardForm(A=em.block(H, slice(None), free), sigma=sigma, k=len(free))


# Operations


def compose(r1: LinearRelation, r2: LinearRelation) -> LinearRelation:
    """Relational composite ``r1 ; r2`` (first ``r1``, then ``r2``).

    The middle coordinates of both generator views are equalized by solving
    ``a·G1_y - b·G2_y = o2_y - o1_y`` for the coefficient vector ``(a, b)``;
    the composite is the image of that solution set on the outer columns.
    """
    if r1.cod != r2.dom:
        msg = f"Cannot compose {r1.dom} -> {r1.cod} with {r2.dom} -> {r2.cod}"
        raise ShapeError(msg, details={"left_cod": r1.cod, "right_dom": r2.dom})
    modulus = _same_modulus(r1, r2)
    m, k, n = r1.dom, r1.cod, r2.cod
    if r1.is_empty or r2.is_empty:
        return empty_relation(m, n, modulus)
    g1, g2 = r1.space.basis, r2.space.basis
    o1, o2 = r1.space.offset_vector, r2.space.offset_vector
    every = slice(None)
    middle = em.vstack(em.block(g1, every, slice(m, m + k)), -em.block(g2, every, slice(0, k)))
    found = em.solve(middle.T, (o2[:k] - o1[m:]) % modulus.p)
    if found is None:
        return empty_relation(m, n, modulus)
    weights, kernel = found
    outer = em.block_diag(em.block(g1, every, slice(0, m)), em.block(g2, every, slice(k, k + n)))
    offset = (np.concatenate([o1[:m], o2[k:]]) + weights @ outer.entries) % modulus.p
    return from_affine(kernel @ outer, offset, m, n)


def compose_all(first: LinearRelation, *rest: LinearRelation) -> LinearRelation:
    """Compose left to right: ``first`` is applied first."""
    result = first
    for relation in rest:
        result = compose(result, relation)
    return result


def _tensor_permutation(m1: int, n1: int, m2: int, n2: int) -> Permutation:
    """Reorder ``(x1, y1, x2, y2)`` columns into ``(x1, x2, y1, y2)``."""
    order = [
        *range(m1),
        *range(m1 + n1, m1 + n1 + m2),
        *range(m1, m1 + n1),
        *range(m1 + n1 + m2, m1 + n1 + m2 + n2),
    ]
    return Permutation.from_order(order)


def tensor(r1: LinearRelation, r2: LinearRelation) -> LinearRelation:
    """Direct sum; domain blocks then codomain blocks are concatenated."""
    modulus = _same_modulus(r1, r2)
    m, n = r1.dom + r2.dom, r1.cod + r2.cod
    if r1.is_empty or r2.is_empty:
        return empty_relation(m, n, modulus)
    sigma = _tensor_permutation(r1.dom, r1.cod, r2.dom, r2.cod)
    basis = em.permute_cols(em.block_diag(r1.space.basis, r2.space.basis), sigma)
    offset = sigma.apply(np.concatenate([r1.space.offset_vector, r2.space.offset_vector]))
    return from_affine(basis, offset, m, n)


def tensor_all(first: LinearRelation, *rest: LinearRelation) -> LinearRelation:
    """Tensor left to right."""
    result = first
    for relation in rest:
        result = tensor(result, relation)
    return result


def converse(relation: LinearRelation) -> LinearRelation:
    """Swap domain and codomain: ``{(y, x) | (x, y) in R}``."""
    m, n = relation.dom, relation.cod
    if relation.is_empty:
        return empty_relation(n, m, relation.modulus)
    sigma = Permutation.from_order([*range(m, m + n), *range(m)])
    basis = em.permute_cols(relation.space.basis, sigma)
    return from_affine(basis, sigma.apply(relation.space.offset_vector), n, m)


def orthogonal_complement(relation: LinearRelation) -> LinearRelation:
    """``{(x', y') | xᵀx' - yᵀy' = 0 for all (x, y) in R}``."""
    _require_linear(relation, "orthogonal_complement")
    m, n = relation.dom, relation.cod
    signs = np.concatenate([np.ones(m, dtype=np.int64), -np.ones(n, dtype=np.int64)])
    G = relation.space.basis
    return from_parity_check(ExactMatrix(G.entries * signs, G.modulus), m, n)


def is_subrelation(r1: LinearRelation, r2: LinearRelation) -> bool:
    """``r1 ⊆ r2``; for linear relations this is ``H2 · G1ᵀ = 0``."""
    if (r1.dom, r1.cod) != (r2.dom, r2.cod):
        msg = f"Boundaries differ: {r1.dom} -> {r1.cod} vs {r2.dom} -> {r2.cod}"
        raise ShapeError(msg, details={"left": (r1.dom, r1.cod), "right": (r2.dom, r2.cod)})
    _same_modulus(r1, r2)
    if r1.is_empty:
        return True
    if r2.is_empty:
        return False
    H2 = r2.space.parity_check()
    if not (H2 @ r1.space.basis.T).is_zero():
        return False
    return r2.space.contains(r1.space.offset_vector)


# Cups, caps and bending


def cup(n: int, modulus: Prime) -> LinearRelation:
    """``{((x, x), ())}`` as a relation ``2n -> 0``."""
    eye = em.identity(n, modulus)
    return from_generator(em.hstack(eye, eye), 2 * n, 0)


def cap(n: int, modulus: Prime) -> LinearRelation:
    """``{((), (x, x))}`` as a relation ``0 -> 2n``."""
    eye = em.identity(n, modulus)
    return from_generator(em.hstack(eye, eye), 0, 2 * n)


def bend(relation: LinearRelation) -> LinearRelation:
    """State ``0 -> m+n`` made by capping the inputs of ``relation``."""
    m = relation.dom
    return compose(cap(m, relation.modulus), tensor(identity(m, relation.modulus), relation))


def unbend(state: LinearRelation, m: int, n: int) -> LinearRelation:
    """Inverse of :func:`bend` for a state on ``m + n`` wires."""
    if state.dom != 0 or state.cod != m + n:
        msg = f"Expected a state 0 -> {m + n}, got {state.dom} -> {state.cod}"
        raise ShapeError(msg, details={"dom": state.dom, "cod": state.cod})
    modulus = state.modulus
    return compose(
        tensor(identity(m, modulus), state),
        tensor(cup(m, modulus), identity(n, modulus)),
    )


# Quasi-stochastic maps


def is_quasi_stochastic(relation: LinearRelation) -> bool:
    """True iff ``(1_m, 1_n)`` belongs to the relation."""
    return relation.space.contains(np.ones(relation.dom + relation.cod, dtype=np.int64))


def matrix_is_quasi_stochastic(A: ExactMatrix) -> bool:
    """True iff every row of ``A`` sums to 1."""
    return bool(np.all(A.entries.sum(axis=1) % A.p == 1 % A.p))


# Text format


@dataclass(frozen=True)
class RelationHeader:
    """First line of a ``rel`` or ``sympl`` file."""

    kind: str
    modulus: Prime
    dom: int
    cod: int
    offset: tuple[int, ...] | None
    empty: bool


def parse_header(
    line: str, kinds: tuple[str, ...], width: int | None = None, modulus_override: int | None = None
) -> RelationHeader:
    """Parse ``<kind> p <mod> dom <m> cod <n> [offset v...] [empty]``.

    ``width`` is the expected offset length; ``None`` means ``dom + cod``.
    """
    tokens = line.split()
    labels = tokens[1::2][:3]
    if len(tokens) < 7 or tokens[0] not in kinds or labels != ["p", "dom", "cod"]:  # noqa: PLR2004
        msg = f"Bad relation header: {line!r}"
        raise ParseError(msg, details={"line": line})
    try:
        p, dom, cod = int(tokens[2]), int(tokens[4]), int(tokens[6])
        if dom < 0 or cod < 0:
            msg = f"Negative wire count in header: {line!r}"
            raise ParseError(msg, details={"line": line})
        rest = tokens[7:]
        empty = bool(rest) and rest[-1] == "empty"
        if empty:
            rest = rest[:-1]
        offset = None
        if rest:
            if rest[0] != "offset":
                msg = f"Unexpected token {rest[0]!r} in header"
                raise ParseError(msg, details={"line": line})
            offset = tuple(int(t) for t in rest[1:])
    except ValueError as exc:
        msg = f"Non-integer value in header: {line!r}"
        raise ParseError(msg, details={"line": line}) from exc
    expected = width if width is not None else dom + cod
    if offset is not None and len(offset) != expected:
        msg = f"Offset has {len(offset)} entries, expected {expected}"
        raise ParseError(msg, details={"line": line})
    try:
        modulus = Prime(modulus_override if modulus_override is not None else p)
    except KirrelError as exc:
        raise ParseError(str(exc), details={"line": line}) from exc
    return RelationHeader(tokens[0], modulus, dom, cod, offset, empty)


def format_header(kind: str, space: AffineSubspace, dom: int, cod: int) -> str:
    """Header line; ``offset`` only when nonzero, ``empty`` only when empty."""
    parts = [kind, "p", str(space.modulus), "dom", str(dom), "cod", str(cod)]
    if space.consistent and any(space.offset):
        parts += ["offset", *(str(v) for v in space.offset)]
    if not space.consistent:
        parts.append("empty")
    return " ".join(parts)


def format_relation(relation: LinearRelation) -> str:
    """Header line followed by the canonical generator block."""
    header = format_header("rel", relation.space, relation.dom, relation.cod)
    return header + "\n" + em.format_matrix(relation.space.basis)


def read_space(
    text: str, kinds: tuple[str, ...], width_of: int, modulus_override: int | None = None
) -> tuple[RelationHeader, AffineSubspace]:
    """Parse a header plus generator block; ``width_of`` multiplies ``dom + cod``."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        msg = "Empty relation file"
        raise ParseError(msg)
    tokens = lines[0].split()
    try:
        width = width_of * (int(tokens[4]) + int(tokens[6]))
    except (IndexError, ValueError) as exc:
        msg = f"Bad relation header: {lines[0]!r}"
        raise ParseError(msg, details={"line": lines[0]}) from exc
    header = parse_header(lines[0], kinds, width, modulus_override)
    matrix, rest = em.parse_matrix_lines(lines[1:], modulus_override)
    if matrix.modulus != header.modulus:
        msg = f"Generator block is over F_{matrix.p}, header says F_{header.modulus}"
        raise ParseError(msg, details={"header": header.modulus.p, "block": matrix.p})
    if rest:
        msg = f"Trailing content after relation: {rest[0]!r}"
        raise ParseError(msg, details={"line": rest[0]})
    if matrix.cols != width:
        msg = f"Generator block has {matrix.cols} columns, expected {width}"
        raise ParseError(msg, details={"cols": matrix.cols, "expected": width})
    if header.empty:
        return header, AffineSubspace.empty(width, header.modulus)
    return header, AffineSubspace(width, header.modulus, matrix, header.offset or ())


def parse_relation(text: str, modulus_override: int | None = None) -> LinearRelation:
    """Parse a ``rel`` file.

    Args:
        text: Header line plus generator block.
        modulus_override: Prime to use instead of the one in the file.

    Returns:
        The relation, canonicalized.

    Raises:
        ParseError: On a malformed header or block, or negative wire counts.

    """
    header, space = read_space(text, ("rel",), 1, modulus_override)
    return LinearRelation(header.dom, header.cod, space)


def space_to_json(kind: str, space: AffineSubspace, dom: int, cod: int) -> dict[str, Any]:
    """JSON object mirroring the header fields plus a ``matrix`` block."""
    return {
        "kind": kind,
        "modulus": space.modulus.p,
        "dom": dom,
        "cod": cod,
        "offset": list(space.offset),
        "empty": not space.consistent,
        "matrix": em.matrix_to_json(space.basis),
    }


def relation_to_json(relation: LinearRelation) -> dict[str, Any]:
    """JSON form of a ``rel`` relation."""
    return space_to_json("rel", relation.space, relation.dom, relation.cod)
