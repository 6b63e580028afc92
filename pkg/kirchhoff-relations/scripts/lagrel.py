"""Symplectic layer: doubled relations, Lagrangian tests and standard forms.

A relation ``m -> n`` on symplectic wires relates ``(q_in, p_in)`` to
``(q_out, p_out)``. It is stored as its state over ``2N`` coordinates,
``N = m + n``, ordered::

    (q_in, q_out, s_in, s_out)   with   s_in = p_in,  s_out = -p_out

so a relation and its state share one :class:`~linrel.AffineSubspace`, and
the power input of a member is the plain dot product ``q · s``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

import exactmat as em
import linrel as lr
from errors import (
    AffineRelationError,
    ModulusMismatchError,
    NotInRelationError,
    NotLagrangianError,
    ShapeError,
)
from exactmat import ExactMatrix, Permutation
from gfp import FieldScalar, Prime
from linrel import AffineSubspace, LinearRelation


@dataclass(frozen=True)
class DoubledRelation:
    """A relation ``dom -> cod`` on wires carrying a position and a momentum each.

    ``state`` lives in ``F_p^(2N)`` with ``N = dom + cod``, ordered as all
    positions then all state momenta ``s = (p_in, -p_out)``.
    """

    dom: int
    cod: int
    state: AffineSubspace

    def __post_init__(self) -> None:
        if self.dom < 0 or self.cod < 0:
            msg = f"Wire counts must be non-negative, got {self.dom} -> {self.cod}"
            raise ShapeError(msg, details={"dom": self.dom, "cod": self.cod})
        if self.state.ambient_dim != 2 * (self.dom + self.cod):
            msg = (
                f"Doubled relation {self.dom} -> {self.cod} needs ambient dimension "
                f"{2 * (self.dom + self.cod)}, got {self.state.ambient_dim}"
            )
            raise ShapeError(msg, details={"dom": self.dom, "cod": self.cod})

    @property
    def n_wires(self) -> int:
        """Total boundary wires, ``dom + cod``."""
        return self.dom + self.cod

    @property
    def modulus(self) -> Prime:
        """Field of the state space."""
        return self.state.modulus

    @property
    def is_linear(self) -> bool:
        """True when the state has no offset."""
        return self.state.is_linear

    @property
    def is_empty(self) -> bool:
        """True for an inconsistent relation with no members."""
        return not self.state.consistent

    def direction(self) -> DoubledRelation:
        """The linear relation parallel to this one."""
        return DoubledRelation(self.dom, self.cod, self.state.direction())

    def state_vector(self, element: np.ndarray | list[int]) -> np.ndarray:
        """Physical ``(q_in, q_out, p_in, p_out)`` to state coordinates."""
        values = em.reduce_vector(element, self.modulus)
        if values.shape[0] != 2 * self.n_wires:
            msg = f"Element has {values.shape[0]} entries, expected {2 * self.n_wires}"
            raise ShapeError(msg, details={"length": values.shape[0]})
        values[self.n_wires + self.dom :] = -values[self.n_wires + self.dom :] % self.modulus.p
        return values

    def physical_vector(self, state: np.ndarray | list[int]) -> np.ndarray:
        """Inverse of :meth:`state_vector` (the sign flip is an involution)."""
        return self.state_vector(state)

    def contains(self, element: np.ndarray | list[int]) -> bool:
        """Membership of a physical ``(q_in, q_out, p_in, p_out)`` vector."""
        return self.state.contains(self.state_vector(element))


@dataclass(frozen=True)
class LagrangianStandardForm:
    """``H = [[Y, 0, 1, Aᵀ], [-A, 1, 0, 0]]·σ_S`` with σ acting on wires."""

    Y: ExactMatrix
    A: ExactMatrix
    sigma: Permutation
    n_p: int
    n_q: int

    @property
    def modulus(self) -> Prime:
        """Field of the form matrices."""
        return self.Y.modulus

    def parity_check(self) -> ExactMatrix:
        """The state parity check ``H`` this form describes."""
        modulus, n_p, n_q = self.modulus, self.n_p, self.n_q
        top = em.hstack(
            self.Y, em.zeros(n_p, n_q, modulus), em.identity(n_p, modulus), self.A.T
        )
        bottom = em.hstack(
            -self.A,
            em.identity(n_q, modulus),
            em.zeros(n_q, n_p, modulus),
            em.zeros(n_q, n_q, modulus),
        )
        return em.permute_cols(em.vstack(top, bottom), self.sigma.doubled().inverse())


def _check_state_width(space: AffineSubspace) -> int:
    if space.ambient_dim % 2:
        msg = f"Symplectic space needs even dimension, got {space.ambient_dim}"
        raise ShapeError(msg, details={"ambient": space.ambient_dim})
    return space.ambient_dim // 2


def symplectic_J(N: int, modulus: Prime) -> ExactMatrix:
    """``[[0, 1], [-1, 0]]`` in ``N x N`` blocks."""
    eye = em.identity(N, modulus)
    zero = em.zeros(N, N, modulus)
    return em.vstack(em.hstack(zero, eye), em.hstack(-eye, zero))


def symplectic_form(u: np.ndarray, v: np.ndarray, modulus: Prime) -> FieldScalar:
    """``<u, v> = uᵀ J v`` on vectors of even length."""
    n = u.shape[0] // 2
    return FieldScalar(int(u[:n] @ v[n:] - u[n:] @ v[:n]), modulus)


def symplectic_dual(space: AffineSubspace) -> AffineSubspace:
    """``{u' | <u', u> = 0 for all u}``: the kernel of ``G·J``."""
    if not space.is_linear:
        msg = "symplectic_dual needs a linear subspace"
        raise AffineRelationError(msg, details={"offset": space.offset})
    N = _check_state_width(space)
    check = space.basis @ symplectic_J(N, space.modulus)
    return AffineSubspace(2 * N, space.modulus, em.kernel_basis(check))


def is_isotropic(space: AffineSubspace) -> bool:
    """The symplectic form vanishes on every pair of basis vectors."""
    N = _check_state_width(space)
    G = space.basis
    return (G @ symplectic_J(N, space.modulus) @ G.T).is_zero()


def _is_lagrangian_space(space: AffineSubspace) -> bool:
    return space.consistent and space.dim * 2 == space.ambient_dim and is_isotropic(space)


def is_lagrangian(relation: DoubledRelation) -> bool:
    """True iff the state has dimension N and equals its symplectic dual."""
    if not relation.is_linear:
        msg = "is_lagrangian needs a linear relation; use is_affine_lagrangian"
        raise AffineRelationError(msg, details={"offset": relation.state.offset})
    return _is_lagrangian_space(relation.state)


def is_affine_lagrangian(relation: DoubledRelation) -> bool:
    """True when the direction space is Lagrangian; empty relations are not."""
    return _is_lagrangian_space(relation.state.direction())


def _require_lagrangian(relation: DoubledRelation, operation: str) -> None:
    if not _is_lagrangian_space(relation.state.direction()):
        msg = f"{operation} needs a Lagrangian relation"
        raise NotLagrangianError(msg, details={"operation": operation})


# Conversions


def relation_to_state(relation: DoubledRelation) -> DoubledRelation:
    """Bend every domain wire to the codomain: ``m -> n`` becomes ``0 -> m + n``."""
    return DoubledRelation(0, relation.n_wires, relation.state)


def state_to_relation(state: DoubledRelation, m: int, n: int) -> DoubledRelation:
    """Inverse of :func:`relation_to_state`.

    Raises:
        ShapeError: If ``state`` is not ``0 -> m + n``.

    """
    if state.dom != 0 or state.cod != m + n:
        msg = f"Expected a state 0 -> {m + n}, got {state.dom} -> {state.cod}"
        raise ShapeError(msg, details={"dom": state.dom, "cod": state.cod})
    return DoubledRelation(m, n, state.state)


def _physical_layout(m: int, n: int) -> tuple[Permutation, np.ndarray]:
    """Column map from state order to interleaved ``(q, p)`` wire pairs.

    Returns the permutation plus the per-state-column sign (``-1`` on
    ``s_out`` since ``p_out = -s_out``).
    """
    N = m + n
    images = [2 * w for w in range(N)] + [2 * w + 1 for w in range(N)]
    signs = np.ones(2 * N, dtype=np.int64)
    signs[N + m :] = -1
    return Permutation(tuple(images)), signs


def as_linear(relation: DoubledRelation) -> LinearRelation:
    """View as a linear relation ``2m -> 2n`` on ``(q, p)`` wire pairs."""
    m, n = relation.dom, relation.cod
    if relation.is_empty:
        return lr.empty_relation(2 * m, 2 * n, relation.modulus)
    sigma, signs = _physical_layout(m, n)
    basis = relation.state.basis
    signed = ExactMatrix(basis.entries * signs, basis.modulus)
    offset = sigma.apply(relation.state.offset_vector * signs)
    return lr.from_affine(em.permute_cols(signed, sigma), offset, 2 * m, 2 * n)


def from_linear(relation: LinearRelation) -> DoubledRelation:
    """Inverse of :func:`as_linear`."""
    if relation.dom % 2 or relation.cod % 2:
        msg = f"Wire-pair view needs even boundaries, got {relation.dom} -> {relation.cod}"
        raise ShapeError(msg, details={"dom": relation.dom, "cod": relation.cod})
    m, n = relation.dom // 2, relation.cod // 2
    if relation.is_empty:
        return DoubledRelation(m, n, AffineSubspace.empty(2 * (m + n), relation.modulus))
    sigma, signs = _physical_layout(m, n)
    back = sigma.inverse()
    basis = em.permute_cols(relation.space.basis, back)
    offset = back.apply(relation.space.offset_vector) * signs
    state = AffineSubspace(
        2 * (m + n),
        relation.modulus,
        ExactMatrix(basis.entries * signs, basis.modulus),
        tuple(int(x) for x in offset),
    )
    return DoubledRelation(m, n, state)


# Categorical structure


def identity(n: int, modulus: Prime) -> DoubledRelation:
    """``n`` plain wires: positions and momenta pass through."""
    return L_functor(lr.identity(n, modulus))


def compose(r1: DoubledRelation, r2: DoubledRelation) -> DoubledRelation:
    """``r1`` then ``r2``; output position and momentum meet input ones."""
    return from_linear(lr.compose(as_linear(r1), as_linear(r2)))


def compose_all(first: DoubledRelation, *rest: DoubledRelation) -> DoubledRelation:
    """Compose left to right: ``first`` is applied first."""
    result = first
    for relation in rest:
        result = compose(result, relation)
    return result


def tensor(r1: DoubledRelation, r2: DoubledRelation) -> DoubledRelation:
    """Side by side; domain wires first, then codomain wires."""
    return from_linear(lr.tensor(as_linear(r1), as_linear(r2)))


def tensor_all(first: DoubledRelation, *rest: DoubledRelation) -> DoubledRelation:
    """Tensor left to right."""
    result = first
    for relation in rest:
        result = tensor(result, relation)
    return result


def converse(relation: DoubledRelation) -> DoubledRelation:
    """Swap domain and codomain."""
    return from_linear(lr.converse(as_linear(relation)))


def cap(n: int, modulus: Prime) -> DoubledRelation:
    """``0 -> 2n``: pairs wire ``i`` with wire ``n + i``; momenta cancel."""
    return DoubledRelation(0, 2 * n, identity(n, modulus).state)


def cup(n: int, modulus: Prime) -> DoubledRelation:
    """``2n -> 0`` with the same state as :func:`cap`."""
    return DoubledRelation(2 * n, 0, identity(n, modulus).state)


def L_functor(relation: LinearRelation) -> DoubledRelation:
    """Pair ``R`` with its orthogonal complement: ``(q, q') ∈ R`` and ``(p, p') ∈ R^⊥``.

    In state coordinates the momentum half is the kernel of ``G``, so the
    state is generated by ``[[G, 0], [0, H]]``.
    """
    if not relation.is_linear:
        msg = "L_functor needs a linear relation"
        raise AffineRelationError(msg, details={"offset": relation.space.offset})
    space = relation.space
    basis = em.block_diag(space.basis, space.parity_check())
    return DoubledRelation(
        relation.dom,
        relation.cod,
        AffineSubspace(2 * (relation.dom + relation.cod), relation.modulus, basis),
    )


def symplectic_permutation(sigma: Permutation, modulus: Prime) -> DoubledRelation:
    """Move wire ``t`` to ``sigma.images[t]`` in both grades."""
    return L_functor(lr.iota(sigma.as_matrix(modulus).T))


def from_symplectic_matrix(C: ExactMatrix) -> DoubledRelation:
    """The graph ``{(x, Cx)}`` of a ``2n x 2n`` matrix acting on ``(q, p)``."""
    if C.rows != C.cols or C.rows % 2:
        msg = f"Expected an even square matrix, got {C.shape}"
        raise ShapeError(msg, details={"shape": C.shape})
    n = C.rows // 2
    eye = em.identity(2 * n, C.modulus)
    images = C.T
    q_cols, p_cols = slice(0, n), slice(n, 2 * n)
    basis = em.hstack(
        em.block(eye, slice(None), q_cols),
        em.block(images, slice(None), q_cols),
        em.block(eye, slice(None), p_cols),
        -em.block(images, slice(None), p_cols),
    )
    return DoubledRelation(n, n, AffineSubspace(4 * n, C.modulus, basis))


def is_symplectic_matrix(C: ExactMatrix) -> bool:
    """``Cᵀ J C = J``."""
    J = symplectic_J(C.rows // 2, C.modulus)
    return C.T @ J @ C == J


# Standard form


def lagrangian_standard_form(
    relation: DoubledRelation, wire_priority: list[int] | None = None
) -> LagrangianStandardForm:
    """Standard form ``(Y, A, σ)`` of the state of a linear Lagrangian relation.

    Position-free wires P are the pivots of the position projection, scanned
    in ``wire_priority`` order (default: increasing). The remaining wires Q
    have free momenta. With ``(q_P, s_Q)`` as coordinates, the state reads
    ``q_Q = A q_P`` and ``s_P = -Y q_P - Aᵀ s_Q``.

    Raises:
        AffineRelationError: If the relation is affine.
        NotLagrangianError: If the state is not Lagrangian.

    """
    if not relation.is_linear:
        msg = "lagrangian_standard_form needs a linear relation"
        raise AffineRelationError(msg, details={"offset": relation.state.offset})
    _require_lagrangian(relation, "lagrangian_standard_form")
    N = relation.n_wires
    modulus = relation.modulus
    priority = list(range(N)) if wire_priority is None else list(wire_priority)
    if sorted(priority) != list(range(N)):
        msg = f"wire_priority must order all {N} wires"
        raise ShapeError(msg, details={"wire_priority": priority})
    G = relation.state.basis
    positions = em.permute_cols(
        em.block(G, slice(None), slice(0, N)), Permutation.from_order(priority)
    )
    _, pivots = em.rref(positions)
    P = sorted(priority[c] for c in pivots)
    Q = [w for w in range(N) if w not in set(P)]
    free = em.block(G, slice(None), [*P, *(N + w for w in Q)])
    reduced = em.inverse(free) @ G
    position_rows = range(len(P))
    A = em.block(reduced, position_rows, Q).T
    Y = -em.block(reduced, position_rows, [N + w for w in P]).T
    return LagrangianStandardForm(
        Y=Y, A=A, sigma=Permutation.from_order([*P, *Q]), n_p=len(P), n_q=len(Q)
    )


def state_from_standard_form(
    form: LagrangianStandardForm, dom: int = 0, cod: int | None = None
) -> DoubledRelation:
    """Rebuild the relation a standard form describes.

    Args:
        form: Output of :func:`lagrangian_standard_form`.
        dom: Domain width of the result.
        cod: Codomain width; defaults to the remaining wires.

    Returns:
        The linear Lagrangian relation ``ker H``.

    """
    N = form.n_p + form.n_q
    cod = N - dom if cod is None else cod
    H = form.parity_check()
    return DoubledRelation(dom, cod, AffineSubspace(2 * N, form.modulus, em.kernel_basis(H)))


# Power


def power_input(relation: DoubledRelation, element: np.ndarray | list[int]) -> FieldScalar:
    """``Σ q_in p_in - Σ q_out p_out`` at a member given in physical order."""
    state = relation.state_vector(element)
    if not relation.state.contains(state):
        msg = "Element is not a member of the relation"
        raise NotInRelationError(msg, details={"element": [int(x) for x in element]})
    N = relation.n_wires
    return FieldScalar(int(state[:N] @ state[N:]), relation.modulus)


def is_lossless(relation: DoubledRelation) -> bool:
    """True iff the power input vanishes on every member.

    Power is a quadratic form and p is odd, so it vanishes on
    ``offset + span(basis)`` iff its polarization ``q·s' + q'·s`` is zero on
    every pair drawn from the offset and the basis vectors.
    """
    if relation.is_empty:
        return True
    N = relation.n_wires
    vectors = np.vstack([relation.state.offset_vector, relation.state.basis.entries])
    cross = vectors[:, :N] @ vectors[:, N:].T
    return not ((cross + cross.T) % relation.modulus.p).any()


# Text format


def format_doubled(relation: DoubledRelation) -> str:
    """``sympl`` header followed by the canonical generator block."""
    header = lr.format_header("sympl", relation.state, relation.dom, relation.cod)
    return header + "\n" + em.format_matrix(relation.state.basis)


def parse_doubled(text: str, modulus_override: int | None = None) -> DoubledRelation:
    """Parse a ``sympl`` file; the block is ``2 (dom + cod)`` columns wide.

    Raises:
        ParseError: On a malformed header or block, or negative wire counts.

    """
    header, space = lr.read_space(text, ("sympl",), 2, modulus_override)
    return DoubledRelation(header.dom, header.cod, space)


def doubled_to_json(relation: DoubledRelation) -> dict[str, Any]:
    """JSON form of a ``sympl`` relation."""
    return lr.space_to_json("sympl", relation.state, relation.dom, relation.cod)


def same_modulus(*relations: DoubledRelation) -> Prime:
    """The shared field of ``relations``.

    Raises:
        ModulusMismatchError: If they live over different fields.

    """
    moduli = {r.modulus for r in relations}
    if len(moduli) > 1:
        msg = f"Relations over different fields: {sorted(m.p for m in moduli)}"
        raise ModulusMismatchError(msg, details={"moduli": sorted(m.p for m in moduli)})
    return relations[0].modulus
