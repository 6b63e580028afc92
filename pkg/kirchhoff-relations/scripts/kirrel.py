"""Kirchhoff layer: current law, translation invariance, determinism, graph states.

All predicates read the state of a :class:`~lagrel.DoubledRelation`. Momentum
sums use state coordinates, where ``Σ s = Σ p_in - Σ p_out``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

import exactmat as em
import lagrel as lg
import linrel as lr
from errors import (
    AffineRelationError,
    KirrelError,
    NotDeterministicError,
    NotGraphStateError,
    NotKirchhoffError,
    NotLagrangianError,
    ShapeError,
)
from exactmat import ExactMatrix
from lagrel import DoubledRelation
from linrel import AffineSubspace

MOMENTUM_GROUPED_MAX_WIRES = 16

type Partition = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class GraphStateForm:
    """Admittance matrix of a graph state: symmetric with zero row sums."""

    Y: ExactMatrix

    def __post_init__(self) -> None:
        check_admittance(self.Y)

    @property
    def n(self) -> int:
        """Number of nodes."""
        return self.Y.rows


@dataclass(frozen=True)
class KirchhoffClassification:
    """Result of :func:`classify`.

    ``partition`` is set only when deterministic and ``admittance`` only for
    graph states.
    """

    is_kirchhoff: bool
    is_deterministic: bool
    is_lossless: bool
    is_graph_state: bool
    partition: Partition | None = None
    admittance: ExactMatrix | None = None


def check_admittance(Y: ExactMatrix) -> None:
    """Raise unless ``Y = Yᵀ`` and ``Y·1 = 0``."""
    if Y.rows != Y.cols:
        msg = f"Admittance matrix must be square, got {Y.shape}"
        raise ShapeError(msg, details={"shape": Y.shape})
    if Y != Y.T:
        msg = "Admittance matrix is not symmetric"
        raise NotKirchhoffError(msg, details={"Y": Y.tolist()})
    if (Y.entries.sum(axis=1) % Y.p).any():
        msg = "Admittance matrix rows do not sum to zero"
        raise NotKirchhoffError(msg, details={"Y": Y.tolist()})


def _require_affine_lagrangian(relation: DoubledRelation, operation: str) -> None:
    if not lg.is_affine_lagrangian(relation):
        msg = f"{operation} needs a Lagrangian relation"
        raise NotLagrangianError(msg, details={"operation": operation})


def satisfies_kcl(relation: DoubledRelation) -> bool:
    """Every member has ``Σ p_in = Σ p_out`` (offset included).

    Raises:
        NotLagrangianError: If the direction space is not Lagrangian.

    """
    _require_affine_lagrangian(relation, "satisfies_kcl")
    N = relation.n_wires
    vectors = np.vstack([relation.state.offset_vector, relation.state.basis.entries])
    return not (vectors[:, N:].sum(axis=1) % relation.modulus.p).any()


def is_translation_invariant(relation: DoubledRelation) -> bool:
    """``ε = (1_N, 0)`` lies in the direction space."""
    if relation.is_empty:
        return False
    N = relation.n_wires
    epsilon = np.concatenate([np.ones(N, dtype=np.int64), np.zeros(N, dtype=np.int64)])
    return not relation.state.reduce(epsilon).any()


def is_kirchhoff(relation: DoubledRelation) -> bool:
    """Same as :func:`satisfies_kcl`."""
    return satisfies_kcl(relation)


def satisfies_standard_form_criterion(relation: DoubledRelation) -> bool:
    """``A·1 = 1`` and ``Y·1 = 0`` on the standard form of the direction."""
    form = lg.lagrangian_standard_form(relation.direction())
    y_balanced = not (form.Y.entries.sum(axis=1) % form.modulus.p).any()
    return lr.matrix_is_quasi_stochastic(form.A) and y_balanced


def _is_deterministic_matrix(A: ExactMatrix) -> bool:
    entries = A.entries
    return bool(np.all((entries != 0).sum(axis=1) == 1) and np.all(entries.sum(axis=1) == 1))


def is_deterministic(
    relation: DoubledRelation, wire_priority: list[int] | None = None
) -> bool:
    """Each row of the standard-form ``A`` has a single nonzero entry, equal to 1."""
    form = lg.lagrangian_standard_form(relation.direction(), wire_priority)
    return _is_deterministic_matrix(form.A)


def position_partition(relation: DoubledRelation) -> Partition:
    """Classes of wires forced to share a position.

    Each class holds one position-free wire and the wires ``q_i = q_f(i)``
    copy it. Wires are state indices: inputs first, then outputs.

    Raises:
        NotDeterministicError: If ``A`` is not deterministic.

    """
    form = lg.lagrangian_standard_form(relation.direction())
    if not _is_deterministic_matrix(form.A):
        msg = "Relation is not deterministic; it has no position partition"
        raise NotDeterministicError(msg, details={"A": form.A.tolist()})
    order = form.sigma.order()
    free, copies = order[: form.n_p], order[form.n_p :]
    classes = {wire: [wire] for wire in free}
    for row, wire in zip(form.A.entries, copies, strict=True):
        classes[free[int(np.flatnonzero(row)[0])]].append(wire)
    return tuple(sorted(tuple(sorted(c)) for c in classes.values()))


def wire_label(relation: DoubledRelation, wire: int) -> str:
    """``in<i>`` for domain wires, ``out<j>`` for codomain wires."""
    if wire < relation.dom:
        return f"in{wire}"
    return f"out{wire - relation.dom}"


def partition_labels(relation: DoubledRelation, partition: Partition) -> list[list[str]]:
    """Each class as ``in<i>``/``out<j>`` labels."""
    return [[wire_label(relation, w) for w in cls] for cls in partition]


def _momentum_slice(relation: DoubledRelation) -> ExactMatrix:
    """Basis of ``{s | (0, s) in the state}``."""
    N = relation.n_wires
    G = relation.state.basis
    combos = em.kernel_basis(em.block(G, slice(None), slice(0, N)).T)
    return combos @ em.block(G, slice(None), slice(N, 2 * N))


def is_momentum_grouped(relation: DoubledRelation, partition: Partition) -> bool:
    """Momentum-side view of a position partition.

    Every union of classes has zero total momentum on the ``q = 0`` slice,
    and every other subset of wires carries nonzero momentum on some member
    of that slice.
    """
    if not relation.is_linear:
        msg = "is_momentum_grouped needs a linear relation"
        raise AffineRelationError(msg, details={"offset": relation.state.offset})
    N = relation.n_wires
    if sorted(w for cls in partition for w in cls) != list(range(N)):
        msg = f"Partition must cover wires 0..{N - 1} exactly once"
        raise ShapeError(msg, details={"partition": partition})
    if N > MOMENTUM_GROUPED_MAX_WIRES:
        msg = f"Momentum grouping check is limited to {MOMENTUM_GROUPED_MAX_WIRES} wires"
        raise KirrelError(msg, details={"wires": N})
    slice_basis = _momentum_slice(relation)
    subsets = np.array(list(itertools.product((0, 1), repeat=N)), dtype=np.int64).reshape(-1, N)
    balanced = ~((slice_basis.entries @ subsets.T) % relation.modulus.p).any(axis=0)
    closed = np.ones(subsets.shape[0], dtype=bool)
    for cls in partition:
        members = subsets[:, list(cls)]
        closed &= (members == members[:, :1]).all(axis=1)
    return bool(np.array_equal(balanced, closed))


def is_graph_state(relation: DoubledRelation) -> bool:
    """Linear Kirchhoff state whose standard form has no position constraints."""
    if not relation.is_linear or not lg.is_lagrangian(relation):
        return False
    if not satisfies_kcl(relation):
        return False
    return lg.lagrangian_standard_form(relation).n_q == 0


def graph_state_canonical(relation: DoubledRelation) -> GraphStateForm:
    """The admittance ``Y`` with state ``{(q, -Yq)}``.

    Raises:
        NotGraphStateError: If the relation is not a graph state.

    """
    if not is_graph_state(relation):
        msg = "Relation is not a graph state"
        raise NotGraphStateError(msg, details={"dom": relation.dom, "cod": relation.cod})
    return GraphStateForm(lg.lagrangian_standard_form(relation).Y)


def relation_from_admittance(Y: ExactMatrix | GraphStateForm) -> DoubledRelation:
    """State ``0 -> n`` with momenta ``s = -Y q``."""
    matrix = Y.Y if isinstance(Y, GraphStateForm) else Y
    check_admittance(matrix)
    n = matrix.rows
    basis = em.hstack(em.identity(n, matrix.modulus), -matrix.T)
    return DoubledRelation(0, n, AffineSubspace(2 * n, matrix.modulus, basis))


def classify(relation: DoubledRelation) -> KirchhoffClassification:
    """Evaluate every Kirchhoff predicate on ``relation``.

    The empty relation (an inconsistent circuit) is not Kirchhoff and has no
    members, so it reports only ``is_lossless``.

    Args:
        relation: Any affine-Lagrangian doubled relation, or the empty one.

    Returns:
        The flags, plus the position partition when deterministic and the
        admittance matrix when a graph state.

    Raises:
        NotLagrangianError: If a non-empty relation is not affine Lagrangian.

    """
    if relation.is_empty:
        return KirchhoffClassification(
            is_kirchhoff=False, is_deterministic=False, is_lossless=True, is_graph_state=False
        )
    kirchhoff = satisfies_kcl(relation)
    direction = relation.direction()
    deterministic = is_deterministic(direction)
    graph = is_graph_state(relation)
    return KirchhoffClassification(
        is_kirchhoff=kirchhoff,
        is_deterministic=deterministic,
        is_lossless=lg.is_lossless(relation),
        is_graph_state=graph,
        partition=position_partition(direction) if deterministic else None,
        admittance=graph_state_canonical(relation).Y if graph else None,
    )


def _flag(value: bool) -> str:
    return "true" if value else "false"


def format_classification(
    classification: KirchhoffClassification, relation: DoubledRelation
) -> str:
    """Flags line, then ``partition=`` and the admittance block when present.

    Args:
        classification: Output of :func:`classify`.
        relation: The classified relation, used to label wires.

    Returns:
        Newline-terminated text.

    """
    lines = [
        " ".join([
            f"kirchhoff={_flag(classification.is_kirchhoff)}",
            f"deterministic={_flag(classification.is_deterministic)}",
            f"lossless={_flag(classification.is_lossless)}",
            f"graph_state={_flag(classification.is_graph_state)}",
        ])
    ]
    if classification.partition is not None:
        labels = partition_labels(relation, classification.partition)
        lines.append("partition=" + "|".join(",".join(cls) for cls in labels))
    text = "\n".join(lines) + "\n"
    if classification.admittance is not None:
        text += "admittance\n" + em.format_matrix(classification.admittance)
    return text
