"""Shared builders and hypothesis strategies for random relations."""

import itertools
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent / "scripts"))

import exactmat as em
import lagrel as lg
import linrel as lr
from exactmat import ExactMatrix, Permutation
from gfp import Prime
from lagrel import DoubledRelation, LagrangianStandardForm
from linrel import AffineSubspace, LinearRelation

settings.register_profile(
    "exact",
    derandomize=True,
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")

F3, F5, F7 = Prime(3), Prime(5), Prime(7)


@pytest.fixture
def f3() -> Prime:
    return F3


@pytest.fixture
def f5() -> Prime:
    return F5


@pytest.fixture
def f7() -> Prime:
    return F7


def mat(rows: list[list[int]], modulus: Prime, cols: int | None = None) -> ExactMatrix:
    return em.from_rows(rows, modulus, cols)


def all_vectors(n: int, modulus: Prime) -> np.ndarray:
    """Every vector of ``F^n`` as the rows of a ``p^n x n`` array."""
    values = list(itertools.product(range(modulus.p), repeat=n))
    return np.array(values, dtype=np.int64).reshape(len(values), n)


def members(space: AffineSubspace) -> set[tuple[int, ...]]:
    """Brute-force enumeration of an affine subspace."""
    if not space.consistent:
        return set()
    p = space.modulus.p
    coeffs = all_vectors(space.dim, space.modulus)
    points = (coeffs @ space.basis.entries + space.offset_vector) % p
    return {tuple(int(x) for x in row) for row in points}


def all_subspaces(ambient: int, dim: int, modulus: Prime) -> list[AffineSubspace]:
    """Every linear subspace of the given dimension, enumerated by its RREF basis."""
    found = []
    for pivots in itertools.combinations(range(ambient), dim):
        slots = [
            (i, c)
            for i, pivot in enumerate(pivots)
            for c in range(pivot + 1, ambient)
            if c not in pivots
        ]
        for values in itertools.product(range(modulus.p), repeat=len(slots)):
            basis = np.zeros((dim, ambient), dtype=np.int64)
            basis[list(range(dim)), list(pivots)] = 1
            for (i, c), v in zip(slots, values, strict=True):
                basis[i, c] = v
            found.append(AffineSubspace(ambient, modulus, ExactMatrix(basis, modulus)))
    return found


def all_lagrangian_states(N: int, modulus: Prime) -> list[DoubledRelation]:
    states = [DoubledRelation(0, N, s) for s in all_subspaces(2 * N, N, modulus)]
    return [s for s in states if lg.is_lagrangian(s)]


# --- hypothesis strategies ---


def elements(modulus: Prime) -> st.SearchStrategy[int]:
    return st.integers(min_value=0, max_value=modulus.p - 1)


@st.composite
def matrices(draw: st.DrawFn, modulus: Prime, rows: int, cols: int) -> ExactMatrix:
    entries = draw(
        st.lists(
            st.lists(elements(modulus), min_size=cols, max_size=cols),
            min_size=rows,
            max_size=rows,
        )
    )
    return ExactMatrix(np.array(entries, dtype=np.int64).reshape(rows, cols), modulus)


@st.composite
def permutations(draw: st.DrawFn, n: int) -> Permutation:
    return Permutation(tuple(draw(st.permutations(range(n)))))


@st.composite
def linear_relations(
    draw: st.DrawFn,
    modulus: Prime,
    max_dom: int = 2,
    max_cod: int = 2,
    *,
    dom: int | None = None,
) -> LinearRelation:
    m = draw(st.integers(0, max_dom)) if dom is None else dom
    n = draw(st.integers(0, max_cod))
    k = draw(st.integers(0, m + n))
    return lr.from_generator(draw(matrices(modulus, k, m + n)), m, n)


@st.composite
def affine_relations(
    draw: st.DrawFn,
    modulus: Prime,
    max_dom: int = 2,
    max_cod: int = 2,
    *,
    dom: int | None = None,
) -> LinearRelation:
    linear = draw(linear_relations(modulus, max_dom, max_cod, dom=dom))
    width = linear.dom + linear.cod
    offset = draw(st.lists(elements(modulus), min_size=width, max_size=width))
    return lr.from_affine(linear.space.basis, offset, linear.dom, linear.cod)


@st.composite
def symmetric_matrices(draw: st.DrawFn, modulus: Prime, n: int) -> ExactMatrix:
    upper = draw(matrices(modulus, n, n)).entries
    sym = np.triu(upper) + np.triu(upper, 1).T
    return ExactMatrix(sym, modulus)


@st.composite
def admittances(draw: st.DrawFn, modulus: Prime, n: int) -> ExactMatrix:
    """Symmetric with zero row sums: the diagonal follows the off-diagonal."""
    sym = draw(symmetric_matrices(modulus, n)).entries.copy()
    np.fill_diagonal(sym, 0)
    np.fill_diagonal(sym, -sym.sum(axis=1))
    return ExactMatrix(sym, modulus)


@st.composite
def quasi_stochastic(draw: st.DrawFn, modulus: Prime, rows: int, cols: int) -> ExactMatrix:
    """Random ``rows x cols`` matrix whose rows sum to 1 (``cols >= 1``)."""
    entries = draw(matrices(modulus, rows, cols)).entries.copy()
    entries[:, -1] = 1 - entries[:, :-1].sum(axis=1)
    return ExactMatrix(entries, modulus)


def _state(Y: ExactMatrix, A: ExactMatrix, sigma: Permutation, dom: int) -> DoubledRelation:
    form = LagrangianStandardForm(Y=Y, A=A, sigma=sigma, n_p=Y.rows, n_q=A.rows)
    return lg.state_from_standard_form(form, dom=dom)


def _wires(
    draw: st.DrawFn, max_wires: int, *, with_dom: bool, dom: int | None
) -> tuple[int, int]:
    """Wire count and domain size; a fixed ``dom`` gets up to two outputs."""
    if dom is not None:
        return dom + draw(st.integers(0 if dom else 1, 2)), dom
    N = draw(st.integers(1, max_wires))
    return N, draw(st.integers(0, N)) if with_dom else 0


@st.composite
def lagrangian_relations(
    draw: st.DrawFn,
    modulus: Prime,
    max_wires: int = 4,
    *,
    with_dom: bool = False,
    dom: int | None = None,
) -> DoubledRelation:
    """Uniform over standard-form data, so every Lagrangian relation can occur."""
    N, dom = _wires(draw, max_wires, with_dom=with_dom, dom=dom)
    n_p = draw(st.integers(0, N))
    Y = draw(symmetric_matrices(modulus, n_p))
    A = draw(matrices(modulus, N - n_p, n_p))
    return _state(Y, A, draw(permutations(N)), dom)


@st.composite
def kirchhoff_relations(
    draw: st.DrawFn,
    modulus: Prime,
    max_wires: int = 4,
    *,
    with_dom: bool = False,
    dom: int | None = None,
) -> DoubledRelation:
    N, dom = _wires(draw, max_wires, with_dom=with_dom, dom=dom)
    n_p = draw(st.integers(1, N))
    Y = draw(admittances(modulus, n_p))
    A = draw(quasi_stochastic(modulus, N - n_p, n_p))
    return _state(Y, A, draw(permutations(N)), dom)


@st.composite
def deterministic_relations(
    draw: st.DrawFn, modulus: Prime, max_wires: int = 4
) -> DoubledRelation:
    N = draw(st.integers(1, max_wires))
    n_p = draw(st.integers(1, N))
    Y = draw(admittances(modulus, n_p))
    picks = draw(st.lists(st.integers(0, n_p - 1), min_size=N - n_p, max_size=N - n_p))
    A = np.zeros((N - n_p, n_p), dtype=np.int64)
    A[np.arange(N - n_p), picks] = 1
    return _state(Y, ExactMatrix(A, modulus), draw(permutations(N)), 0)


@st.composite
def graph_states(draw: st.DrawFn, modulus: Prime, max_nodes: int = 5) -> DoubledRelation:
    n = draw(st.integers(1, max_nodes))
    return lg.state_from_standard_form(
        LagrangianStandardForm(
            Y=draw(admittances(modulus, n)),
            A=em.zeros(0, n, modulus),
            sigma=Permutation.identity(n),
            n_p=n,
            n_q=0,
        )
    )


@st.composite
def affine_kirchhoff_relations(
    draw: st.DrawFn, modulus: Prime, max_wires: int = 4
) -> DoubledRelation:
    """Kirchhoff direction plus an offset whose momenta sum to zero."""
    direction = draw(kirchhoff_relations(modulus, max_wires, with_dom=True))
    N = direction.n_wires
    q0 = draw(st.lists(elements(modulus), min_size=N, max_size=N))
    s0 = draw(st.lists(elements(modulus), min_size=N, max_size=N))
    s0[-1] = -sum(s0[:-1]) % modulus.p
    state = AffineSubspace(2 * N, modulus, direction.state.basis, tuple(q0 + s0))
    return DoubledRelation(direction.dom, direction.cod, state)
