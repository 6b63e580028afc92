"""Tests for the Kirchhoff layer: current law, determinism and graph states."""

import sys
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent / "scripts"))

import exactmat as em
import kirrel as kr
import lagrel as lg
from conftest import (
    F3,
    F5,
    F7,
    admittances,
    affine_kirchhoff_relations,
    all_lagrangian_states,
    deterministic_relations,
    graph_states,
    kirchhoff_relations,
    lagrangian_relations,
    mat,
    permutations,
)
from errors import (
    AffineRelationError,
    KirrelError,
    NotDeterministicError,
    NotGraphStateError,
    NotKirchhoffError,
    NotLagrangianError,
    ShapeError,
)
from exactmat import Permutation
from gfp import Prime
from kirrel import GraphStateForm
from lagrel import DoubledRelation, LagrangianStandardForm
from linrel import AffineSubspace

MESH_Y = [[4, 6, 4], [6, 3, 5], [4, 5, 5]]


def resistor(y: int, modulus: Prime) -> DoubledRelation:
    rows = [[1, 0, -y, y], [0, 1, y, -y]]
    return DoubledRelation(1, 1, AffineSubspace(4, modulus, mat(rows, modulus)))


def divider(w: int, modulus: Prime) -> DoubledRelation:
    """Two inputs, one output at the weighted average of the input positions."""
    rows = [[1, 0, 1 - w, 0, 0, 0], [0, 1, w, 0, 0, 0], [0, 0, 0, w - 1, -w, 1]]
    return DoubledRelation(2, 1, AffineSubspace(6, modulus, mat(rows, modulus)))


def three_class_relation() -> DoubledRelation:
    """Six wires; 3 copies 1, 4 and 5 copy 2, wire 0 stands alone."""
    form = LagrangianStandardForm(
        Y=em.zeros(3, 3, F5),
        A=mat([[0, 1, 0], [0, 0, 1], [0, 0, 1]], F5),
        sigma=Permutation.identity(6),
        n_p=3,
        n_q=3,
    )
    return lg.state_from_standard_form(form, dom=2)


def q_pinned() -> DoubledRelation:
    """One wire held at position zero with free momentum."""
    return DoubledRelation(0, 1, AffineSubspace(2, F5, mat([[0, 1]], F5)))


def noether_views(relation: DoubledRelation) -> tuple[bool, bool, bool]:
    return (
        kr.satisfies_kcl(relation),
        kr.is_translation_invariant(relation),
        kr.satisfies_standard_form_criterion(relation),
    )


class TestCurrentLaw:
    def test_equivalence_exhaustive(self) -> None:
        """Over F_3 with two wires the three characterizations agree."""
        kirchhoff = 0
        for state in all_lagrangian_states(2, F3):
            kcl, invariant, criterion = noether_views(state)
            assert kcl == invariant == criterion
            kirchhoff += kcl
        assert 0 < kirchhoff < len(all_lagrangian_states(2, F3))

    @settings(max_examples=500)
    @given(st.data())
    def test_equivalence_random(self, data: st.DataObject) -> None:
        relation = data.draw(lagrangian_relations(F5, with_dom=True))
        kcl, invariant, criterion = noether_views(relation)
        assert kcl == invariant == criterion

    @given(st.data())
    def test_kirchhoff_relations_pass(self, data: st.DataObject) -> None:
        relation = data.draw(kirchhoff_relations(F7, with_dom=True))
        assert noether_views(relation) == (True, True, True)
        assert kr.is_kirchhoff(relation)

    def test_pinned_position_fails(self) -> None:
        """Fixing q breaks translation invariance and leaves momentum unbalanced."""
        assert noether_views(q_pinned()) == (False, False, False)

    def test_resistor_and_divider(self) -> None:
        assert kr.is_kirchhoff(resistor(3, F7))
        assert kr.is_kirchhoff(divider(2, F5))

    def test_requires_lagrangian(self) -> None:
        state = AffineSubspace(4, F5, mat([[1, 0, 0, 0], [0, 0, 1, 0]], F5))
        with pytest.raises(NotLagrangianError):
            kr.satisfies_kcl(DoubledRelation(0, 2, state))

    @given(st.data())
    def test_affine_offsets_with_balanced_momentum(self, data: st.DataObject) -> None:
        relation = data.draw(affine_kirchhoff_relations(F5))
        assert kr.satisfies_kcl(relation)
        assert kr.is_translation_invariant(relation)

    def test_current_injection_breaks_kcl(self) -> None:
        """A wire whose momentum jumps by a constant is translation invariant but not Kirchhoff."""
        wire = lg.identity(1, F5).state
        injected = DoubledRelation(1, 1, AffineSubspace(4, F5, wire.basis, (0, 0, 0, 3)))
        assert kr.is_translation_invariant(injected)
        assert not kr.satisfies_kcl(injected)

    def test_empty_is_not_invariant(self) -> None:
        assert not kr.is_translation_invariant(
            DoubledRelation(1, 1, AffineSubspace.empty(4, F5))
        )

    @given(st.data())
    def test_closed_under_composition(self, data: st.DataObject) -> None:
        r1 = data.draw(kirchhoff_relations(F5, with_dom=True))
        r2 = data.draw(kirchhoff_relations(F5, dom=r1.cod))
        assert kr.is_kirchhoff(lg.compose(r1, r2))
        assert kr.is_kirchhoff(lg.tensor(r1, r2))
        assert kr.is_kirchhoff(lg.converse(r1))


class TestDeterminism:
    def test_examples(self) -> None:
        assert kr.is_deterministic(lg.identity(2, F5))
        assert kr.is_deterministic(resistor(3, F7))
        assert not kr.is_deterministic(divider(2, F5))

    @settings(max_examples=50)
    @given(st.data())
    def test_independent_of_wire_priority(self, data: st.DataObject) -> None:
        """The answer does not depend on which wires end up position-free."""
        relation = data.draw(kirchhoff_relations(F5))
        expected = kr.is_deterministic(relation)
        for _ in range(20):
            priority = list(data.draw(permutations(relation.n_wires)).images)
            assert kr.is_deterministic(relation, priority) == expected

    @settings(max_examples=50)
    @given(st.data())
    def test_deterministic_under_every_priority(self, data: st.DataObject) -> None:
        """A deterministic relation stays deterministic whichever wires are preferred."""
        relation = data.draw(deterministic_relations(F5))
        assert kr.is_deterministic(relation) is True
        for _ in range(20):
            priority = list(data.draw(permutations(relation.n_wires)).images)
            assert kr.is_deterministic(relation, priority) is True

    def test_partition(self) -> None:
        relation = three_class_relation()
        partition = kr.position_partition(relation)
        assert partition == ((0,), (1, 3), (2, 4, 5))
        assert kr.partition_labels(relation, partition) == [
            ["in0"],
            ["in1", "out1"],
            ["out0", "out2", "out3"],
        ]

    def test_partition_needs_determinism(self) -> None:
        with pytest.raises(NotDeterministicError):
            kr.position_partition(divider(2, F5))

    def test_resistor_partition_is_discrete(self) -> None:
        assert kr.position_partition(resistor(3, F7)) == ((0,), (1,))

    @given(st.data())
    def test_partition_covers_wires(self, data: st.DataObject) -> None:
        relation = data.draw(deterministic_relations(F5))
        partition = kr.position_partition(relation)
        assert sorted(w for cls in partition for w in cls) == list(range(relation.n_wires))


class TestMomentumGrouping:
    def test_partition_groups_momenta(self) -> None:
        relation = three_class_relation()
        assert kr.is_momentum_grouped(relation, ((0,), (1, 3), (2, 4, 5)))
        assert not kr.is_momentum_grouped(relation, ((0, 1), (3,), (2, 4, 5)))
        assert not kr.is_momentum_grouped(relation, ((0,), (1,), (3,), (2, 4, 5)))

    @given(st.data())
    def test_matches_position_partition(self, data: st.DataObject) -> None:
        relation = data.draw(deterministic_relations(F5))
        assert kr.is_momentum_grouped(relation, kr.position_partition(relation))

    def test_resistor(self) -> None:
        assert kr.is_momentum_grouped(resistor(3, F7), ((0,), (1,)))

    def test_rejects_affine(self) -> None:
        wire = lg.identity(1, F5).state
        shifted = DoubledRelation(1, 1, AffineSubspace(4, F5, wire.basis, (1, 0, 0, 0)))
        with pytest.raises(AffineRelationError):
            kr.is_momentum_grouped(shifted, ((0, 1),))

    def test_rejects_bad_partition(self) -> None:
        with pytest.raises(ShapeError, match="cover"):
            kr.is_momentum_grouped(resistor(3, F7), ((0,),))

    def test_rejects_too_many_wires(self) -> None:
        wires = lg.identity(9, F3)
        singletons = tuple((w,) for w in range(18))
        with pytest.raises(KirrelError, match="limited"):
            kr.is_momentum_grouped(wires, singletons)


class TestGraphStates:
    @given(st.data())
    def test_canonical_round_trip(self, data: st.DataObject) -> None:
        state = data.draw(graph_states(F7))
        assert kr.is_graph_state(state)
        form = kr.graph_state_canonical(state)
        assert kr.relation_from_admittance(form) == state

    @given(st.data())
    def test_admittance_round_trip(self, data: st.DataObject) -> None:
        n = data.draw(st.integers(1, 5))
        Y = data.draw(admittances(F5, n))
        assert kr.graph_state_canonical(kr.relation_from_admittance(Y)).Y == Y

    @settings(max_examples=100)
    @given(st.data())
    def test_canonical_admittance_ignores_presentation(self, data: st.DataObject) -> None:
        """Reordered and redundant generators give back the same admittance."""
        n = data.draw(st.integers(1, 5))
        Y = data.draw(admittances(F7, n))
        state = kr.relation_from_admittance(Y)
        kb = em.kernel_basis(state.state.parity_check())
        reordered = em.from_rows(kb.tolist()[::-1], F7, cols=2 * n)
        other = DoubledRelation(0, n, AffineSubspace(2 * n, F7, em.vstack(reordered, kb, kb)))
        assert kr.graph_state_canonical(state).Y == Y
        assert kr.graph_state_canonical(other).Y == Y

    def test_mesh_admittance(self) -> None:
        state = kr.relation_from_admittance(mat(MESH_Y, F7))
        assert kr.is_graph_state(state)
        assert kr.graph_state_canonical(state).n == 3

    def test_resistor_state(self) -> None:
        state = lg.relation_to_state(resistor(3, F7))
        assert kr.graph_state_canonical(state).Y == mat([[3, 4], [4, 3]], F7)

    def test_non_graph_states(self) -> None:
        """Copy constraints, unbalanced momentum and offsets all disqualify."""
        assert not kr.is_graph_state(lg.identity(1, F5))
        assert not kr.is_graph_state(q_pinned())
        wire = lg.identity(1, F5).state
        shifted = DoubledRelation(1, 1, AffineSubspace(4, F5, wire.basis, (1, 0, 0, 0)))
        assert not kr.is_graph_state(shifted)
        with pytest.raises(NotGraphStateError):
            kr.graph_state_canonical(lg.identity(1, F5))

    @pytest.mark.parametrize(
        ("rows", "error"),
        [
            ([[1, 2, 3]], ShapeError),
            ([[1, 2], [3, 4]], NotKirchhoffError),
            ([[1, 0], [0, 1]], NotKirchhoffError),
        ],
    )
    def test_invalid_admittance(self, rows: list[list[int]], error: type[Exception]) -> None:
        with pytest.raises(error):
            GraphStateForm(mat(rows, F5))
        with pytest.raises(error):
            kr.relation_from_admittance(mat(rows, F5))


class TestClassify:
    def test_resistor(self) -> None:
        r = resistor(3, F7)
        c = kr.classify(r)
        assert c.is_kirchhoff
        assert c.is_deterministic
        assert not c.is_lossless
        assert c.is_graph_state
        assert c.partition == ((0,), (1,))
        assert kr.format_classification(c, r) == (
            "kirchhoff=true deterministic=true lossless=false graph_state=true\n"
            "partition=in0|out0\n"
            "admittance\n"
            "p 7 2 2\n"
            "3 4\n"
            "4 3\n"
        )

    def test_divider(self) -> None:
        r = divider(2, F5)
        c = kr.classify(r)
        assert (c.is_kirchhoff, c.is_deterministic, c.is_graph_state) == (True, False, False)
        assert c.partition is None
        assert c.admittance is None
        assert kr.format_classification(c, r) == (
            "kirchhoff=true deterministic=false lossless=true graph_state=false\n"
        )

    def test_three_classes(self) -> None:
        r = three_class_relation()
        assert kr.format_classification(kr.classify(r), r) == (
            "kirchhoff=true deterministic=true lossless=true graph_state=false\n"
            "partition=in0|in1,out1|out0,out2,out3\n"
        )

    def test_empty_relation(self) -> None:
        """An inconsistent relation has no members, so only losslessness holds."""
        r = DoubledRelation(1, 1, AffineSubspace.empty(4, F5))
        c = kr.classify(r)
        assert (c.is_kirchhoff, c.is_deterministic, c.is_graph_state) == (False, False, False)
        assert c.is_lossless
        assert c.partition is None
        assert kr.format_classification(c, r) == (
            "kirchhoff=false deterministic=false lossless=true graph_state=false\n"
        )

    def test_pinned_wire(self) -> None:
        c = kr.classify(q_pinned())
        assert not c.is_kirchhoff
        assert not c.is_graph_state
