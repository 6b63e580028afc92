"""Electrical generators, netlists, evaluation and synthesis.

A netlist is a set of generators whose ports are either wired pairwise or
listed once on the boundary. Evaluation assembles one big affine system over
a position and a state momentum per port, then projects onto the boundary.

Port conventions follow the state coordinates of :mod:`lagrel`: every port
carries ``(q, s)`` with ``s = p`` on input ports and ``s = -p`` on output
ports. A wire identifies positions and cancels state momenta
(``q_a = q_b``, ``s_a + s_b = 0``), whichever sides it joins.
"""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

import exactmat as em
import kirrel as kr
import lagrel as lg
from errors import (
    AffineRelationError,
    InvalidParameterError,
    KirrelError,
    NetlistError,
    NotKirchhoffError,
    ParseError,
)
from exactmat import ExactMatrix, Permutation
from gfp import Prime
from lagrel import DoubledRelation
from linrel import AffineSubspace

type Side = Literal["in", "out"]


class GeneratorKind(StrEnum):
    """Generator names as they appear in netlist files."""

    UNIT = "unit"
    COUNIT = "counit"
    MONOID = "monoid"
    COMONOID = "comonoid"
    IDENTITY = "identity"
    SWAP = "swap"
    CUP = "cup"
    CAP = "cap"
    RESISTOR = "resistor"
    DIVIDER_IN = "divider-in"
    DIVIDER_OUT = "divider-out"
    VOLTAGE = "voltage"
    CURRENT = "current"


ARITY: dict[GeneratorKind, tuple[int, int]] = {
    GeneratorKind.UNIT: (0, 1),
    GeneratorKind.COUNIT: (1, 0),
    GeneratorKind.MONOID: (2, 1),
    GeneratorKind.COMONOID: (1, 2),
    GeneratorKind.IDENTITY: (1, 1),
    GeneratorKind.SWAP: (2, 2),
    GeneratorKind.CUP: (2, 0),
    GeneratorKind.CAP: (0, 2),
    GeneratorKind.RESISTOR: (1, 1),
    GeneratorKind.DIVIDER_IN: (2, 1),
    GeneratorKind.DIVIDER_OUT: (1, 2),
    GeneratorKind.VOLTAGE: (1, 1),
    GeneratorKind.CURRENT: (1, 1),
}

PARAMETRIC = frozenset({
    GeneratorKind.RESISTOR,
    GeneratorKind.DIVIDER_IN,
    GeneratorKind.DIVIDER_OUT,
    GeneratorKind.VOLTAGE,
    GeneratorKind.CURRENT,
})

SPIDERS = frozenset({
    GeneratorKind.UNIT,
    GeneratorKind.COUNIT,
    GeneratorKind.MONOID,
    GeneratorKind.COMONOID,
    GeneratorKind.IDENTITY,
    GeneratorKind.CUP,
    GeneratorKind.CAP,
})


# --- Netlist models ---


class StrictModel(BaseModel):
    """Frozen pydantic model that rejects unknown fields."""

    model_config = ConfigDict(extra="forbid", frozen=True)


class Generator(StrictModel):
    """One component; ``param`` is a conductance, weight, voltage or current."""

    kind: GeneratorKind
    param: int | None = None

    @property
    def arity(self) -> tuple[int, int]:
        """``(inputs, outputs)`` of this kind."""
        return ARITY[self.kind]


class Port(StrictModel):
    """Port ``index`` on the ``side`` of generator ``gen``, printed ``g<gen>.<side><index>``."""

    gen: int = Field(ge=0)
    side: Side
    index: int = Field(ge=0)

    def __str__(self) -> str:
        return f"g{self.gen}.{self.side}{self.index}"


class Netlist(StrictModel):
    """Generators, internal wires and the ordered boundary.

    Each wire joins two ports. Boundary inputs and outputs are listed in the
    order they appear in the evaluated relation.
    """

    modulus: int
    generators: tuple[Generator, ...] = ()
    wires: tuple[tuple[Port, Port], ...] = ()
    inputs: tuple[Port, ...] = ()
    outputs: tuple[Port, ...] = ()

    @property
    def prime(self) -> Prime:
        """The modulus, validated as a prime."""
        return Prime(self.modulus)

    def kinds(self) -> set[GeneratorKind]:
        """Kinds used at least once."""
        return {g.kind for g in self.generators}


@dataclass(frozen=True)
class MeshSpec:
    """Resistor mesh: ``conductances[(i, j)]`` joins nodes ``i < j``."""

    node_count: int
    conductances: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        normalized: dict[tuple[int, int], int] = {}
        for (i, j), y in self.conductances.items():
            if i == j:
                msg = f"Mesh edge ({i}, {j}) is a self-loop"
                raise InvalidParameterError(msg, details={"edge": (i, j)})
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                msg = f"Mesh edge ({i}, {j}) outside {self.node_count} nodes"
                raise InvalidParameterError(msg, details={"edge": (i, j)})
            key = (min(i, j), max(i, j))
            if key in normalized and normalized[key] != y:
                msg = f"Conflicting conductances on edge {key}"
                raise InvalidParameterError(msg, details={"edge": key})
            normalized[key] = y
        object.__setattr__(self, "conductances", dict(sorted(normalized.items())))

    def edges(self, modulus: Prime) -> list[tuple[int, int, int]]:
        """Nonzero edges ``(i, j, y)`` in sorted order."""
        return [
            (i, j, y % modulus.p) for (i, j), y in self.conductances.items() if y % modulus.p
        ]


# --- Generator semantics ---


def _spider_state(k: int, modulus: Prime) -> ExactMatrix:
    """All positions equal; state momenta sum to zero."""
    rows = [[1] * k + [0] * k]
    for i in range(1, k):
        s = [0] * k
        s[0], s[i] = 1, -1
        rows.append([0] * k + s)
    return em.from_rows(rows, modulus, cols=2 * k)


def _divider_in(w: int, modulus: Prime) -> DoubledRelation:
    """``q3 = (1-w) q1 + w q2`` and ``p1 = (1-w) p3``, ``p2 = w p3``."""
    p = modulus.p
    if w % p in {0, 1}:
        msg = f"Divider weight must avoid 0 and 1, got {w % p}"
        raise InvalidParameterError(msg, details={"w": w % p})
    basis = em.from_rows(
        [
            [1, 0, 1 - w, 0, 0, 0],
            [0, 1, w, 0, 0, 0],
            [0, 0, 0, w - 1, -w, 1],
        ],
        modulus,
    )
    return DoubledRelation(2, 1, AffineSubspace(6, modulus, basis))


def _through_wire(offset: tuple[int, int, int, int], modulus: Prime) -> DoubledRelation:
    basis = em.from_rows([[1, 1, 0, 0], [0, 0, 1, -1]], modulus)
    return DoubledRelation(1, 1, AffineSubspace(4, modulus, basis, offset))


def generator_relation(gen: Generator, modulus: Prime) -> DoubledRelation:
    """The relation a single generator imposes on its ports.

    Raises:
        NetlistError: If a parameter is missing or spurious.
        InvalidParameterError: If a divider weight is 0 or 1.

    """
    _check_param(gen)
    m, n = gen.arity
    if gen.kind in SPIDERS:
        state = AffineSubspace(2 * (m + n), modulus, _spider_state(m + n, modulus))
        return DoubledRelation(m, n, state)
    param = (gen.param or 0) % modulus.p
    match gen.kind:
        case GeneratorKind.SWAP:
            return lg.symplectic_permutation(Permutation((1, 0)), modulus)
        case GeneratorKind.RESISTOR:
            basis = em.from_rows([[1, 0, -param, param], [0, 1, param, -param]], modulus)
            return DoubledRelation(1, 1, AffineSubspace(4, modulus, basis))
        case GeneratorKind.DIVIDER_IN:
            return _divider_in(param, modulus)
        case GeneratorKind.DIVIDER_OUT:
            return lg.converse(_divider_in(param, modulus))
        case GeneratorKind.VOLTAGE:
            return _through_wire((0, param, 0, 0), modulus)
        case GeneratorKind.CURRENT:
            return _through_wire((0, 0, 0, -param), modulus)
    msg = f"Unknown generator kind {gen.kind!r}"
    raise NetlistError(msg, details={"kind": str(gen.kind)})


def _check_param(gen: Generator) -> None:
    if gen.kind in PARAMETRIC and gen.param is None:
        msg = f"Generator '{gen.kind}' needs a parameter"
        raise NetlistError(msg, details={"kind": str(gen.kind)})
    if gen.kind not in PARAMETRIC and gen.param is not None:
        msg = f"Generator '{gen.kind}' takes no parameter"
        raise NetlistError(msg, details={"kind": str(gen.kind), "param": gen.param})


def divider_relation_check(
    w: int, modulus: Prime
) -> tuple[DoubledRelation, kr.KirchhoffClassification]:
    """A two-input divider with weight ``w`` and its classification.

    Raises:
        InvalidParameterError: If ``w`` is 0 or 1 modulo p.

    """
    relation = generator_relation(Generator(kind=GeneratorKind.DIVIDER_IN, param=w), modulus)
    return relation, kr.classify(relation)


# --- Structure and evaluation ---


def _port_wire(net: Netlist, offsets: list[int], port: Port) -> int:
    if port.gen >= len(net.generators):
        msg = f"Port {port} refers to a missing generator"
        raise NetlistError(msg, details={"port": str(port)})
    m, n = net.generators[port.gen].arity
    limit = m if port.side == "in" else n
    if port.index >= limit:
        msg = f"Port {port} out of range for '{net.generators[port.gen].kind}'"
        raise NetlistError(msg, details={"port": str(port)})
    return offsets[port.gen] + port.index + (m if port.side == "out" else 0)


def _wire_offsets(net: Netlist) -> list[int]:
    offsets = [0]
    for gen in net.generators:
        offsets.append(offsets[-1] + sum(gen.arity))
    return offsets


def check_structure(net: Netlist) -> None:
    """Every port is wired once or on the boundary once.

    Raises:
        NetlistError: On a dangling, reused or unknown port, or a bad parameter.

    """
    prime = net.prime
    for gen in net.generators:
        _check_param(gen)
        if gen.kind in {GeneratorKind.DIVIDER_IN, GeneratorKind.DIVIDER_OUT}:
            _divider_in(gen.param or 0, prime)
    offsets = _wire_offsets(net)
    uses = np.zeros(offsets[-1], dtype=np.int64)
    endpoints = [p for pair in net.wires for p in pair] + [*net.inputs, *net.outputs]
    for port in endpoints:
        uses[_port_wire(net, offsets, port)] += 1
    if (uses != 1).any():
        ports = _all_ports(net)
        dangling = [str(ports[i]) for i in np.flatnonzero(uses == 0)]
        reused = [str(ports[i]) for i in np.flatnonzero(uses > 1)]
        msg = f"Ports not used exactly once: dangling={dangling} reused={reused}"
        raise NetlistError(msg, details={"dangling": dangling, "reused": reused})


def _all_ports(net: Netlist) -> list[Port]:
    ports = []
    for g, gen in enumerate(net.generators):
        m, n = gen.arity
        ports.extend(Port(gen=g, side="in", index=i) for i in range(m))
        ports.extend(Port(gen=g, side="out", index=j) for j in range(n))
    return ports


def eval_netlist(net: Netlist) -> DoubledRelation:
    """The relation between the boundary ports, inputs before outputs.

    Inconsistent sources give the empty relation rather than an error.
    """
    check_structure(net)
    modulus = net.prime
    offsets = _wire_offsets(net)
    W = offsets[-1]
    rows: list[np.ndarray] = []
    rhs: list[int] = []
    for g, gen in enumerate(net.generators):
        state = generator_relation(gen, modulus).state
        H = state.parity_check()
        k = sum(gen.arity)
        cols = [offsets[g] + t for t in range(k)] + [W + offsets[g] + t for t in range(k)]
        for row, value in zip(
            H.entries, em.mat_vec(H, state.offset_vector), strict=True
        ):
            full = np.zeros(2 * W, dtype=np.int64)
            full[cols] = row
            rows.append(full)
            rhs.append(int(value))
    for a, b in net.wires:
        wa, wb = _port_wire(net, offsets, a), _port_wire(net, offsets, b)
        positions = np.zeros(2 * W, dtype=np.int64)
        positions[wa] += 1
        positions[wb] -= 1
        momenta = np.zeros(2 * W, dtype=np.int64)
        momenta[W + wa] += 1
        momenta[W + wb] += 1
        rows.extend([positions, momenta])
        rhs.extend([0, 0])
    entries = np.array(rows, dtype=np.int64) if rows else np.zeros((0, 2 * W), dtype=np.int64)
    system = ExactMatrix(entries, modulus)
    dom, cod = len(net.inputs), len(net.outputs)
    B = dom + cod
    solution = em.solve(system, rhs)
    if solution is None:
        return DoubledRelation(dom, cod, AffineSubspace.empty(2 * B, modulus))
    particular, kernel = solution
    boundary = [_port_wire(net, offsets, p) for p in (*net.inputs, *net.outputs)]
    cols = boundary + [W + w for w in boundary]
    state = AffineSubspace(
        2 * B,
        modulus,
        em.block(kernel, slice(None), cols),
        tuple(int(x) for x in particular[cols]),
    )
    return DoubledRelation(dom, cod, state)


# --- Construction ---


class NetlistBuilder:
    """Incremental netlist construction; :meth:`build` checks the structure."""

    def __init__(self, modulus: Prime) -> None:
        self.modulus = modulus
        self.generators: list[Generator] = []
        self.wires: list[tuple[Port, Port]] = []
        self.inputs: list[Port] = []
        self.outputs: list[Port] = []

    def add(self, kind: GeneratorKind, param: int | None = None) -> int:
        """Append a generator and return its index.

        Raises:
            NetlistError: If ``param`` is missing or spurious for ``kind``.

        """
        gen = Generator(kind=kind, param=None if param is None else param % self.modulus.p)
        _check_param(gen)
        self.generators.append(gen)
        return len(self.generators) - 1

    def port(self, gen: int, side: Side, index: int = 0) -> Port:
        """Shorthand for :class:`Port`."""
        return Port(gen=gen, side=side, index=index)

    def wire(self, a: Port, b: Port) -> None:
        """Join two ports; either may be an input or an output."""
        self.wires.append((a, b))

    def add_input(self, port: Port) -> None:
        """Expose ``port`` as the next boundary input."""
        self.inputs.append(port)

    def add_output(self, port: Port) -> None:
        """Expose ``port`` as the next boundary output."""
        self.outputs.append(port)

    def spider(self, k: int) -> list[Port]:
        """Add a spider with ``k`` free ports built from units, identities and comonoids."""
        if k < 1:
            msg = f"Spider needs at least one port, got {k}"
            raise InvalidParameterError(msg, details={"k": k})
        if k == 1:
            return [self.port(self.add(GeneratorKind.UNIT), "out")]
        if k == 2:  # noqa: PLR2004
            g = self.add(GeneratorKind.IDENTITY)
            return [self.port(g, "in"), self.port(g, "out")]
        first = self.add(GeneratorKind.COMONOID)
        ports = [self.port(first, "in"), self.port(first, "out", 0)]
        last = first
        for _ in range(k - 3):
            nxt = self.add(GeneratorKind.COMONOID)
            self.wire(self.port(last, "out", 1), self.port(nxt, "in"))
            ports.append(self.port(nxt, "out", 0))
            last = nxt
        ports.append(self.port(last, "out", 1))
        return ports

    def build(self) -> Netlist:
        """Freeze into a :class:`Netlist`.

        Raises:
            NetlistError: If a port is dangling, reused or out of range.
            InvalidParameterError: If a divider weight is 0 or 1.

        """
        net = Netlist(
            modulus=self.modulus.p,
            generators=tuple(self.generators),
            wires=tuple(self.wires),
            inputs=tuple(self.inputs),
            outputs=tuple(self.outputs),
        )
        check_structure(net)
        return net


def _node_spiders(builder: NetlistBuilder, counts: list[int]) -> list[Iterator[Port]]:
    return [iter(builder.spider(k)) for k in counts]


def _wire_mesh(
    builder: NetlistBuilder,
    nodes: list[Iterator[Port]],
    edges: list[tuple[int, int, int]],
) -> None:
    for i, j, y in edges:
        r = builder.add(GeneratorKind.RESISTOR, y)
        builder.wire(builder.port(r, "in"), next(nodes[i]))
        builder.wire(builder.port(r, "out"), next(nodes[j]))


def _degrees(n: int, edges: list[tuple[int, int, int]]) -> list[int]:
    degree = [0] * n
    for i, j, _ in edges:
        degree[i] += 1
        degree[j] += 1
    return degree


def mesh_netlist(spec: MeshSpec, modulus: Prime) -> Netlist:
    """One spider per node with a boundary output, one resistor per nonzero edge."""
    builder = NetlistBuilder(modulus)
    edges = spec.edges(modulus)
    nodes = _node_spiders(builder, [1 + d for d in _degrees(spec.node_count, edges)])
    boundary = [next(node) for node in nodes]
    _wire_mesh(builder, nodes, edges)
    for port in boundary:
        builder.add_output(port)
    return builder.build()


def _conductances(Y: ExactMatrix) -> dict[tuple[int, int], int]:
    p = Y.p
    return {
        (i, j): int(-Y.entries[i, j] % p)
        for i in range(Y.rows)
        for j in range(i + 1, Y.rows)
        if Y.entries[i, j]
    }


def synth_graph_state(Y: kr.GraphStateForm | ExactMatrix) -> Netlist:
    """Resistor mesh with ``y_ij = -Y_ij`` whose evaluation is the state ``s = -Yq``."""
    form = Y if isinstance(Y, kr.GraphStateForm) else kr.GraphStateForm(Y)
    return mesh_netlist(MeshSpec(form.n, _conductances(form.Y)), form.Y.modulus)


def _chain_order(entries: list[tuple[int, int]], p: int) -> list[tuple[int, int]]:
    """Order ``(node, weight)`` pairs so every proper prefix sum is nonzero.

    Entries sum to 1. When every remaining weight would zero the prefix they
    are all equal; the first is split in two and both halves re-enter.
    """
    remaining = list(entries)
    ordered: list[tuple[int, int]] = []
    total = 0
    while remaining:
        if len(remaining) == 1:
            ordered.append(remaining.pop())
            break
        pick = next(
            (k for k, (_, a) in enumerate(remaining) if (total + a) % p), None
        )
        if pick is None:
            node, c = remaining.pop(0)
            c1 = next(v for v in range(1, p) if v != c)
            remaining.insert(0, (node, (c - c1) % p))
            ordered.append((node, c1))
            total = (total + c1) % p
            continue
        node, a = remaining.pop(pick)
        ordered.append((node, a))
        total = (total + a) % p
    return ordered


def _divider_chain(
    builder: NetlistBuilder, nodes: list[Iterator[Port]], chain: list[tuple[int, int]]
) -> Port:
    """Port carrying ``Σ a_t q_{node_t}``, with momentum fed back ``a_t`` to each node."""
    p = builder.modulus.p
    node, total = chain[0]
    prefix = next(nodes[node])
    for node, a in chain[1:]:
        total = (total + a) % p
        d = builder.add(GeneratorKind.DIVIDER_IN, a * pow(total, -1, p))
        builder.wire(prefix, builder.port(d, "in", 0))
        builder.wire(next(nodes[node]), builder.port(d, "in", 1))
        prefix = builder.port(d, "out")
    return prefix


def _kirchhoff_netlist(direction: DoubledRelation) -> tuple[NetlistBuilder, list[Port]]:
    """Mesh over the position-free wires plus a divider layer for the rest."""
    form = lg.lagrangian_standard_form(direction)
    modulus = direction.modulus
    p = modulus.p
    order = form.sigma.order()
    P, Q = order[: form.n_p], order[form.n_p :]
    edges = MeshSpec(form.n_p, _conductances(form.Y)).edges(modulus)
    chains = [
        _chain_order([(k, int(a)) for k, a in enumerate(row) if a], p)
        for row in form.A.entries
    ]
    counts = [1 + d for d in _degrees(form.n_p, edges)]
    for chain in chains:
        for node, _ in chain:
            counts[node] += 1
    builder = NetlistBuilder(modulus)
    nodes = _node_spiders(builder, counts)
    boundary: dict[int, Port] = {wire: next(nodes[k]) for k, wire in enumerate(P)}
    _wire_mesh(builder, nodes, edges)
    for wire, chain in zip(Q, chains, strict=True):
        boundary[wire] = _divider_chain(builder, nodes, chain)
    return builder, [boundary[w] for w in range(direction.n_wires)]


def _finish(builder: NetlistBuilder, ports: list[Port], dom: int) -> Netlist:
    for w, port in enumerate(ports):
        if w < dom:
            builder.add_input(port)
        else:
            builder.add_output(port)
    return builder.build()


def synth_kirchhoff(relation: DoubledRelation) -> Netlist:
    """Spiders, resistors and current dividers evaluating to ``relation``.

    Deterministic relations need no dividers.

    Raises:
        AffineRelationError: If the relation is affine; use :func:`synth_affine`.
        NotKirchhoffError: If the relation breaks the current law.

    """
    if not relation.is_linear:
        msg = "synth_kirchhoff needs a linear relation"
        raise AffineRelationError(msg, details={"offset": relation.state.offset})
    if not kr.satisfies_kcl(relation):
        msg = "Relation is not Kirchhoff"
        raise NotKirchhoffError(msg, details={"dom": relation.dom, "cod": relation.cod})
    builder, ports = _kirchhoff_netlist(relation)
    return _finish(builder, ports, relation.dom)


def synth_affine(relation: DoubledRelation) -> Netlist:
    """:func:`synth_kirchhoff` on the direction plus sources for the offset.

    Current sources are emitted in sets whose values sum to zero.

    Raises:
        NotKirchhoffError: If the relation is empty or its offset momenta do not
            sum to zero.

    """
    if relation.is_empty or not kr.satisfies_kcl(relation):
        msg = "Relation is not affine Kirchhoff"
        raise NotKirchhoffError(msg, details={"dom": relation.dom, "cod": relation.cod})
    builder, ports = _kirchhoff_netlist(relation.direction())
    N = relation.n_wires
    offset = relation.state.offset
    for w in range(N):
        is_input = w < relation.dom
        q0, s0 = offset[w], offset[N + w]
        sources = [
            (GeneratorKind.VOLTAGE, -q0 if is_input else q0),
            (GeneratorKind.CURRENT, -s0),
        ]
        for kind, value in sources:
            if not value % builder.modulus.p:
                continue
            g = builder.add(kind, value)
            if is_input:
                builder.wire(builder.port(g, "out"), ports[w])
                ports[w] = builder.port(g, "in")
            else:
                builder.wire(ports[w], builder.port(g, "in"))
                ports[w] = builder.port(g, "out")
    return _finish(builder, ports, relation.dom)


# --- Horizontal resistors and mesh algebra ---


def c_matrix(y: int, i: int, j: int, n: int, modulus: Prime) -> ExactMatrix:
    """``[[1, 0], [Y_ij(y), 1]]`` with ``Y_ii = Y_jj = y`` and ``Y_ij = Y_ji = -y``.

    Raises:
        InvalidParameterError: If ``i == j`` or an index is outside ``0..n-1``.

    """
    if i == j:
        msg = f"Horizontal resistor needs two distinct wires, got {i} twice"
        raise InvalidParameterError(msg, details={"i": i, "j": j})
    if not (0 <= i < n and 0 <= j < n):
        msg = f"Wires ({i}, {j}) outside 0..{n - 1}"
        raise InvalidParameterError(msg, details={"i": i, "j": j, "n": n})
    C = np.eye(2 * n, dtype=np.int64)
    C[n + i, i] += y
    C[n + j, j] += y
    C[n + i, j] -= y
    C[n + j, i] -= y
    return ExactMatrix(C % modulus.p, modulus)


def mesh_product(spec: MeshSpec, modulus: Prime) -> ExactMatrix:
    """``∏ C_ij(y_ij)`` over the mesh edges."""
    product = em.identity(2 * spec.node_count, modulus)
    for (i, j), y in spec.conductances.items():
        product = product @ c_matrix(y, i, j, spec.node_count, modulus)
    return product


def horizontal_resistor(y: int, i: int, j: int, n: int, modulus: Prime) -> DoubledRelation:
    """Graph of :func:`c_matrix`: a resistor ``y`` bridging wires ``i`` and ``j``."""
    return lg.from_symplectic_matrix(c_matrix(y, i, j, n, modulus))


def horizontal_resistor_netlist(y: int, modulus: Prime) -> Netlist:
    """Two through-wires bridged by a resistor via a comonoid and a monoid."""
    builder = NetlistBuilder(modulus)
    split = builder.add(GeneratorKind.COMONOID)
    r = builder.add(GeneratorKind.RESISTOR, y)
    merge = builder.add(GeneratorKind.MONOID)
    builder.wire(builder.port(split, "out", 1), builder.port(r, "in"))
    builder.wire(builder.port(r, "out"), builder.port(merge, "in", 1))
    builder.add_input(builder.port(split, "in"))
    builder.add_input(builder.port(merge, "in", 0))
    builder.add_output(builder.port(split, "out", 0))
    builder.add_output(builder.port(merge, "out"))
    return builder.build()


# --- Text and JSON formats ---


def format_netlist(net: Netlist) -> str:
    """Text form: header, one line per generator, then wires and boundary."""
    lines = [f"netlist p {net.modulus}"]
    for g, gen in enumerate(net.generators):
        param = "" if gen.param is None else f" {gen.param}"
        lines.append(f"g{g} {gen.kind}{param}")
    lines.extend(f"w {a} {b}" for a, b in net.wires)
    lines.extend(f"in {port}" for port in net.inputs)
    lines.extend(f"out {port}" for port in net.outputs)
    return "\n".join(lines) + "\n"


def _parse_port(token: str, line: str) -> Port:
    gen, _, rest = token.partition(".")
    side = "out" if rest.startswith("out") else "in" if rest.startswith("in") else None
    digits = rest.removeprefix(side or "")
    if not gen.startswith("g") or side is None or not gen[1:].isdigit() or not digits.isdigit():
        msg = f"Bad port {token!r} (expected g<id>.in<k> or g<id>.out<k>): {line!r}"
        raise ParseError(msg, details={"line": line})
    return Port(gen=int(gen[1:]), side=side, index=int(digits))


def _parse_generator(tokens: list[str], line: str, expected: int, p: int) -> Generator:
    if tokens[0] != f"g{expected}":
        msg = f"Expected generator g{expected}, got {tokens[0]!r}"
        raise ParseError(msg, details={"line": line})
    if len(tokens) not in {2, 3}:
        msg = f"Bad generator line: {line!r}"
        raise ParseError(msg, details={"line": line})
    try:
        kind = GeneratorKind(tokens[1])
    except ValueError as exc:
        msg = f"Unknown generator kind {tokens[1]!r}"
        raise ParseError(msg, details={"line": line}) from exc
    if len(tokens) == 2:  # noqa: PLR2004
        return Generator(kind=kind)
    try:
        return Generator(kind=kind, param=int(tokens[2]) % p)
    except ValueError as exc:
        msg = f"Generator parameter must be an integer: {line!r}"
        raise ParseError(msg, details={"line": line}) from exc


def parse_netlist(text: str, modulus_override: int | None = None) -> Netlist:
    """Read the line-oriented netlist format.

    Raises:
        ParseError: On malformed lines.
        NetlistError: On structural defects.

    """
    body = [
        ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not body:
        msg = "Empty netlist"
        raise ParseError(msg)
    header = body[0].split()
    well_formed = len(header) == 3 and header[:2] == ["netlist", "p"]  # noqa: PLR2004
    if not well_formed or not header[2].isdigit():
        msg = f"Bad netlist header: {body[0]!r} (expected 'netlist p <modulus>')"
        raise ParseError(msg, details={"line": body[0]})
    try:
        modulus = Prime(modulus_override if modulus_override is not None else int(header[2]))
    except KirrelError as exc:
        raise ParseError(str(exc), details=exc.details) from exc
    generators: list[Generator] = []
    wires: list[tuple[Port, Port]] = []
    inputs: list[Port] = []
    outputs: list[Port] = []
    for line in body[1:]:
        tokens = line.split()
        match tokens:
            case ["w", a, b]:
                wires.append((_parse_port(a, line), _parse_port(b, line)))
            case ["in", port]:
                inputs.append(_parse_port(port, line))
            case ["out", port]:
                outputs.append(_parse_port(port, line))
            case [name, *_] if name.startswith("g"):
                generators.append(_parse_generator(tokens, line, len(generators), modulus.p))
            case _:
                msg = f"Unrecognized netlist line: {line!r}"
                raise ParseError(msg, details={"line": line})
    net = Netlist(
        modulus=modulus.p,
        generators=tuple(generators),
        wires=tuple(wires),
        inputs=tuple(inputs),
        outputs=tuple(outputs),
    )
    check_structure(net)
    return net


def netlist_to_json(net: Netlist) -> dict[str, Any]:
    """The pydantic dump, readable by :func:`netlist_from_json`."""
    return net.model_dump(mode="json")


def netlist_from_json(data: Any) -> Netlist:  # noqa: ANN401
    """Validate a JSON document; pydantic errors propagate unchanged."""
    net = Netlist.model_validate(data)
    check_structure(net)
    return net
