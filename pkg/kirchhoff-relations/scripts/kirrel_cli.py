#!/usr/bin/env -S uv run --script
"""Classify, compose, canonicalize, evaluate and synthesize Kirchhoff relations."""

# /// script
# requires-python = ">=3.13"
# dependencies = [
#     "numpy>=2.0.0",
#     "pydantic>=2.0.0",
#     "rich>=13.7.0",
#     "sympy>=1.12",
#     "typer>=0.12.0",
# ]
# ///

import json
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from enum import StrEnum
from pathlib import Path
from typing import Annotated, Any, Literal

import typer
from pydantic import Field, ValidationError
from rich.console import Console
from rich.markup import escape

import circuit as cc
import exactmat as em
import kirrel as kr
import lagrel as lg
import linrel as lr
from errors import KirrelError, ParseError
from gfp import Prime
from lagrel import DoubledRelation
from linrel import AffineSubspace, LinearRelation

app = typer.Typer(help="Exact linear, Lagrangian and Kirchhoff relations over F_p")
console = Console(stderr=True)

type Relation = LinearRelation | DoubledRelation


class OutputFormat(StrEnum):
    """How results are printed."""

    TEXT = "text"
    JSON = "json"


class MatrixDocument(cc.StrictModel):
    """JSON matrix block."""

    modulus: int
    rows: int
    cols: int
    entries: list[list[int]]


class RelationDocument(cc.StrictModel):
    """JSON ``rel`` or ``sympl`` relation; wire counts must be non-negative."""

    kind: Literal["rel", "sympl"]
    modulus: int
    dom: int = Field(ge=0)
    cod: int = Field(ge=0)
    offset: list[int] = []
    empty: bool = False
    matrix: MatrixDocument


ModulusOption = Annotated[
    int | None,
    typer.Option(
        "--modulus",
        envvar="KIRREL_MODULUS",
        help="Override the modulus of every input (entries are re-reduced)",
    ),
]
OutputOption = Annotated[
    Path | None, typer.Option("--output", "-o", help="Write the result to this file")
]
FormatOption = Annotated[
    OutputFormat,
    typer.Option("--format", envvar="KIRREL_FORMAT", help="Output format (text/json)"),
]
VerboseOption = Annotated[
    bool, typer.Option("--verbose", "-v", help="Trace inputs and results on stderr")
]


# --- Input ---


def read_source(source: str) -> str:
    """Read a file, or standard input for ``-``."""
    if source == "-":
        return sys.stdin.read()
    try:
        return Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        msg = f"Cannot read {source}: {exc.strerror}"
        raise ParseError(msg, details={"path": source}) from exc


def _relation_from_document(doc: RelationDocument, modulus: int | None) -> Relation:
    try:
        prime = Prime(modulus if modulus is not None else doc.modulus)
        width = (doc.dom + doc.cod) * (2 if doc.kind == "sympl" else 1)
        matrix = em.from_rows(doc.matrix.entries, prime, cols=width)
        if doc.empty:
            space = AffineSubspace.empty(width, prime)
        else:
            space = AffineSubspace(width, prime, matrix, tuple(doc.offset))
    except KirrelError as exc:
        raise ParseError(str(exc), details=exc.details) from exc
    if doc.kind == "sympl":
        return DoubledRelation(doc.dom, doc.cod, space)
    return LinearRelation(doc.dom, doc.cod, space)


def _netlist_from_json(data: Any, modulus: int | None) -> cc.Netlist:  # noqa: ANN401
    if modulus is not None and isinstance(data, dict):
        data = {**data, "modulus": modulus}
    return cc.netlist_from_json(data)


def _first_token(text: str) -> str:
    for line in text.splitlines():
        if line.strip() and not line.lstrip().startswith("#"):
            return line.split()[0]
    return ""


def load_relation(source: str, modulus: int | None = None) -> Relation:
    """A ``rel``/``sympl`` relation or an evaluated netlist, as text or JSON."""
    text = read_source(source)
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            msg = f"Invalid JSON in {source}: {exc.msg}"
            raise ParseError(msg, details={"path": source}) from exc
        if isinstance(data, dict) and "generators" in data:
            return cc.eval_netlist(_netlist_from_json(data, modulus))
        return _relation_from_document(RelationDocument.model_validate(data), modulus)
    match _first_token(text):
        case "rel":
            return lr.parse_relation(text, modulus)
        case "sympl":
            return lg.parse_doubled(text, modulus)
        case "netlist":
            return cc.eval_netlist(cc.parse_netlist(text, modulus))
        case token:
            msg = f"Unknown input kind {token!r} in {source} (expected rel, sympl or netlist)"
            raise ParseError(msg, details={"path": source})


def load_netlist(source: str, modulus: int | None = None) -> cc.Netlist:
    """A netlist as text or JSON, without evaluating it.

    Raises:
        ParseError: If the source cannot be read or parsed.

    """
    text = read_source(source)
    if text.lstrip().startswith("{"):
        try:
            return _netlist_from_json(json.loads(text), modulus)
        except json.JSONDecodeError as exc:
            msg = f"Invalid JSON in {source}: {exc.msg}"
            raise ParseError(msg, details={"path": source}) from exc
    return cc.parse_netlist(text, modulus)


def require_doubled(relation: Relation, verb: str) -> DoubledRelation:
    """Reject plain ``rel`` input for commands on the symplectic layer.

    Raises:
        ParseError: If ``relation`` is a :class:`LinearRelation`.

    """
    if not isinstance(relation, DoubledRelation):
        msg = f"{verb} needs a sympl relation or a netlist"
        raise ParseError(msg, details={"verb": verb})
    return relation


def require_linear(relation: Relation, verb: str) -> LinearRelation:
    """Reject ``sympl`` input for commands on plain relations.

    Raises:
        ParseError: If ``relation`` is a :class:`DoubledRelation`.

    """
    if not isinstance(relation, LinearRelation):
        msg = f"{verb} needs a rel relation"
        raise ParseError(msg, details={"verb": verb})
    return relation


# --- Output ---


def describe(relation: Relation) -> str:
    """One-line summary for ``--verbose`` traces."""
    kind = "sympl" if isinstance(relation, DoubledRelation) else "rel"
    return f"{kind} {relation.dom} -> {relation.cod} over F_{relation.modulus}"


def format_any(relation: Relation, output_format: OutputFormat) -> str:
    """Render either relation kind as text or JSON."""
    if output_format is OutputFormat.JSON:
        if isinstance(relation, DoubledRelation):
            return _json(lg.doubled_to_json(relation))
        return _json(lr.relation_to_json(relation))
    if isinstance(relation, DoubledRelation):
        return lg.format_doubled(relation)
    return lr.format_relation(relation)


def _json(data: Any) -> str:  # noqa: ANN401
    return json.dumps(data, indent=2) + "\n"


def emit(text: str, output: Path | None) -> None:
    """Write ``text`` to ``output``, or to stdout when no path is given.

    Raises:
        KirrelError: If the output file cannot be written.

    """
    if output is None:
        typer.echo(text, nl=False)
        return
    try:
        output.write_text(text, encoding="utf-8")
    except OSError as exc:
        msg = f"Cannot write {output}: {exc.strerror}"
        raise KirrelError(msg, details={"path": str(output)}) from exc


def trace(verbose: bool, message: str) -> None:
    """Print ``message`` dimmed on stderr when ``verbose`` is set."""
    if verbose:
        console.print(f"[dim]{escape(message)}[/dim]")


@contextmanager
def reporting(*, verbose: bool) -> Iterator[None]:
    """Map library errors to diagnostics and exit statuses (2 parse, 1 other)."""
    try:
        yield
    except (ParseError, ValidationError) as exc:
        console.print("[red]Error:[/red]", escape(str(exc)))
        raise typer.Exit(2) from exc
    except KirrelError as exc:
        console.print("[red]Error:[/red]", escape(str(exc)))
        if verbose and exc.details is not None:
            console.print(f"[dim]{escape(str(exc.details))}[/dim]")
        raise typer.Exit(1) from exc


# --- Commands ---


@app.command()
def classify(
    source: Annotated[str, typer.Argument(help="sympl file, netlist file or - for stdin")],
    modulus: ModulusOption = None,
    output: OutputOption = None,
    output_format: FormatOption = OutputFormat.TEXT,
    verbose: VerboseOption = False,
) -> None:
    """Report Kirchhoff, deterministic, lossless and graph-state status."""
    with reporting(verbose=verbose):
        relation = require_doubled(load_relation(source, modulus), "classify")
        trace(verbose, f"classify: {describe(relation)}")
        result = kr.classify(relation)
        if output_format is OutputFormat.JSON:
            text = _json({
                "kirchhoff": result.is_kirchhoff,
                "deterministic": result.is_deterministic,
                "lossless": result.is_lossless,
                "graph_state": result.is_graph_state,
                "partition": None
                if result.partition is None
                else kr.partition_labels(relation, result.partition),
                "admittance": None
                if result.admittance is None
                else em.matrix_to_json(result.admittance),
            })
        else:
            text = kr.format_classification(result, relation)
        emit(text, output)


def _binary(verb: str, first: str, second: str, modulus: int | None) -> Relation:
    r1, r2 = load_relation(first, modulus), load_relation(second, modulus)
    if isinstance(r1, DoubledRelation) and isinstance(r2, DoubledRelation):
        lg.same_modulus(r1, r2)
        return lg.compose(r1, r2) if verb == "compose" else lg.tensor(r1, r2)
    l1, l2 = require_linear(r1, verb), require_linear(r2, verb)
    return lr.compose(l1, l2) if verb == "compose" else lr.tensor(l1, l2)


@app.command()
def compose(
    first: Annotated[str, typer.Argument(help="First relation (applied first)")],
    second: Annotated[str, typer.Argument(help="Second relation")],
    modulus: ModulusOption = None,
    output: OutputOption = None,
    output_format: FormatOption = OutputFormat.TEXT,
    verbose: VerboseOption = False,
) -> None:
    """Compose two relations of the same kind."""
    with reporting(verbose=verbose):
        result = _binary("compose", first, second, modulus)
        trace(verbose, f"compose: result {describe(result)}")
        emit(format_any(result, output_format), output)


@app.command()
def tensor(
    first: Annotated[str, typer.Argument(help="Upper relation")],
    second: Annotated[str, typer.Argument(help="Lower relation")],
    modulus: ModulusOption = None,
    output: OutputOption = None,
    output_format: FormatOption = OutputFormat.TEXT,
    verbose: VerboseOption = False,
) -> None:
    """Place two relations side by side."""
    with reporting(verbose=verbose):
        result = _binary("tensor", first, second, modulus)
        trace(verbose, f"tensor: result {describe(result)}")
        emit(format_any(result, output_format), output)


@app.command("standard-form")
def standard_form(
    source: Annotated[str, typer.Argument(help="rel, sympl or netlist file")],
    modulus: ModulusOption = None,
    output: OutputOption = None,
    output_format: FormatOption = OutputFormat.TEXT,
    verbose: VerboseOption = False,
) -> None:
    """Print (A, σ) for a linear relation or (Y, A, σ) for a Lagrangian one."""
    with reporting(verbose=verbose):
        relation = load_relation(source, modulus)
        trace(verbose, f"standard-form: {describe(relation)}")
        blocks: dict[str, em.ExactMatrix] = {}
        if isinstance(relation, DoubledRelation):
            form = lg.lagrangian_standard_form(relation)
            sigma, blocks["Y"], blocks["A"] = form.sigma, form.Y, form.A
        else:
            linear = lr.standard_form(relation)
            sigma, blocks["A"] = linear.sigma, linear.A
        if output_format is OutputFormat.JSON:
            data: dict[str, Any] = {"sigma": list(sigma.order())}
            data.update({name: em.matrix_to_json(m) for name, m in blocks.items()})
            text = _json(data)
        else:
            text = "sigma " + " ".join(str(c) for c in sigma.order()) + "\n"
            text += "".join(f"{name}\n{em.format_matrix(m)}" for name, m in blocks.items())
        emit(text, output)


@app.command("canonical-graph")
def canonical_graph(
    source: Annotated[str, typer.Argument(help="sympl state or netlist")],
    modulus: ModulusOption = None,
    output: OutputOption = None,
    output_format: FormatOption = OutputFormat.TEXT,
    verbose: VerboseOption = False,
) -> None:
    """Print the admittance matrix of a graph state."""
    with reporting(verbose=verbose):
        relation = require_doubled(load_relation(source, modulus), "canonical-graph")
        trace(verbose, f"canonical-graph: {describe(relation)}")
        Y = kr.graph_state_canonical(relation).Y
        text = (
            _json(em.matrix_to_json(Y))
            if output_format is OutputFormat.JSON
            else em.format_matrix(Y)
        )
        emit(text, output)


@app.command()
def dual(
    source: Annotated[str, typer.Argument(help="Linear sympl relation or netlist")],
    modulus: ModulusOption = None,
    output: OutputOption = None,
    output_format: FormatOption = OutputFormat.TEXT,
    verbose: VerboseOption = False,
) -> None:
    """Print the symplectic dual of a relation's state."""
    with reporting(verbose=verbose):
        relation = require_doubled(load_relation(source, modulus), "dual")
        trace(verbose, f"dual: {describe(relation)}")
        result = DoubledRelation(relation.dom, relation.cod, lg.symplectic_dual(relation.state))
        emit(format_any(result, output_format), output)


@app.command()
def ortho(
    source: Annotated[str, typer.Argument(help="Linear rel relation")],
    modulus: ModulusOption = None,
    output: OutputOption = None,
    output_format: FormatOption = OutputFormat.TEXT,
    verbose: VerboseOption = False,
) -> None:
    """Print the orthogonal complement of a linear relation."""
    with reporting(verbose=verbose):
        relation = require_linear(load_relation(source, modulus), "ortho")
        trace(verbose, f"ortho: {describe(relation)}")
        emit(format_any(lr.orthogonal_complement(relation), output_format), output)


@app.command("eval")
def eval_(
    source: Annotated[str, typer.Argument(help="Netlist file or - for stdin")],
    modulus: ModulusOption = None,
    output: OutputOption = None,
    output_format: FormatOption = OutputFormat.TEXT,
    verbose: VerboseOption = False,
) -> None:
    """Evaluate a netlist to its boundary relation."""
    with reporting(verbose=verbose):
        net = load_netlist(source, modulus)
        trace(verbose, f"eval: {len(net.generators)} generators, {len(net.wires)} wires")
        result = cc.eval_netlist(net)
        trace(verbose, f"eval: result {describe(result)}, dim {result.state.dim}")
        emit(format_any(result, output_format), output)


@app.command()
def synth(
    source: Annotated[str, typer.Argument(help="Kirchhoff sympl relation or netlist")],
    modulus: ModulusOption = None,
    output: OutputOption = None,
    output_format: FormatOption = OutputFormat.TEXT,
    verbose: VerboseOption = False,
) -> None:
    """Synthesize a netlist of spiders, resistors, dividers and sources."""
    with reporting(verbose=verbose):
        relation = require_doubled(load_relation(source, modulus), "synth")
        trace(verbose, f"synth: {describe(relation)}")
        net = cc.synth_kirchhoff(relation) if relation.is_linear else cc.synth_affine(relation)
        trace(verbose, f"synth: {len(net.generators)} generators, {len(net.wires)} wires")
        text = (
            _json(cc.netlist_to_json(net))
            if output_format is OutputFormat.JSON
            else cc.format_netlist(net)
        )
        emit(text, output)


def parse_element(element: str) -> list[int]:
    """Split ``"1 0 4 4"`` or ``"1,0,4,4"`` into integers.

    Raises:
        ParseError: If a token is not an integer.

    """
    try:
        return [int(t) for t in element.replace(",", " ").split()]
    except ValueError as exc:
        msg = f"Element must be integers: {element!r}"
        raise ParseError(msg, details={"element": element}) from exc


@app.command()
def power(
    source: Annotated[str, typer.Argument(help="sympl relation or netlist")],
    element: Annotated[
        str,
        typer.Option(
            "--element", "-e", help="Member in physical order: q_in q_out p_in p_out"
        ),
    ],
    modulus: ModulusOption = None,
    output: OutputOption = None,
    output_format: FormatOption = OutputFormat.TEXT,
    verbose: VerboseOption = False,
) -> None:
    """Print the power input at a member of the relation."""
    with reporting(verbose=verbose):
        relation = require_doubled(load_relation(source, modulus), "power")
        trace(verbose, f"power: {describe(relation)}")
        value = int(lg.power_input(relation, parse_element(element)))
        text = _json({"power": value}) if output_format is OutputFormat.JSON else f"{value}\n"
        emit(text, output)


if __name__ == "__main__":
    app()
