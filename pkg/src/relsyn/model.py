"""Core domain types, input file parsing, and bundled benchmark graphs.

Data-flow graphs (DFGs) are DAGs of typed operations; resource libraries
list hardware versions per operation class with area, delay, and
reliability.  Both come from small line-oriented text formats:

    node <id> <op>          op in {add, mul, sub, cmp}; sub/cmp alias to add
    edge <src-id> <dst-id>

    resource <name> <op> <area> <delay> <reliability>

All types are immutable after construction and safe to share.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Iterable, Mapping


class ParseError(ValueError):
    """Malformed input text; message carries the offending line number."""


class ValidationError(ValueError):
    """Structurally invalid domain object (cycle, dangling edge, ...)."""


class OpClass(Enum):
    ADD = "add"
    MUL = "mul"


# Operation keywords accepted in DFG files.  Subtraction and comparison
# run on adder-class hardware, so they alias to ADD.
_OP_ALIASES = {
    "add": OpClass.ADD,
    "sub": OpClass.ADD,
    "cmp": OpClass.ADD,
    "mul": OpClass.MUL,
}


@dataclass(frozen=True)
class DfgNode:
    id: str
    op_class: OpClass


@dataclass(frozen=True)
class Dfg:
    """Directed acyclic graph of operations; declaration order is preserved
    and serves as the deterministic tie-break order everywhere downstream."""

    nodes: tuple[DfgNode, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        index: dict[str, int] = {}
        for pos, node in enumerate(self.nodes):
            if node.id in index:
                raise ValidationError(f"duplicate node id {node.id!r}")
            index[node.id] = pos
        preds: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        succs: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        seen: set[tuple[str, str]] = set()
        for src, dst in self.edges:
            if src not in index:
                raise ValidationError(f"edge references unknown node {src!r}")
            if dst not in index:
                raise ValidationError(f"edge references unknown node {dst!r}")
            if (src, dst) in seen:
                raise ValidationError(f"duplicate edge {src!r} -> {dst!r}")
            seen.add((src, dst))
            succs[src].append(dst)
            preds[dst].append(src)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_preds", {k: tuple(v) for k, v in preds.items()})
        object.__setattr__(self, "_succs", {k: tuple(v) for k, v in succs.items()})
        object.__setattr__(self, "_topo", self._toposort())

    def _toposort(self) -> tuple[str, ...]:
        # Kahn's algorithm with declaration-order tie-break; also the
        # acyclicity check.
        indeg = {n.id: len(self._preds[n.id]) for n in self.nodes}
        ready = deque(n.id for n in self.nodes if indeg[n.id] == 0)
        order: list[str] = []
        while ready:
            nid = ready.popleft()
            order.append(nid)
            for succ in self._succs[nid]:
                indeg[succ] -= 1
                if indeg[succ] == 0:
                    ready.append(succ)
        if len(order) != len(self.nodes):
            raise ValidationError("cycle detected in data-flow graph")
        return tuple(order)

    # -- lookup helpers -------------------------------------------------

    def node(self, node_id: str) -> DfgNode:
        return self.nodes[self._index[node_id]]

    def declaration_index(self, node_id: str) -> int:
        return self._index[node_id]

    def op_class_of(self, node_id: str) -> OpClass:
        return self.node(node_id).op_class

    def preds(self, node_id: str) -> tuple[str, ...]:
        return self._preds[node_id]

    def succs(self, node_id: str) -> tuple[str, ...]:
        return self._succs[node_id]

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    @property
    def topo_order(self) -> tuple[str, ...]:
        return self._topo

    @property
    def source_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if not self._preds[n.id])

    @property
    def sink_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if not self._succs[n.id])

    def class_counts(self) -> dict[OpClass, int]:
        counts = {cls: 0 for cls in OpClass}
        for node in self.nodes:
            counts[node.op_class] += 1
        return counts


@dataclass(frozen=True)
class ResourceVersion:
    """One hardware implementation of an operation class."""

    name: str
    op_class: OpClass
    area: float
    delay: int
    reliability: float

    def __post_init__(self) -> None:
        if not self.area > 0:
            raise ValidationError(f"version {self.name!r}: area must be > 0")
        if not (isinstance(self.delay, int) and self.delay >= 1):
            raise ValidationError(f"version {self.name!r}: delay must be an integer >= 1")
        if not 0 < self.reliability <= 1:
            raise ValidationError(f"version {self.name!r}: reliability must be in (0, 1]")


@dataclass(frozen=True)
class ResourceLibrary:
    versions: tuple[ResourceVersion, ...]

    def __post_init__(self) -> None:
        names: set[str] = set()
        for v in self.versions:
            if v.name in names:
                raise ValidationError(f"duplicate resource name {v.name!r}")
            names.add(v.name)

    def by_name(self, name: str) -> ResourceVersion:
        for v in self.versions:
            if v.name == name:
                return v
        raise KeyError(f"unknown resource version {name!r}")

    def versions_for(self, op_class: OpClass) -> tuple[ResourceVersion, ...]:
        return tuple(v for v in self.versions if v.op_class == op_class)

    def check_covers(self, dfg: Dfg) -> None:
        """Every operation class used by the graph needs at least one version."""
        for cls, count in dfg.class_counts().items():
            if count and not self.versions_for(cls):
                raise ValidationError(f"library has no version for class {cls.value}")


# An assignment maps every node id to the version that implements it.
Assignment = Mapping[str, ResourceVersion]


def check_assignment(dfg: Dfg, assignment: Assignment) -> None:
    """Raise unless `assignment` is total over `dfg` and class-consistent."""
    for node in dfg.nodes:
        version = assignment.get(node.id)
        if version is None:
            raise ValidationError(f"assignment missing node {node.id!r}")
        if version.op_class is not node.op_class:
            raise ValidationError(
                f"node {node.id!r} ({node.op_class.value}) assigned "
                f"{version.name!r} ({version.op_class.value})"
            )


# -- parsing ------------------------------------------------------------


def _content_lines(text: str) -> Iterable[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_dfg(text: str) -> Dfg:
    """Parse the line-oriented DFG format into a validated graph."""
    nodes: list[DfgNode] = []
    edges: list[tuple[str, str]] = []
    for lineno, fields in _content_lines(text):
        kind = fields[0]
        if kind == "node":
            if len(fields) != 3:
                raise ParseError(f"line {lineno}: expected 'node <id> <op>'")
            nid, op = fields[1], fields[2]
            if op not in _OP_ALIASES:
                raise ParseError(f"line {lineno}: unknown operation {op!r}")
            nodes.append(DfgNode(nid, _OP_ALIASES[op]))
        elif kind == "edge":
            if len(fields) != 3:
                raise ParseError(f"line {lineno}: expected 'edge <src> <dst>'")
            edges.append((fields[1], fields[2]))
        else:
            raise ParseError(f"line {lineno}: unknown directive {kind!r}")
    if not nodes:
        raise ParseError("no nodes declared")
    return Dfg(tuple(nodes), tuple(edges))


def render_dfg(dfg: Dfg) -> str:
    """Serialize a graph back to the DFG format (inverse of parse_dfg)."""
    lines = [f"node {n.id} {n.op_class.value}" for n in dfg.nodes]
    lines += [f"edge {src} {dst}" for src, dst in dfg.edges]
    return "\n".join(lines) + "\n"


def parse_library(text: str) -> ResourceLibrary:
    """Parse the line-oriented resource library format."""
    versions: list[ResourceVersion] = []
    for lineno, fields in _content_lines(text):
        if fields[0] != "resource" or len(fields) != 6:
            raise ParseError(
                f"line {lineno}: expected 'resource <name> <op> <area> <delay> <reliability>'"
            )
        _, name, op, area_s, delay_s, rel_s = fields
        if op not in _OP_ALIASES:
            raise ParseError(f"line {lineno}: unknown operation {op!r}")
        try:
            area = float(area_s)
            delay = int(delay_s)
            reliability = float(rel_s)
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        try:
            versions.append(ResourceVersion(name, _OP_ALIASES[op], area, delay, reliability))
        except ValidationError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    return ResourceLibrary(tuple(versions))


# -- bundled data -------------------------------------------------------

BENCHMARK_NAMES = ("fir16", "ew", "diffeq")


def data_text(filename: str) -> str:
    """Return the content of a bundled data file (e.g. 'table1.lib')."""
    return resources.files(__package__).joinpath("data", filename).read_text(encoding="utf-8")


def builtin_benchmark(name: str) -> Dfg:
    """Load one of the bundled benchmark graphs: fir16, ew, or diffeq."""
    if name not in BENCHMARK_NAMES:
        raise ValidationError(f"unknown benchmark {name!r}; choose from {BENCHMARK_NAMES}")
    return parse_dfg(data_text(f"{name}.dfg"))


def builtin_library() -> ResourceLibrary:
    """Load the bundled five-version adder/multiplier library."""
    return parse_library(data_text("table1.lib"))
