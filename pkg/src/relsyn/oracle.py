"""Exhaustive reference implementation for small instances.

Ground truth for testing the synthesis heuristic: enumerates every
per-node version assignment in descending reliability order and, for
each, searches all precedence-feasible start vectors under the latency
bound for one whose shared-hardware area fits.  Scheduling, longest
paths, and instance packing are reimplemented here on purpose so the
check does not share code paths with the production scheduler/binder.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .binder import Binding, Instance
from .model import Assignment, Dfg, ResourceLibrary, ResourceVersion, ValidationError, check_assignment
from .scheduler import Schedule
from .synthesizer import Bounds, Design, Infeasible


class OracleLimitError(ValueError):
    """Instance too large for exhaustive search."""


@dataclass(frozen=True)
class OracleLimit:
    max_nodes: int = 8
    max_versions_per_class: int = 3
    max_latency_bound: int = 12


def _check_limits(dfg: Dfg, limit: OracleLimit) -> None:
    if len(dfg.nodes) > limit.max_nodes:
        raise OracleLimitError(
            f"{len(dfg.nodes)} nodes exceeds oracle limit {limit.max_nodes}"
        )


def oracle_min_latency(dfg: Dfg, assignment: Assignment, limit: OracleLimit | None = None) -> int:
    """Minimum achievable latency by exhaustive path enumeration."""
    _check_limits(dfg, limit or OracleLimit())
    check_assignment(dfg, assignment)
    best = 0
    stack: list[tuple[str, int]] = [
        (nid, assignment[nid].delay) for nid in dfg.source_ids
    ]
    while stack:
        nid, weight = stack.pop()
        succs = dfg.succs(nid)
        if not succs:
            best = max(best, weight)
        for succ in succs:
            stack.append((succ, weight + assignment[succ].delay))
    return best


def _longest_path(dfg: Dfg, assignment: Assignment) -> int:
    dist: dict[str, int] = {}
    for nid in dfg.topo_order:
        incoming = max((dist[p] for p in dfg.preds(nid)), default=0)
        dist[nid] = incoming + assignment[nid].delay
    return max(dist.values())


def _left_edge_pack(
    dfg: Dfg, assignment: Assignment, starts: dict[str, int]
) -> tuple[dict[str, int], tuple[Instance, ...]]:
    intervals = sorted(
        ((starts[nid], dfg.declaration_index(nid), nid) for nid in dfg.node_ids)
    )
    free_at: list[int] = []
    versions: list[str] = []
    mapping: dict[str, int] = {}
    for start, _, nid in intervals:
        version = assignment[nid]
        target = None
        for iid, (vname, busy_until) in enumerate(zip(versions, free_at)):
            if vname == version.name and busy_until < start:
                target = iid
                break
        if target is None:
            target = len(versions)
            versions.append(version.name)
            free_at.append(0)
        mapping[nid] = target
        free_at[target] = start + version.delay - 1
    instances = tuple(Instance(i, v) for i, v in enumerate(versions))
    return {nid: mapping[nid] for nid in dfg.node_ids}, instances


def _area_of_starts(
    dfg: Dfg, assignment: Assignment, starts: dict[str, int], horizon: int
) -> float:
    # Shared-hardware area equals, per version, the peak number of
    # concurrently executing operations times the version area.
    usage: dict[str, list[int]] = {}
    for nid, s in starts.items():
        v = assignment[nid]
        row = usage.setdefault(v.name, [0] * horizon)
        for c in range(s, s + v.delay):
            row[c - 1] += 1
    area = 0.0
    per_version = {v.name: v.area for v in assignment.values()}
    for vname, row in usage.items():
        area += per_version[vname] * max(row)
    return area


def _feasible_starts(
    dfg: Dfg, assignment: Assignment, bounds: Bounds
) -> dict[str, int] | None:
    """Search start vectors in topological order; None if nothing fits.

    Prunes on an area lower bound: placed operations determine current
    per-version concurrency peaks, and every version still awaiting
    placement needs at least one instance.
    """
    l_d, a_d = bounds.latency_bound, bounds.area_bound
    order = dfg.topo_order
    # Latest start allowed for each node so every successor still fits.
    latest: dict[str, int] = {}
    for nid in reversed(order):
        cap = l_d - assignment[nid].delay + 1
        for succ in dfg.succs(nid):
            cap = min(cap, latest[succ] - assignment[nid].delay)
        if cap < 1:
            return None
        latest[nid] = cap
    areas = {v.name: v.area for v in assignment.values()}
    remaining_versions: list[set[str]] = []
    seen: set[str] = set()
    for nid in reversed(order):
        seen = seen | {assignment[nid].name}
        remaining_versions.append(set(seen))
    remaining_versions.reverse()

    usage: dict[str, list[int]] = {name: [0] * l_d for name in areas}
    peaks: dict[str, int] = {name: 0 for name in areas}
    starts: dict[str, int] = {}

    def area_lower_bound(pos: int) -> float:
        pending = remaining_versions[pos] if pos < len(order) else set()
        return sum(
            areas[name] * max(peak, 1 if name in pending else 0)
            for name, peak in peaks.items()
        )

    def place(pos: int) -> bool:
        if pos == len(order):
            return True
        nid = order[pos]
        v = assignment[nid]
        earliest = 1
        for pred in dfg.preds(nid):
            earliest = max(earliest, starts[pred] + assignment[pred].delay)
        for s in range(earliest, latest[nid] + 1):
            cells = range(s - 1, s + v.delay - 1)
            row = usage[v.name]
            saved_peak = peaks[v.name]
            for c in cells:
                row[c] += 1
                peaks[v.name] = max(peaks[v.name], row[c])
            starts[nid] = s
            if area_lower_bound(pos + 1) <= a_d and place(pos + 1):
                return True
            del starts[nid]
            for c in cells:
                row[c] -= 1
            peaks[v.name] = saved_peak
        return False

    if place(0):
        return dict(starts)
    return None


def oracle_best(
    dfg: Dfg,
    library: ResourceLibrary,
    bounds: Bounds,
    limit: OracleLimit | None = None,
) -> Design | Infeasible:
    """Exhaustively find the most reliable design meeting both bounds."""
    limit = limit or OracleLimit()
    _check_limits(dfg, limit)
    library.check_covers(dfg)
    for cls in {n.op_class for n in dfg.nodes}:
        if len(library.versions_for(cls)) > limit.max_versions_per_class:
            raise OracleLimitError(
                f"class {cls.value} has more than {limit.max_versions_per_class} versions"
            )
    if bounds.latency_bound > limit.max_latency_bound:
        raise OracleLimitError(
            f"latency bound {bounds.latency_bound} exceeds oracle limit "
            f"{limit.max_latency_bound}"
        )

    choices = [library.versions_for(n.op_class) for n in dfg.nodes]
    assignments: list[tuple[ResourceVersion, ...]] = list(itertools.product(*choices))
    assignments.sort(
        key=lambda combo: -sum(math.log(v.reliability) for v in combo)
    )  # ascending -log == descending reliability; stable, so ties keep enumeration order

    any_latency_ok = False
    for combo in assignments:
        assignment = {n.id: v for n, v in zip(dfg.nodes, combo)}
        if _longest_path(dfg, assignment) > bounds.latency_bound:
            continue
        any_latency_ok = True
        if sum(v.area for v in set(combo)) > bounds.area_bound:
            continue
        starts = _feasible_starts(dfg, assignment, bounds)
        if starts is None:
            continue
        node_to_instance, instances = _left_edge_pack(dfg, assignment, starts)
        binding = Binding(node_to_instance, instances)
        latency = max(starts[nid] + assignment[nid].delay - 1 for nid in starts)
        area = _area_of_starts(dfg, assignment, starts, bounds.latency_bound)
        reliability = math.exp(sum(math.log(v.reliability) for v in combo))
        return Design(
            assignment=assignment,
            schedule=Schedule({nid: starts[nid] for nid in dfg.node_ids}, latency),
            binding=binding,
            latency=latency,
            area=area,
            reliability=reliability,
        )
    reason = "area" if any_latency_ok else "latency"
    return Infeasible(reason, "exhaustive search found no design meeting both bounds")
