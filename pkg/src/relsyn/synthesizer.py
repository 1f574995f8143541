"""Reliability-maximizing synthesis under latency and area bounds.

Starts from the most reliable version everywhere, then repairs latency
by speeding up critical-path nodes, exploits leftover latency slack to
share more hardware, and repairs area by moving whole instances to
smaller versions.  A node may be downgraded repeatedly but is never
upgraded again within one run, which bounds the repair loops.

The repair loops only ever shrink a node's version area, so they cannot
discover designs that get cheaper by consolidating operations onto a
shared *larger* version (e.g. serializing every multiplication onto one
fast multiplier).  When area repair dead-ends, a final fallback
enumerates the single-version-per-class assignments and returns the
most reliable one that fits both bounds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .binder import Binding, bind, total_area
from .model import Assignment, Dfg, OpClass, ResourceLibrary, ResourceVersion, ValidationError
from .redundancy import evaluate_reliability
from .scheduler import InfeasibleBoundError, Schedule, asap, critical_path, density_schedule


@dataclass(frozen=True)
class Bounds:
    latency_bound: int
    area_bound: float

    def __post_init__(self) -> None:
        if self.latency_bound < 1:
            raise ValidationError("latency bound must be >= 1")
        if not self.area_bound > 0:
            raise ValidationError("area bound must be > 0")


@dataclass(frozen=True)
class Design:
    """A complete synthesis result."""

    assignment: dict[str, ResourceVersion]
    schedule: Schedule
    binding: Binding
    latency: int
    area: float
    reliability: float


@dataclass(frozen=True)
class Infeasible:
    """First-class negative result; reason is 'latency' or 'area'."""

    reason: str
    detail: str = ""


def prefer_versions(versions: Iterable[ResourceVersion]) -> list[ResourceVersion]:
    """Global preference order: reliability desc, area asc, delay asc, name."""
    return sorted(versions, key=lambda v: (-v.reliability, v.area, v.delay, v.name))


def initial_allocation(dfg: Dfg, library: ResourceLibrary) -> dict[str, ResourceVersion]:
    """Give every node the most reliable version of its class."""
    library.check_covers(dfg)
    best = {
        cls: prefer_versions(library.versions_for(cls))[0]
        for cls in {n.op_class for n in dfg.nodes}
    }
    return {n.id: best[n.op_class] for n in dfg.nodes}


def _decl_sorted(dfg: Dfg, node_ids: Sequence[str]) -> list[str]:
    return sorted(node_ids, key=dfg.declaration_index)


def _build_design(
    dfg: Dfg,
    library: ResourceLibrary,
    assignment: dict[str, ResourceVersion],
    schedule: Schedule,
    binding: Binding,
) -> Design:
    return Design(
        assignment=dict(assignment),
        schedule=schedule,
        binding=binding,
        latency=schedule.latency,
        area=total_area(binding, library),
        reliability=evaluate_reliability(dfg, assignment, binding),
    )


def _single_version_fallback(
    dfg: Dfg, library: ResourceLibrary, bounds: Bounds
) -> Design | None:
    """Most reliable single-version-per-class design meeting both bounds.

    Ties break toward smaller area, then smaller latency, then
    enumeration order (class versions in library order).
    """
    classes = [cls for cls in OpClass if dfg.class_counts()[cls]]
    best: Design | None = None
    for combo in itertools.product(*(library.versions_for(cls) for cls in classes)):
        chosen = dict(zip(classes, combo))
        assignment = {n.id: chosen[n.op_class] for n in dfg.nodes}
        try:
            schedule = density_schedule(dfg, assignment, bounds.latency_bound)
        except InfeasibleBoundError:
            continue
        binding = bind(dfg, schedule, assignment)
        if total_area(binding, library) > bounds.area_bound:
            continue
        design = _build_design(dfg, library, assignment, schedule, binding)
        if best is None or (design.reliability, -design.area, -design.latency) > (
            best.reliability,
            -best.area,
            -best.latency,
        ):
            best = design
    return best


def find_design(dfg: Dfg, library: ResourceLibrary, bounds: Bounds) -> Design | Infeasible:
    """Synthesize the most reliable design meeting both bounds.

    Any returned Design satisfies latency <= latency_bound and
    area <= area_bound as recomputed from its schedule and binding;
    otherwise an Infeasible with the blocking dimension is returned.
    """
    library.check_covers(dfg)
    l_d, a_d = bounds.latency_bound, bounds.area_bound
    assignment = initial_allocation(dfg, library)
    latency = asap(dfg, assignment).latency

    # Latency repair: speed up the slowest critical-path node until the
    # bound is met or no critical-path node can go any faster.
    while latency > l_d:
        path = critical_path(dfg, assignment)
        candidates = []
        for nid in path:
            current = assignment[nid]
            faster = [
                v for v in library.versions_for(current.op_class) if v.delay < current.delay
            ]
            if faster:
                candidates.append(nid)
        if not candidates:
            return Infeasible(
                "latency",
                f"minimum latency {latency} exceeds bound {l_d} and no "
                "critical-path node has a faster version",
            )
        victim = sorted(
            candidates,
            key=lambda nid: (-assignment[nid].delay, dfg.declaration_index(nid)),
        )[0]
        current = assignment[victim]
        faster = [
            v for v in library.versions_for(current.op_class) if v.delay < current.delay
        ]
        assignment[victim] = prefer_versions(faster)[0]
        latency = asap(dfg, assignment).latency

    # Schedule against the achieved latency; then share hardware.
    schedule = density_schedule(dfg, assignment, latency)
    binding = bind(dfg, schedule, assignment)
    area = total_area(binding, library)

    # Latency slack: relaxing the schedule one cycle at a time lets the
    # binder serialize more operations onto fewer instances.
    while area > a_d and latency < l_d:
        latency += 1
        schedule = density_schedule(dfg, assignment, latency)
        binding = bind(dfg, schedule, assignment)
        area = total_area(binding, library)

    # Area repair: move the largest-version node, together with every
    # node sharing its instance, to a smaller version that is no slower.
    while area > a_d:
        candidates = []
        for nid in dfg.node_ids:
            current = assignment[nid]
            smaller = [
                v
                for v in library.versions_for(current.op_class)
                if v.area < current.area and v.delay <= current.delay
            ]
            if smaller:
                candidates.append(nid)
        if not candidates:
            fallback = _single_version_fallback(dfg, library, bounds)
            if fallback is not None:
                return fallback
            return Infeasible(
                "area",
                f"area {area:g} exceeds bound {a_d:g}; no node has a smaller "
                "version that is no slower and no single-version design fits",
            )
        victim = sorted(
            candidates,
            key=lambda nid: (-assignment[nid].area, dfg.declaration_index(nid)),
        )[0]
        current = assignment[victim]
        smaller = [
            v
            for v in library.versions_for(current.op_class)
            if v.area < current.area and v.delay <= current.delay
        ]
        replacement = prefer_versions(smaller)[0]
        group = binding.nodes_on(binding.node_to_instance[victim])
        for nid in _decl_sorted(dfg, group):
            assignment[nid] = replacement
        schedule = density_schedule(dfg, assignment, latency)
        binding = bind(dfg, schedule, assignment)
        area = total_area(binding, library)

    if schedule.latency > l_d:
        return Infeasible("latency", f"latency {schedule.latency} exceeds bound {l_d}")
    return _build_design(dfg, library, assignment, schedule, binding)
