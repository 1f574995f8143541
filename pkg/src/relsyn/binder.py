"""Resource sharing: pack scheduled operations onto functional-unit
instances and account for total area.

Binding uses the left-edge method per version, which is optimal for
interval sharing: the instance count per version equals the maximum
number of concurrently executing operations of that version.  Units are
non-pipelined, so an instance is busy for the full execution interval
of each operation bound to it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

from .model import Assignment, Dfg, ResourceLibrary, ValidationError, check_assignment
from .scheduler import Schedule


@dataclass(frozen=True)
class Instance:
    """A functional unit; nmr_factor N > 1 means N voted copies."""

    id: int
    version: str
    nmr_factor: int = 1

    def __post_init__(self) -> None:
        if self.nmr_factor < 1 or self.nmr_factor % 2 == 0:
            raise ValidationError(f"instance {self.id}: nmr_factor must be odd and >= 1")


@dataclass(frozen=True)
class Binding:
    node_to_instance: Mapping[str, int]
    instances: tuple[Instance, ...]

    def instance(self, instance_id: int) -> Instance:
        for inst in self.instances:
            if inst.id == instance_id:
                return inst
        raise KeyError(f"unknown instance id {instance_id}")

    def nodes_on(self, instance_id: int) -> tuple[str, ...]:
        return tuple(
            nid for nid, iid in self.node_to_instance.items() if iid == instance_id
        )


def bind(dfg: Dfg, schedule: Schedule, assignment: Assignment) -> Binding:
    """Pack nodes onto the minimum number of instances per version.

    Nodes are processed by start cycle (ties: declaration order); each
    goes to the lowest-id instance of its version that is free again
    before its start, otherwise a new instance is opened.
    """
    check_assignment(dfg, assignment)
    order = sorted(
        dfg.node_ids,
        key=lambda nid: (schedule.starts[nid], dfg.declaration_index(nid)),
    )
    instances: list[Instance] = []
    last_busy: dict[int, int] = {}
    node_to_instance: dict[str, int] = {}
    for nid in order:
        version = assignment[nid]
        start = schedule.starts[nid]
        end = start + version.delay - 1
        chosen = None
        for inst in instances:
            if inst.version == version.name and last_busy[inst.id] < start:
                chosen = inst.id
                break
        if chosen is None:
            chosen = len(instances)
            instances.append(Instance(chosen, version.name))
        node_to_instance[nid] = chosen
        last_busy[chosen] = end
    ordered = {nid: node_to_instance[nid] for nid in dfg.node_ids}
    return Binding(ordered, tuple(instances))


def total_area(binding: Binding, library: ResourceLibrary) -> float:
    """Sum of instance areas scaled by their redundancy factors.

    Voter/checker circuitry is excluded from the accounting.
    """
    area = 0.0
    for inst in binding.instances:
        try:
            version = library.by_name(inst.version)
        except KeyError as exc:
            raise ValidationError(str(exc)) from exc
        area += version.area * inst.nmr_factor
    return area


def with_nmr(binding: Binding, nmr_spec: Mapping[int, int]) -> Binding:
    """Return a copy of `binding` with redundancy factors applied."""
    known = {inst.id for inst in binding.instances}
    for iid, n in nmr_spec.items():
        if iid not in known:
            raise ValidationError(f"nmr spec references unknown instance {iid}")
        if n < 1 or n % 2 == 0:
            raise ValidationError(f"instance {iid}: nmr factor must be odd and >= 1")
    instances = tuple(
        replace(inst, nmr_factor=nmr_spec.get(inst.id, inst.nmr_factor))
        for inst in binding.instances
    )
    return Binding(binding.node_to_instance, instances)
