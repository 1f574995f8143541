"""Command-line driver.

Subcommands:
  synth        synthesize one design under latency/area bounds
  sweep        grid of bounds -> CSV, one row per (bound pair, method)
  characterize critical charges -> SER ratios, failure rates, reliabilities
  eval         reliability of an explicit assignment or serialized design

Exit codes: 0 success/feasible, 1 infeasible, 2 usage or input error.
Diagnostics go to stderr; data goes to stdout or --out.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import IO, Sequence

from . import charlib, model, oracle, redundancy, synthesizer
from .binder import Binding, Instance
from .model import Dfg, ParseError, ResourceLibrary, ValidationError
from .scheduler import InfeasibleBoundError, Schedule
from .synthesizer import Bounds, Design, Infeasible

METHODS = ("ours", "nmr", "combined", "oracle")


class InputError(Exception):
    """User-facing input problem; maps to exit code 2."""


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_dfg(path: str) -> Dfg:
    return model.parse_dfg(_read_file(path))


def _load_library(path: str) -> ResourceLibrary:
    return model.parse_library(_read_file(path))


def _run_method(
    method: str, dfg: Dfg, library: ResourceLibrary, bounds: Bounds
) -> Design | Infeasible:
    if method == "ours":
        return synthesizer.find_design(dfg, library, bounds)
    if method == "nmr":
        return redundancy.baseline_nmr_synth(dfg, library, bounds)
    if method == "combined":
        return redundancy.combined_synth(dfg, library, bounds)
    if method == "oracle":
        return oracle.oracle_best(dfg, library, bounds)
    raise InputError(f"unknown method {method!r}")


# -- design serialization -------------------------------------------------


def design_to_json(design: Design) -> dict:
    return {
        "assignment": {nid: v.name for nid, v in design.assignment.items()},
        "schedule": dict(design.schedule.starts),
        "binding": dict(design.binding.node_to_instance),
        "instances": [
            {"id": inst.id, "version": inst.version, "nmr": inst.nmr_factor}
            for inst in design.binding.instances
        ],
        "latency": design.latency,
        "area": design.area,
        "reliability": design.reliability,
    }


def _print_design_text(design: Design, out: IO[str]) -> None:
    print(f"latency {design.latency}", file=out)
    print(f"area {design.area:g}", file=out)
    print(f"reliability {design.reliability:.5f}", file=out)
    print("assignment:", file=out)
    for nid, version in design.assignment.items():
        print(f"  {nid} {version.name}", file=out)
    print("schedule:", file=out)
    for nid, start in design.schedule.starts.items():
        print(f"  {nid} {start}", file=out)
    print("binding:", file=out)
    for nid, iid in design.binding.node_to_instance.items():
        print(f"  {nid} {iid}", file=out)
    print("instances:", file=out)
    for inst in design.binding.instances:
        print(f"  {inst.id} {inst.version} nmr {inst.nmr_factor}", file=out)


def _emit_result(result: Design | Infeasible, fmt: str, out: IO[str]) -> int:
    if isinstance(result, Infeasible):
        if fmt == "json":
            print(json.dumps({"status": "infeasible", "reason": result.reason}), file=out)
        else:
            print(f"infeasible: {result.reason}", file=out)
        return 1
    if fmt == "json":
        print(json.dumps(design_to_json(result), indent=2), file=out)
    else:
        _print_design_text(result, out)
    return 0


# -- subcommands ----------------------------------------------------------


def _cmd_synth(args: argparse.Namespace) -> int:
    dfg = _load_dfg(args.dfg)
    library = _load_library(args.lib)
    bounds = Bounds(args.latency, args.area)
    result = _run_method(args.method, dfg, library, bounds)
    return _emit_result(result, args.format, sys.stdout)


def _parse_range(spec: str, what: str, integral: bool = False) -> tuple[float, float]:
    parts = spec.split(":")
    if len(parts) != 2:
        raise InputError(f"{what} range must look like <lo>:<hi>, got {spec!r}")
    try:
        convert = int if integral else float
        lo, hi = convert(parts[0]), convert(parts[1])
    except ValueError as exc:
        raise InputError(f"bad {what} range {spec!r}: {exc}") from exc
    if hi < lo:
        raise InputError(f"empty {what} range {spec!r}")
    return lo, hi


def _grid(lo: float, hi: float, step: float) -> list[float]:
    values = []
    v = lo
    while v <= hi + 1e-9:
        values.append(v)
        v += step
    return values


def _fmt_num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _cmd_sweep(args: argparse.Namespace) -> int:
    dfg = _load_dfg(args.dfg)
    library = _load_library(args.lib)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise InputError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    if not methods:
        raise InputError("no methods given")
    l_lo, l_hi = _parse_range(args.latency, "latency", integral=True)
    a_lo, a_hi = _parse_range(args.area, "area")
    if args.step_l < 1 or args.step_a <= 0:
        raise InputError("steps must be positive")
    lines = ["L_d,A_d,method,status,latency,area,reliability"]
    for l_d in _grid(l_lo, l_hi, args.step_l):
        for a_d in _grid(a_lo, a_hi, args.step_a):
            for method in methods:
                result = _run_method(method, dfg, library, Bounds(int(l_d), a_d))
                if isinstance(result, Infeasible):
                    row = [
                        _fmt_num(l_d), _fmt_num(a_d), method,
                        f"infeasible:{result.reason}", "", "", "",
                    ]
                else:
                    row = [
                        _fmt_num(l_d), _fmt_num(a_d), method, "feasible",
                        str(result.latency), _fmt_num(result.area),
                        f"{result.reliability:.5f}",
                    ]
                lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)
    return 0


def _parse_name_value(spec: str, what: str) -> tuple[str, float]:
    if "=" not in spec:
        raise InputError(f"{what} must look like <name>=<value>, got {spec!r}")
    name, _, value = spec.partition("=")
    try:
        return name, float(value)
    except ValueError as exc:
        raise InputError(f"bad {what} {spec!r}: {exc}") from exc


def _cmd_characterize(args: argparse.Namespace) -> int:
    inputs = charlib.parse_qcrit(_read_file(args.qcrit))
    by_name = {inp.name: inp for inp in inputs}
    ref_name, ref_rel = _parse_name_value(args.ref, "--ref")
    if ref_name not in by_name:
        raise InputError(f"reference {ref_name!r} not found in {args.qcrit}")
    if args.qs is not None:
        q_s = args.qs
    else:
        cal_name, cal_rel = _parse_name_value(args.calibrate, "--calibrate")
        if cal_name not in by_name:
            raise InputError(f"calibration component {cal_name!r} not found in {args.qcrit}")
        q_s = charlib.calibrate_qs(
            (by_name[ref_name].q_critical, ref_rel),
            (by_name[cal_name].q_critical, cal_rel),
            args.time,
        )
    cmodel = charlib.CharModel(q_s, ref_name, ref_rel, args.time)
    records = charlib.characterize(inputs, cmodel)
    if args.format == "json":
        payload = {
            "q_s": q_s,
            "reference": ref_name,
            "reference_reliability": ref_rel,
            "t": args.time,
            "records": [
                {
                    "name": r.name,
                    "q_critical": r.q_critical,
                    "ser_ratio": r.ser_ratio_to_reference,
                    "failure_rate": r.failure_rate,
                    "reliability": r.reliability,
                }
                for r in records
            ],
        }
        print(json.dumps(payload, indent=2))
    else:
        print(f"q_s {q_s:.6g}")
        print(f"{'name':<16} {'q_critical':>12} {'ser_ratio':>12} {'failure_rate':>14} {'reliability':>12}")
        for r in records:
            print(
                f"{r.name:<16} {r.q_critical:>12.6g} {r.ser_ratio_to_reference:>12.6g} "
                f"{r.failure_rate:>14.6g} {r.reliability:>12.5f}"
            )
    return 0


def _parse_assignment_file(text: str, dfg: Dfg, library: ResourceLibrary):
    """Lines 'assign <node-id> <version-name> [nmr <odd-int>]'."""
    assignment: dict[str, model.ResourceVersion] = {}
    nmr: dict[str, int] = {}
    for lineno, fields in model._content_lines(text):
        if fields[0] != "assign" or len(fields) not in (3, 5):
            raise ParseError(
                f"line {lineno}: expected 'assign <node-id> <version-name> [nmr <odd-int>]'"
            )
        nid, vname = fields[1], fields[2]
        if len(fields) == 5:
            if fields[3] != "nmr":
                raise ParseError(f"line {lineno}: expected 'nmr <odd-int>'")
            try:
                nmr[nid] = int(fields[4])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}") from exc
        try:
            assignment[nid] = library.by_name(vname)
        except KeyError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    model.check_assignment(dfg, assignment)
    # Each node gets its own instance; nmr applies per node.
    instances = []
    node_to_instance = {}
    for i, nid in enumerate(dfg.node_ids):
        instances.append(Instance(i, assignment[nid].name, nmr.get(nid, 1)))
        node_to_instance[nid] = i
    return assignment, Binding(node_to_instance, tuple(instances))


def _design_from_json(payload: dict, dfg: Dfg, library: ResourceLibrary) -> Design:
    assignment = {
        nid: library.by_name(vname) for nid, vname in payload["assignment"].items()
    }
    model.check_assignment(dfg, assignment)
    instances = tuple(
        Instance(item["id"], item["version"], item.get("nmr", 1))
        for item in payload["instances"]
    )
    binding = Binding(dict(payload["binding"]), instances)
    schedule = Schedule(
        {nid: int(s) for nid, s in payload["schedule"].items()}, int(payload["latency"])
    )
    reliability = redundancy.evaluate_reliability(dfg, assignment, binding)
    return Design(
        assignment=assignment,
        schedule=schedule,
        binding=binding,
        latency=int(payload["latency"]),
        area=float(payload["area"]),
        reliability=reliability,
    )


def _cmd_eval(args: argparse.Namespace) -> int:
    dfg = _load_dfg(args.dfg)
    library = _load_library(args.lib)
    if args.design:
        try:
            payload = json.loads(_read_file(args.design))
        except json.JSONDecodeError as exc:
            raise InputError(f"bad design JSON {args.design}: {exc}") from exc
        design = _design_from_json(payload, dfg, library)
        assignment, binding = design.assignment, design.binding
    else:
        assignment, binding = _parse_assignment_file(
            _read_file(args.assign), dfg, library
        )
    reliability = redundancy.evaluate_reliability(dfg, assignment, binding)
    if args.format == "json":
        print(json.dumps({"reliability": reliability}))
    else:
        print(f"reliability {reliability:.5f}")
    return 0


# -- argument parsing -----------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relsyn",
        description="Reliability-aware scheduling, binding, and module selection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="synthesize one design under bounds")
    synth.add_argument("--dfg", required=True, help="data-flow graph file")
    synth.add_argument("--lib", required=True, help="resource library file")
    synth.add_argument("--latency", required=True, type=int, help="latency bound (cycles)")
    synth.add_argument("--area", required=True, type=float, help="area bound (units)")
    synth.add_argument("--method", choices=METHODS, default="ours")
    synth.add_argument("--format", choices=("text", "json"), default="text")
    synth.set_defaults(func=_cmd_synth)

    sweep = sub.add_parser("sweep", help="evaluate a grid of bounds to CSV")
    sweep.add_argument("--dfg", required=True)
    sweep.add_argument("--lib", required=True)
    sweep.add_argument("--latency", required=True, help="latency range <lo>:<hi>")
    sweep.add_argument("--area", required=True, help="area range <lo>:<hi>")
    sweep.add_argument("--step-l", dest="step_l", type=int, default=1)
    sweep.add_argument("--step-a", dest="step_a", type=float, default=1)
    sweep.add_argument("--methods", required=True, help="comma-separated method list")
    sweep.add_argument("--out", default=None, help="CSV output path (default stdout)")
    sweep.set_defaults(func=_cmd_sweep)

    char = sub.add_parser("characterize", help="critical charges -> reliabilities")
    char.add_argument("--qcrit", required=True, help="critical-charge file")
    char.add_argument("--ref", required=True, help="<name>=<reliability> anchor")
    group = char.add_mutually_exclusive_group(required=True)
    group.add_argument("--qs", type=float, help="charge-collection efficiency (C)")
    group.add_argument("--calibrate", help="<name>=<reliability> second fit point")
    char.add_argument("--time", type=float, default=1.0, help="mission time (default 1)")
    char.add_argument("--format", choices=("text", "json"), default="text")
    char.set_defaults(func=_cmd_characterize)

    ev = sub.add_parser("eval", help="evaluate an explicit assignment or design")
    ev.add_argument("--dfg", required=True)
    ev.add_argument("--lib", required=True)
    group = ev.add_mutually_exclusive_group(required=True)
    group.add_argument("--assign", help="assignment file")
    group.add_argument("--design", help="design JSON file (as emitted by synth)")
    ev.add_argument("--format", choices=("text", "json"), default="text")
    ev.set_defaults(func=_cmd_eval)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (
        InputError,
        ParseError,
        ValidationError,
        InfeasibleBoundError,
        oracle.OracleLimitError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
