"""Command-line entry point."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import fmt_float, fmt_rat, run_golden_checks, representative_cell, volume_table
from .exactnum import Rat, as_rat
from .figures import PRESETS, assembly_cells
from .lattice import Box, ClassNotInPlan, InvalidPlan, RefinementPlan, SiteClass, generate, shell_histogram
from .meshio import to_float_mesh, write_mesh
from .planar import recurrence_table
from .voronoi import cell_metrics, face_census, volume


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _plan(text: str) -> RefinementPlan:
    try:
        return RefinementPlan.parse(text)
    except InvalidPlan as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _cls(text: str) -> SiteClass:
    try:
        return SiteClass.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _rat(text: str) -> Rat:
    try:
        return as_rat(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _box(text: str) -> Box:
    try:
        return Box.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="screfine", description="Refined simple-cubic lattices and their exact Voronoi cells.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sites", help="list lattice sites in a box")
    s.add_argument("--plan", type=_plan, required=True)
    s.add_argument("--bbox", type=_box, default=Box.cube(0, 1), help="lo,hi or x0,y0,z0,x1,y1,z1")

    s = sub.add_parser("cell", help="build the Voronoi cell of a class representative")
    s.add_argument("--plan", type=_plan, required=True)
    s.add_argument("--class", dest="cls", type=_cls, required=True)
    s.add_argument("--export", nargs=2, metavar=("FMT", "PATH"))

    s = sub.add_parser("shells", help="neighbor shell histogram")
    s.add_argument("--plan", type=_plan, required=True)
    s.add_argument("--class", dest="cls", type=_cls, required=True)
    s.add_argument("--max-r2", type=_rat, required=True)

    s = sub.add_parser("volumes", help="volume table and partition identity")
    s.add_argument("--plan", type=_plan, required=True)

    s = sub.add_parser("verify", help="run every golden check")
    s.add_argument("--mc-samples", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--grid-n", type=int, default=48)
    s.add_argument("--report", type=Path, help="write the structured JSON report here")

    s = sub.add_parser("planar", help="2-D refinement recurrence")
    s.add_argument("--kind", choices=("square", "triangular"), required=True)
    s.add_argument("--steps", type=int, default=3)

    s = sub.add_parser("export-assembly", help="multi-cell mesh for a figure preset")
    s.add_argument("--plan", type=_plan)
    s.add_argument("--figure", choices=sorted(PRESETS), required=True)
    s.add_argument("path", type=Path)
    return p


def _cmd_sites(args, out):
    for site in generate(args.plan, args.bbox):
        out.write(f"{site.cls.name} {fmt_rat(site.pos.x)} {fmt_rat(site.pos.y)} {fmt_rat(site.pos.z)}\n")


def _cmd_cell(args, out):
    cell = representative_cell(args.cls, args.plan)
    v = volume(cell)
    out.write(f"plan: {args.plan}\nclass: {args.cls.name}\n")
    out.write(f"volume: {fmt_rat(v)} ~ {fmt_float(float(v))}\n")
    out.write(f"f-vector: {face_census(cell).describe()}\n")
    out.write("edge census (squared length, length, count):\n")
    for r2, n in cell_metrics(cell).edge_r2_census:
        out.write(f"  {fmt_rat(r2)}  {fmt_float(float(r2) ** 0.5)}  {n}\n")
    out.write("vertices:\n")
    for p in sorted(cell.vertices):
        out.write(f"  {fmt_rat(p.x)} {fmt_rat(p.y)} {fmt_rat(p.z)}\n")
    if args.export:
        fmt, path = args.export
        fmt = fmt.lower()
        if fmt not in ("off", "stl"):
            raise UsageError(f"unknown export format {fmt!r}")
        write_mesh(to_float_mesh([cell]), path, fmt)
        out.write(f"wrote {path}\n")


def _cmd_shells(args, out):
    out.write("squared_distance count\n")
    for r2, n in shell_histogram(args.cls, args.plan, args.max_r2):
        out.write(f"{fmt_rat(r2)} {n}\n")


def _cmd_volumes(args, out):
    table = volume_table(args.plan)
    out.write("class multiplicity volume approx\n")
    for cls, m, v in table.entries:
        out.write(f"{cls.name} {m} {fmt_rat(v)} {fmt_float(float(v))}\n")
    out.write(f"{table.identity()}\n")
    out.write(f"partition: {'OK' if table.partition_ok else 'FAILED'}\n")


def _cmd_verify(args, out):
    if args.grid_n < 48 or args.grid_n % 48:
        raise UsageError("--grid-n must be a positive multiple of 48")
    if args.mc_samples and args.mc_samples < 10_000:
        raise UsageError("--mc-samples must be 0 or at least 10000")
    report = run_golden_checks(mc_samples=args.mc_samples, seed=args.seed, grid_n=args.grid_n)
    out.write(report.to_text())
    if args.report:
        args.report.write_text(report.to_json(), encoding="utf-8")
    return 0 if report.all_passed else 1


def _cmd_planar(args, out):
    if args.steps < 0:
        raise UsageError("--steps must be nonnegative")
    out.write("step constant^2 gram11 gram12 gram22 area^2 rotation_deg points_per_original_cell\n")
    for b in recurrence_table(args.kind, args.steps):
        g = b.gram
        out.write(
            f"{b.steps} {fmt_rat(b.constant2)} {fmt_rat(g[0][0])} {fmt_rat(g[0][1])} {fmt_rat(g[1][1])} "
            f"{fmt_rat(b.area2)} {b.rotation_deg} {b.points_per_original_cell()}\n"
        )


def _cmd_export_assembly(args, out):
    plan_name = PRESETS[args.figure][0]
    if args.plan is not None and args.plan.label() != plan_name:
        raise UsageError(f"figure {args.figure} uses plan {plan_name}")
    fmt = args.path.suffix.lstrip(".").lower()
    if fmt not in ("off", "stl"):
        raise UsageError("output path must end in .off or .stl")
    cells = assembly_cells(args.figure)
    write_mesh(to_float_mesh(cells), args.path, fmt)
    out.write(f"wrote {len(cells)} cells to {args.path}\n")


COMMANDS = {
    "sites": _cmd_sites,
    "cell": _cmd_cell,
    "shells": _cmd_shells,
    "volumes": _cmd_volumes,
    "verify": _cmd_verify,
    "planar": _cmd_planar,
    "export-assembly": _cmd_export_assembly,
}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out) or 0
    except (UsageError, ClassNotInPlan) as exc:
        err.write(f"usage error: {exc}\n")
        return 2
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
