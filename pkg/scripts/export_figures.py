"""Export every representative cell and every assembly preset as STL and OFF."""

import argparse
from pathlib import Path

from screfine.analysis import representative_cell
from screfine.figures import PRESETS, assembly_cells
from screfine.lattice import PLANS, RefinementPlan
from screfine.meshio import mesh_filename, to_float_mesh, watertight_blocks, write_mesh


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("meshes"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for plan in PLANS.values():
        for cls in plan.classes:
            mesh = to_float_mesh([representative_cell(cls, plan)])
            for fmt in ("stl", "off"):
                write_mesh(mesh, args.out / mesh_filename(plan, cls, fmt), fmt)
            print(f"{plan.label('-'):>14} {cls.name:<7} {len(mesh.triangles):3d} triangles")

    for name, (plan_name, _) in sorted(PRESETS.items()):
        cells = assembly_cells(name)
        mesh = to_float_mesh(cells)
        assert all(watertight_blocks(mesh)), name
        for fmt in ("stl", "off"):
            path = args.out / mesh_filename(RefinementPlan.parse(plan_name), name, fmt, assembly=True)
            write_mesh(mesh, path, fmt)
        print(f"{name:>17}: {len(cells)} cells")


if __name__ == "__main__":
    main()
