"""OFF and binary STL export of exact cells."""

from __future__ import annotations

import os
import struct
from collections import Counter
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Sequence, TextIO

import numpy as np

from .lattice import RefinementPlan, SiteClass
from .voronoi import ConvexCell

STL_HEADER = 80


@dataclass
class FloatMesh:
    """Float copy of one or more cells.

    ``polygons`` keeps the original faces (for OFF); ``triangles`` is their
    fan triangulation (for STL).  ``owner`` maps each triangle to its cell.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    polygons: list[tuple[int, ...]] = field(default_factory=list)
    owner: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    generators: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    blocks: list[tuple[int, int]] = field(default_factory=list)  # triangle ranges per cell

    def normals(self) -> np.ndarray:
        if len(self.triangles) == 0:
            return np.zeros((0, 3))
        v = self.vertices[self.triangles]
        n = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        return n / np.linalg.norm(n, axis=1, keepdims=True)


def to_float_mesh(cells: Sequence[ConvexCell]) -> FloatMesh:
    verts: list[tuple[float, float, float]] = []
    tris: list[tuple[int, int, int]] = []
    polys: list[tuple[int, ...]] = []
    owner: list[int] = []
    gens: list[tuple[float, float, float]] = []
    blocks = []
    for ci, cell in enumerate(cells):
        base = len(verts)
        verts.extend(v.to_floats() for v in cell.vertices)
        gens.append(cell.center().to_floats())
        start = len(tris)
        for f in cell.faces:
            polys.append(tuple(base + k for k in f))
            for a, b in zip(f[1:], f[2:]):
                tris.append((base + f[0], base + a, base + b))
                owner.append(ci)
        blocks.append((start, len(tris)))
    return FloatMesh(
        vertices=np.array(verts, dtype=np.float64).reshape(-1, 3),
        triangles=np.array(tris, dtype=np.int64).reshape(-1, 3),
        polygons=polys,
        owner=np.array(owner, dtype=np.int64),
        generators=np.array(gens, dtype=np.float64).reshape(-1, 3),
        blocks=blocks,
    )


def write_off(mesh: FloatMesh, sink: TextIO) -> None:
    """ASCII OFF; polygon faces when available, else triangles."""
    faces = mesh.polygons if mesh.polygons else [tuple(t) for t in mesh.triangles.tolist()]
    sink.write("OFF\n")
    sink.write(f"{len(mesh.vertices)} {len(faces)} 0\n")
    for x, y, z in mesh.vertices.tolist():
        sink.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
    for f in faces:
        sink.write(" ".join([str(len(f))] + [str(int(i)) for i in f]) + "\n")


def read_off(source: TextIO | str | os.PathLike) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="ascii") as fh:
            return read_off(fh)
    tokens = [ln.split("#", 1)[0].strip() for ln in source]
    lines = [t for t in tokens if t]
    if not lines or lines[0] != "OFF":
        raise ValueError("missing OFF header")
    nv, nf, _ = (int(x) for x in lines[1].split())
    verts = np.array([[float(x) for x in ln.split()] for ln in lines[2 : 2 + nv]], dtype=np.float64)
    faces = []
    for ln in lines[2 + nv : 2 + nv + nf]:
        parts = [int(x) for x in ln.split()]
        faces.append(tuple(parts[1 : 1 + parts[0]]))
    return verts.reshape(-1, 3), faces


def write_stl(mesh: FloatMesh, sink: BinaryIO) -> None:
    """Binary little-endian STL."""
    sink.write(b"\0" * STL_HEADER)
    sink.write(struct.pack("<I", len(mesh.triangles)))
    rec = struct.Struct("<12fH")
    normals = mesh.normals()
    for tri, n in zip(mesh.triangles, normals):
        v = mesh.vertices[tri]
        sink.write(rec.pack(*n, *v[0], *v[1], *v[2], 0))


def read_stl(source: BinaryIO | str | os.PathLike) -> np.ndarray:
    """Triangles as an (T, 4, 3) float32 array: normal then three vertices."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return read_stl(fh)
    data = source.read()
    (count,) = struct.unpack_from("<I", data, STL_HEADER)
    dt = np.dtype([("v", "<f4", (12,)), ("attr", "<u2")])
    recs = np.frombuffer(data, dtype=dt, count=count, offset=STL_HEADER + 4)
    return recs["v"].reshape(-1, 4, 3)


def stl_size(triangles: int) -> int:
    return STL_HEADER + 4 + 50 * triangles


def watertight_blocks(mesh: FloatMesh) -> list[bool]:
    """Per cell: every directed triangle edge is matched by its reverse exactly once."""
    out = []
    for start, stop in mesh.blocks:
        edges = Counter()
        for a, b, c in mesh.triangles[start:stop].tolist():
            for e in ((a, b), (b, c), (c, a)):
                edges[e] += 1
        out.append(all(n == 1 and edges.get((e[1], e[0])) == 1 for e, n in edges.items()))
    return out


def outward_oriented(mesh: FloatMesh) -> bool:
    if len(mesh.triangles) == 0:
        return True
    v = mesh.vertices[mesh.triangles]
    n = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
    d = v.mean(axis=1) - mesh.generators[mesh.owner]
    return bool(np.all((n * d).sum(1) > 0))


def mesh_filename(plan: RefinementPlan, cls: SiteClass | str, fmt: str, assembly: bool = False) -> str:
    name = cls.name if isinstance(cls, SiteClass) else str(cls)
    return f"{plan.label('-')}_{name}{'_assembly' if assembly else ''}.{fmt}"


def write_mesh(mesh: FloatMesh, path, fmt: str) -> None:
    if fmt == "off":
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            write_off(mesh, fh)
    elif fmt == "stl":
        with open(path, "wb") as fh:
            write_stl(mesh, fh)
    else:
        raise ValueError(f"unknown mesh format {fmt!r}")
