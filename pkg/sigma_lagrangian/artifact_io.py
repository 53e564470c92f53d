"""Meshes, point tables, phase portraits and the files they are written to.

Every float leaves this module with 17 significant digits, so CSV output read back
with :func:`read_mesh_csv` reproduces the sampled vertices exactly.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import sys
from collections import defaultdict
from contextlib import contextmanager
from pathlib import Path
from typing import (
    Any,
    Dict,
    Iterator,
    List,
    Optional,
    Sequence,
    TextIO,
    Tuple,
    Union,
)

import numpy as np

from sigma_lagrangian.exceptions import (
    ArtifactIOError,
    MeshExportError,
    UndefinedAngleError,
    ValidationError,
)
from sigma_lagrangian.foliation_core import eval_immersion, lagrangian_angle
from sigma_lagrangian.hs_dynamics import fixed_points
from sigma_lagrangian.models import HSParams, Mesh, PhasePortrait, SamplePlan
from sigma_lagrangian.oracle_verify import sample_points
from sigma_lagrangian.profile_curves import FoliatedSpec
from sigma_lagrangian.utils import format_float

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DEGENERATE_AREA = 1e-14
MESH_FORMATS = ("ply_ascii", "csv")


def _uv_sphere(m: int) -> Tuple[np.ndarray, List[Tuple[int, int, int]]]:
    """Unit vectors of R^3 and triangles of a UV sphere with m longitudes.

    Vertex 0 is the north pole, then ``m - 1`` rings of m vertices, then the south
    pole: ``m (m - 1) + 2`` vertices and ``2 m (m - 1)`` triangles.
    """
    points = [np.array([1.0, 0.0, 0.0])]
    for i in range(1, m):
        polar = math.pi * i / m
        for j in range(m):
            azimuth = 2.0 * math.pi * j / m
            points.append(
                np.array(
                    [
                        math.cos(polar),
                        math.sin(polar) * math.cos(azimuth),
                        math.sin(polar) * math.sin(azimuth),
                    ]
                )
            )
    points.append(np.array([-1.0, 0.0, 0.0]))
    south = len(points) - 1

    def ring(i: int, j: int) -> int:
        return 1 + (i - 1) * m + (j % m)

    faces = []
    for j in range(m):
        faces.append((0, ring(1, j), ring(1, j + 1)))
        faces.append((south, ring(m - 1, j + 1), ring(m - 1, j)))
    for i in range(1, m - 1):
        for j in range(m):
            a, b = ring(i, j), ring(i, j + 1)
            c, d = ring(i + 1, j), ring(i + 1, j + 1)
            faces.append((a, c, d))
            faces.append((a, d, b))
    return np.array(points), faces


def _triangle_area(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> float:
    u, v = q - p, r - p
    gram = float(u @ u) * float(v @ v) - float(u @ v) ** 2
    return 0.5 * math.sqrt(max(gram, 0.0))


def _beta_or_nan(spec: FoliatedSpec, s: float, x: np.ndarray) -> float:
    try:
        return lagrangian_angle(spec, s, x)
    except UndefinedAngleError:
        return math.nan


def sample_mesh(
    spec: FoliatedSpec, s_steps: int, sphere_steps: int, slice_ok: bool = False
) -> Mesh:
    """Sample the immersion on UV-sphere leaves at ``s_steps`` parameters.

    :param spec: Immersion data.
    :type spec: FoliatedSpec
    :param s_steps: Number of leaves, evenly spaced over the domain.
    :type s_steps: int
    :param sphere_steps: Longitudes per leaf (and latitude bands).
    :type sphere_steps: int
    :param slice_ok: For n > 3, mesh the slice where x spans the first three axes.
    :type slice_ok: bool
    :return: Mesh with ``s_steps (m (m - 1) + 2)`` vertices; degenerate triangles
        (area below 1e-14) are dropped.
    :rtype: Mesh
    """
    if s_steps < 2:
        raise ValidationError(f"s_steps: must be >= 2, got {s_steps}")
    if sphere_steps < 3:
        raise ValidationError(f"sphere_steps: must be >= 3, got {sphere_steps}")
    n = spec.n
    if n > 3 and not slice_ok:
        raise MeshExportError(
            f"Triangulated meshes need n = 3 (got n = {n}); "
            "export a point table or request a 2-D slice"
        )
    directions, leaf_faces = _uv_sphere(sphere_steps)
    if n > 3:
        directions = np.hstack([directions, np.zeros((len(directions), n - 3))])
    lower, upper = spec.domain
    vertices, s_column, beta_column, faces = [], [], [], []
    skipped = 0
    for s in np.linspace(lower, upper, s_steps):
        offset = len(vertices)
        for x in directions:
            vertices.append(eval_immersion(spec, float(s), x).as_real())
            s_column.append(float(s))
            beta_column.append(_beta_or_nan(spec, float(s), x))
        for a, b, c in leaf_faces:
            ia, ib, ic = offset + a, offset + b, offset + c
            area = _triangle_area(vertices[ia], vertices[ib], vertices[ic])
            if area < DEGENERATE_AREA:
                skipped += 1
                continue
            faces.append((ia, ib, ic))
    if skipped:
        logger.info("Dropped %d degenerate triangles", skipped)
    logger.debug("Sampled %d vertices and %d faces", len(vertices), len(faces))
    return Mesh(
        vertices=np.array(vertices),
        faces=np.array(faces, dtype=np.int64).reshape(-1, 3),
        s=np.array(s_column),
        beta=np.array(beta_column),
    )


def sample_point_table(spec: FoliatedSpec, plan: SamplePlan = SamplePlan()) -> Mesh:
    """Sample the immersion at the points of a sample plan, for any n."""
    vertices, s_column, beta_column = [], [], []
    for s, x in sample_points(spec, plan):
        vertices.append(eval_immersion(spec, s, x).as_real())
        s_column.append(s)
        beta_column.append(_beta_or_nan(spec, s, x.x))
    if not vertices:
        return Mesh.empty(spec.n)
    return Mesh(
        vertices=np.array(vertices),
        faces=np.zeros((0, 3), dtype=np.int64),
        s=np.array(s_column),
        beta=np.array(beta_column),
    )


@contextmanager
def _open_output(path: Optional[PathLike]) -> Iterator[TextIO]:
    """Yield a text stream for ``path``, or standard output when it is ``None``."""
    if path is None:
        yield sys.stdout
        return
    buffer = io.StringIO()
    yield buffer
    try:
        Path(path).write_text(buffer.getvalue(), encoding="utf-8")
    except OSError as error:
        raise ArtifactIOError(str(path), str(error)) from error


def _columns(mesh: Mesh) -> List[str]:
    return [f"x{i + 1}" for i in range(mesh.dimension)] + ["s", "beta"]


def _vertex_rows(mesh: Mesh) -> Iterator[List[str]]:
    for vertex, s, beta in zip(mesh.vertices, mesh.s, mesh.beta):
        yield [format_float(float(v)) for v in vertex] + [
            format_float(float(s)),
            format_float(float(beta)),
        ]


def write_mesh(
    mesh: Mesh, path: Optional[PathLike], format: str = "ply_ascii"
) -> None:
    """Write a mesh as ASCII PLY (vertices and faces) or CSV (vertices only).

    :param mesh: The mesh.
    :type mesh: Mesh
    :param path: Output file; ``None`` writes to standard output.
    :type path: Optional[PathLike]
    :param format: ``"ply_ascii"`` or ``"csv"``.
    :type format: str
    """
    if format not in MESH_FORMATS:
        raise ValidationError(f"format: must be ply_ascii or csv, got {format}")
    with _open_output(path) as stream:
        if format == "csv":
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(_columns(mesh))
            writer.writerows(_vertex_rows(mesh))
        else:
            stream.write("ply\nformat ascii 1.0\n")
            stream.write(f"element vertex {len(mesh.vertices)}\n")
            for name in _columns(mesh):
                stream.write(f"property double {name}\n")
            stream.write(f"element face {len(mesh.faces)}\n")
            stream.write("property list uchar int vertex_indices\n")
            stream.write("end_header\n")
            for row in _vertex_rows(mesh):
                stream.write(" ".join(row) + "\n")
            for a, b, c in mesh.faces:
                stream.write(f"3 {a} {b} {c}\n")
    logger.info("Wrote %d vertices as %s to %s", len(mesh.vertices), format, path)


def read_mesh_csv(path: PathLike) -> Mesh:
    """Read the vertex table written by :func:`write_mesh` in CSV format."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise ArtifactIOError(str(path), str(error)) from error
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][-2:] != ["s", "beta"]:
        raise ArtifactIOError(str(path), "missing x1..x2n,s,beta header")
    dimension = len(rows[0]) - 2
    if not rows[1:]:
        return Mesh.empty(dimension // 2)
    table = np.array([[float(value) for value in row] for row in rows[1:]])
    return Mesh(
        vertices=table[:, :dimension],
        faces=np.zeros((0, 3), dtype=np.int64),
        s=table[:, dimension],
        beta=table[:, dimension + 1],
    )


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return str(value)


def write_table(
    header: Sequence[str], rows: Sequence[Sequence[Any]], path: Optional[PathLike]
) -> None:
    """Write a CSV table with a header row."""
    with _open_output(path) as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([_cell(value) for value in row])


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(item) for item in value.tolist()]
    if isinstance(value, (np.floating, float)):
        number = float(value)
        return number if math.isfinite(number) else format_float(number)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_report(data: Any, path: Optional[PathLike]) -> None:
    """Write a JSON report with sorted keys; non-finite floats become strings."""
    with _open_output(path) as stream:
        json.dump(_jsonable(data), stream, indent=2, sort_keys=True)
        stream.write("\n")


_EdgeKey = Tuple[str, int, int]


def _crossing(
    values: np.ndarray,
    alphas: np.ndarray,
    radii: np.ndarray,
    key: _EdgeKey,
) -> np.ndarray:
    kind, i, j = key
    i2, j2 = (i + 1, j) if kind == "a" else (i, j + 1)
    fa, fb = values[i, j], values[i2, j2]
    t = fa / (fa - fb)
    start = np.array([alphas[i], radii[j]])
    end = np.array([alphas[i2], radii[j2]])
    return start + t * (end - start)


def _cell_segments(
    values: np.ndarray, i: int, j: int
) -> List[Tuple[_EdgeKey, _EdgeKey]]:
    corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
    edges: List[_EdgeKey] = [("a", i, j), ("r", i + 1, j), ("a", i, j + 1), ("r", i, j)]
    signs = [values[c] >= 0 for c in corners]
    cut = [signs[k] != signs[(k + 1) % 4] for k in range(4)]
    hits = [edges[k] for k in range(4) if cut[k]]
    if len(hits) == 2:
        return [(hits[0], hits[1])]
    if len(hits) == 4:
        center = float(np.mean([values[c] for c in corners])) >= 0
        if center == signs[0]:
            return [(edges[0], edges[1]), (edges[2], edges[3])]
        return [(edges[3], edges[0]), (edges[1], edges[2])]
    return []


def _chain(segments: List[Tuple[_EdgeKey, _EdgeKey]]) -> List[List[_EdgeKey]]:
    touching: Dict[_EdgeKey, List[int]] = defaultdict(list)
    for index, (first, second) in enumerate(segments):
        touching[first].append(index)
        touching[second].append(index)
    used = [False] * len(segments)
    chains = []
    for start in range(len(segments)):
        if used[start]:
            continue
        used[start] = True
        chain = list(segments[start])
        for forward in (True, False):
            while True:
                end = chain[-1] if forward else chain[0]
                following = [k for k in touching[end] if not used[k]]
                if not following:
                    break
                used[following[0]] = True
                first, second = segments[following[0]]
                nxt = second if first == end else first
                if forward:
                    chain.append(nxt)
                else:
                    chain.insert(0, nxt)
        chains.append(chain)
    return chains


def contour_polylines(
    values: np.ndarray, alphas: np.ndarray, radii: np.ndarray
) -> List[np.ndarray]:
    """Marching-squares zero contour of ``values[i, j]`` at ``(alphas[i], radii[j])``.

    Crossings are linearly interpolated along cell edges and joined into polylines
    through the edges they share; saddle cells are split by the sign of the cell mean.
    """
    segments = []
    for i in range(len(alphas) - 1):
        for j in range(len(radii) - 1):
            segments.extend(_cell_segments(values, i, j))
    return [
        np.array([_crossing(values, alphas, radii, key) for key in chain])
        for chain in _chain(segments)
    ]


def phase_portrait_data(
    params: HSParams,
    E_levels: Sequence[float] = (),
    grid: Tuple[int, int] = (201, 201),
    r_max: Optional[float] = None,
) -> PhasePortrait:
    """Contours of the first integral on ``[-pi/2, 3 pi/2] x (0, r_max]``.

    The levels E0 and 0 are always included. The alpha grid is symmetric about
    ``pi/2`` so mirrored contours coincide.

    :param params: ODE parameters with ``C > 0``.
    :type params: HSParams
    :param E_levels: Extra energy levels.
    :type E_levels: Sequence[float]
    :param grid: Number of alpha and r nodes; the alpha count is made odd.
    :type grid: Tuple[int, int]
    :param r_max: Upper radius, three times the fixed-point radius by default.
    :type r_max: Optional[float]
    :return: Polylines per level with the fixed point.
    :rtype: PhasePortrait
    """
    if not params.C > 0:
        raise ValidationError(f"C: the phase portrait needs C > 0, got {params.C}")
    alpha_steps, r_steps = grid
    if alpha_steps < 3 or r_steps < 3:
        raise ValidationError(f"grid: needs at least 3 x 3 nodes, got {grid}")
    alpha_steps += 1 - alpha_steps % 2
    point, E0 = fixed_points(params)
    top = 3.0 * point.r if r_max is None else r_max
    if not top > 0:
        raise ValidationError(f"r_max: must be positive, got {r_max}")
    alphas = np.linspace(-math.pi / 2, 3 * math.pi / 2, alpha_steps)
    radii = np.linspace(top / r_steps, top, r_steps)
    A, R = np.meshgrid(alphas, radii, indexing="ij")
    energies = 2.0 * R**params.n * np.sin(A) - params.C * R**2
    levels: Dict[float, List[np.ndarray]] = {}
    for level in sorted({float(E) for E in E_levels} | {E0, 0.0}):
        levels[level] = contour_polylines(energies - level, alphas, radii)
        logger.debug("Level %.6g: %d polylines", level, len(levels[level]))
    return PhasePortrait(levels=levels, fixed_point=(point.alpha, point.r), E0=E0)


def portrait_rows(portrait: PhasePortrait) -> List[Tuple[float, int, float, float]]:
    """Rows ``(E, polyline, alpha, r)`` for CSV export of a phase portrait."""
    rows = []
    for level, polylines in portrait.levels.items():
        for index, line in enumerate(polylines):
            rows.extend((level, index, float(a), float(r)) for a, r in line)
    return rows
