#!/usr/bin/env python3
"""
Finite element oracle for torsion and the first Dirichlet eigenvalue.

Conforming P1 elements on uniformly (red) refined meshes of triangles,
rectangles, kites and circular sectors; three consecutive levels are combined
by Richardson extrapolation.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, cg, eigsh, factorized

from errors import DegenerateShape, DomainError, LevelTooHigh, NonContracting, SolverDivergence
from geometry import DEGENERATE_B, Kite, Rectangle, Sector, Triangle, derive

logger = logging.getLogger(__name__)

MAX_LEVEL = 9
MIN_LEVEL = 4
SECTOR_SLIVERS = 64
CG_RTOL = 1e-12
EIG_RTOL = 1e-12
EIG_MAX_ITER = 200

Shape = Union[Triangle, Rectangle, Sector, Kite]


@dataclass(frozen=True, eq=False)
class Mesh:
    vertices: np.ndarray
    elements: np.ndarray
    boundary_flags: np.ndarray
    level: int
    arc_flags: Optional[np.ndarray] = None
    arc_radius: Optional[float] = None

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def interior(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary_flags)

    def signed_areas(self) -> np.ndarray:
        p = self.vertices[self.elements]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def area(self) -> float:
        return float(np.sum(self.signed_areas()))

    def max_edge(self) -> float:
        p = self.vertices[self.elements]
        edges = np.concatenate([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]])
        return float(np.max(np.hypot(edges[:, 0], edges[:, 1])))

    def scaled(self, factor: float) -> "Mesh":
        radius = None if self.arc_radius is None else self.arc_radius * factor
        return Mesh(self.vertices * factor, self.elements, self.boundary_flags,
                    self.level, self.arc_flags, radius)


def _edges(elements: np.ndarray) -> np.ndarray:
    e = np.concatenate([elements[:, [0, 1]], elements[:, [1, 2]], elements[:, [2, 0]]])
    return np.sort(e, axis=1)


def _boundary_flags(n_vertices: int, elements: np.ndarray) -> np.ndarray:
    edges, counts = np.unique(_edges(elements), axis=0, return_counts=True)
    flags = np.zeros(n_vertices, dtype=bool)
    flags[edges[counts == 1].ravel()] = True
    return flags


def _make_mesh(vertices, elements, level=0, arc_flags=None, arc_radius=None) -> Mesh:
    vertices = np.asarray(vertices, dtype=float)
    elements = np.asarray(elements, dtype=np.int64)
    return Mesh(vertices, elements, _boundary_flags(len(vertices), elements),
                level, arc_flags, arc_radius)


def refine(mesh: Mesh) -> Mesh:
    """
    One red refinement: every element splits into four similar children.

    Midpoints of edges joining two arc vertices are pushed onto the arc.
    """
    elements = mesh.elements
    m = len(elements)
    edges, inverse = np.unique(_edges(elements), axis=0, return_inverse=True)
    inverse = inverse.ravel()
    n_old = mesh.n_vertices
    midpoints = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])

    arc_flags = None
    if mesh.arc_flags is not None:
        on_arc = mesh.arc_flags[edges[:, 0]] & mesh.arc_flags[edges[:, 1]]
        norms = np.hypot(midpoints[on_arc, 0], midpoints[on_arc, 1])
        midpoints[on_arc] *= (mesh.arc_radius / norms)[:, None]
        arc_flags = np.concatenate([mesh.arc_flags, on_arc])

    vertices = np.vstack([mesh.vertices, midpoints])
    m01 = n_old + inverse[:m]
    m12 = n_old + inverse[m:2 * m]
    m20 = n_old + inverse[2 * m:]
    v0, v1, v2 = elements[:, 0], elements[:, 1], elements[:, 2]
    children = np.concatenate([
        np.column_stack([v0, m01, m20]),
        np.column_stack([m01, v1, m12]),
        np.column_stack([m20, m12, v2]),
        np.column_stack([m01, m12, m20]),
    ])
    return _make_mesh(vertices, children, mesh.level + 1, arc_flags, mesh.arc_radius)


def _base_mesh(shape: Shape) -> Mesh:
    if isinstance(shape, Triangle):
        if float(shape.b) < DEGENERATE_B:
            raise DegenerateShape(f"triangle with b={shape.b} is too thin for the oracle")
        return _make_mesh(shape.vertices(), [[0, 1, 2]])
    if isinstance(shape, Rectangle):
        a, b = float(shape.a), float(shape.b)
        return _make_mesh([(-a, -b), (a, -b), (a, b), (-a, b)], [[0, 1, 2], [0, 2, 3]])
    if isinstance(shape, Kite):
        p, q, s = float(shape.p), float(shape.q), float(shape.s)
        return _make_mesh([(-p, 0.0), (q, 0.0), (0.0, s), (0.0, -s)], [[0, 1, 2], [0, 3, 1]])
    if isinstance(shape, Sector):
        r = float(shape.radius)
        thetas = np.linspace(-shape.angle / 2.0, shape.angle / 2.0, SECTOR_SLIVERS + 1)
        vertices = np.vstack([[0.0, 0.0], np.column_stack([r * np.cos(thetas), r * np.sin(thetas)])])
        elements = [[0, k, k + 1] for k in range(1, SECTOR_SLIVERS + 1)]
        arc = np.ones(len(vertices), dtype=bool)
        arc[0] = False
        return _make_mesh(vertices, elements, arc_flags=arc, arc_radius=r)
    raise DomainError(f"unsupported shape {type(shape).__name__}")


def mesh_domain(shape: Shape, level: int) -> Mesh:
    """
    Uniformly refined triangulation of a shape.

    Args:
        shape: Triangle, Rectangle, Kite or Sector
        level: Number of red refinements, 0..9

    Returns:
        Mesh with 4**level times the base element count
    """
    if level > MAX_LEVEL:
        raise LevelTooHigh(f"level {level} exceeds the cap {MAX_LEVEL}")
    if level < 0:
        raise DomainError(f"level must be nonnegative, got {level}")
    mesh = _base_mesh(shape)
    for _ in range(level):
        mesh = refine(mesh)
    return mesh


def dump_off(mesh: Mesh) -> str:
    """ASCII OFF listing of the mesh, z = 0."""
    lines = ["OFF", f"{mesh.n_vertices} {mesh.n_elements} 0"]
    lines.extend(f"{x:.17g} {y:.17g} 0" for x, y in mesh.vertices)
    lines.extend(f"3 {i} {j} {k}" for i, j, k in mesh.elements)
    return "\n".join(lines) + "\n"


# --- assembly ------------------------------------------------------------------

def _assemble(mesh: Mesh) -> Tuple[sp.csr_matrix, sp.csr_matrix, np.ndarray]:
    """Stiffness, consistent mass and the load vector of the unit source."""
    areas = mesh.signed_areas()
    if np.any(areas <= 0):
        raise DegenerateShape("mesh has elements with nonpositive signed area")
    p = mesh.vertices[mesh.elements]
    x, y = p[:, :, 0], p[:, :, 1]
    # gradients of the barycentric basis times 2A
    gx = np.column_stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]])
    gy = np.column_stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]])
    local_k = (gx[:, :, None] * gx[:, None, :] + gy[:, :, None] * gy[:, None, :]) / (4.0 * areas)[:, None, None]
    local_m = (np.ones((3, 3)) + np.eye(3))[None, :, :] * (areas / 12.0)[:, None, None]

    rows = np.repeat(mesh.elements, 3, axis=1).ravel()
    cols = np.tile(mesh.elements, (1, 3)).ravel()
    n = mesh.n_vertices
    K = sp.coo_matrix((local_k.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((local_m.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    load = np.bincount(mesh.elements.ravel(), weights=np.repeat(areas / 3.0, 3), minlength=n)
    return K, M, load


def _interior_system(mesh: Mesh):
    interior = mesh.interior
    if len(interior) == 0:
        raise DegenerateShape(f"mesh at level {mesh.level} has no interior vertices")
    K, M, load = _assemble(mesh)
    K_ii = K[interior][:, interior].tocsc()
    M_ii = M[interior][:, interior].tocsc()
    return interior, K_ii, M_ii, load[interior]


def solve_torsion(mesh: Mesh) -> Dict[str, float]:
    """
    Solve -Δu = 1 with zero boundary values.

    Returns:
        {"T": ∫u_h, "torsion_max": max nodal value}
    """
    _, K, _, f = _interior_system(mesh)
    diag = K.diagonal()
    jacobi = LinearOperator(K.shape, matvec=lambda v: v / diag, dtype=float)
    u, info = cg(K, f, rtol=CG_RTOL, atol=0.0, maxiter=max(1000, 10 * K.shape[0]), M=jacobi)
    if info != 0:
        raise SolverDivergence(f"conjugate gradients stopped with info={info} at level {mesh.level}")
    T = float(f @ u)
    logger.debug(f"Torsion level {mesh.level}: {K.shape[0]} dofs, T={T:.12g}")
    return {"T": T, "torsion_max": float(np.max(u))}


def solve_lambda1(mesh: Mesh) -> float:
    """
    Smallest generalized eigenvalue of (stiffness, consistent mass).

    A shift-invert Lanczos vector seeds inverse power iteration, which runs
    until the relative eigenvalue increment drops below 1e-12.
    """
    _, K, M, _ = _interior_system(mesh)
    n = K.shape[0]
    start = np.ones(n)
    if n > 2:
        _, vecs = eigsh(K, k=1, M=M, sigma=0.0, which="LM", v0=start)
        x = np.abs(vecs[:, 0])
    else:
        x = start
    solve = factorized(K)
    x = x / math.sqrt(x @ (M @ x))
    lam = float(x @ (K @ x))
    for iteration in range(EIG_MAX_ITER):
        y = solve(M @ x)
        y = y / math.sqrt(y @ (M @ y))
        new_lam = float(y @ (K @ y))
        x = y
        if abs(new_lam - lam) <= EIG_RTOL * abs(new_lam):
            logger.debug(f"Eigen level {mesh.level}: {n} dofs, lambda1={new_lam:.12g}, "
                         f"{iteration + 1} iterations")
            return new_lam
        lam = new_lam
    raise SolverDivergence(f"inverse iteration did not settle in {EIG_MAX_ITER} steps at level {mesh.level}")


# --- extrapolation -------------------------------------------------------------

@dataclass(frozen=True)
class RichardsonResult:
    estimate: float
    error_gauge: float
    observed_order: Optional[float]


def richardson(values: Sequence) -> RichardsonResult:
    """
    Remove the O(h²) term from three consecutive levels.

    Works on floats or Fractions; the estimate keeps the input type.

    Raises:
        NonContracting: the second increment is larger than the first
    """
    if len(values) != 3:
        raise DomainError("richardson needs exactly three consecutive levels")
    v1, v2, v3 = values
    d1, d2 = v1 - v2, v2 - v3
    if abs(d2) > abs(d1):
        raise NonContracting(f"increments grow: {float(d1):.3g} then {float(d2):.3g}")
    estimate = v3 + (v3 - v2) / 3
    order = None
    if d1 != 0 and d2 != 0 and (d1 > 0) == (d2 > 0):
        order = math.log2(float(d1) / float(d2))
    return RichardsonResult(estimate=estimate, error_gauge=abs(estimate - v3), observed_order=order)


# --- spectral summary ----------------------------------------------------------

@dataclass(frozen=True)
class SpectralResult:
    lambda1: float
    T: float
    torsion_max: float
    F: float
    h_sequence: Tuple[float, ...]
    error_gauge: float
    area: float = 0.0
    levels: Tuple[int, ...] = ()
    lambda_gauge: float = 0.0
    T_gauge: float = 0.0
    raw: Dict[str, List[float]] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            "lambda1": self.lambda1,
            "T": self.T,
            "torsion_max": self.torsion_max,
            "F": self.F,
            "h_sequence": list(self.h_sequence),
            "error_gauge": self.error_gauge,
            "area": self.area,
            "levels": list(self.levels),
            "lambda_gauge": self.lambda_gauge,
            "T_gauge": self.T_gauge,
        }


def shape_area(shape: Shape) -> float:
    if isinstance(shape, Triangle):
        return float(shape.b) / 2.0
    return float(shape.area)


def required_level(shape: Shape) -> int:
    """Smallest level putting four elements across the thinnest direction."""
    if not isinstance(shape, Triangle):
        return MIN_LEVEL
    data = derive(shape)
    h_min = 2.0 * data.area / data.diameter
    level = max(MIN_LEVEL, math.ceil(math.log2(4.0 * data.diameter / h_min)))
    if level > MAX_LEVEL:
        raise DegenerateShape(f"triangle ({shape.a}, {shape.b}) needs level {level} > {MAX_LEVEL}; "
                              f"use the analytic bounds")
    return level


def spectral(shape: Shape, max_level: int = 7) -> SpectralResult:
    """
    λ1, T and F of a shape from levels max_level-2..max_level, extrapolated.

    Thin triangles raise max_level to the level that resolves their short
    direction.
    """
    max_level = max(max_level, required_level(shape))
    if max_level > MAX_LEVEL:
        raise LevelTooHigh(f"level {max_level} exceeds the cap {MAX_LEVEL}")
    levels = (max_level - 2, max_level - 1, max_level)

    mesh = mesh_domain(shape, levels[0])
    lambdas, torsions, maxima, sizes = [], [], [], []
    for level in levels:
        if mesh.level < level:
            mesh = refine(mesh)
        torsion = solve_torsion(mesh)
        lambdas.append(solve_lambda1(mesh))
        torsions.append(torsion["T"])
        maxima.append(torsion["torsion_max"])
        sizes.append(mesh.max_edge())
        logger.info(f"{type(shape).__name__} level {level}: {len(mesh.interior)} dofs, "
                    f"lambda1={lambdas[-1]:.10g}, T={torsions[-1]:.10g}")

    lam = richardson(lambdas)
    tor = richardson(torsions)
    area = shape_area(shape)
    F = lam.estimate * tor.estimate / area
    F_finest = lambdas[-1] * torsions[-1] / area
    gauge = abs(F - F_finest)
    if isinstance(shape, Sector):
        # polygon defect of the finest chord
        chord = shape.angle / (SECTOR_SLIVERS * 2 ** max_level)
        gauge += F * (1.0 - math.cos(chord / 2.0)) * 4.0
    return SpectralResult(
        lambda1=lam.estimate, T=tor.estimate, torsion_max=maxima[-1], F=F,
        h_sequence=tuple(sizes), error_gauge=gauge, area=area, levels=levels,
        lambda_gauge=lam.error_gauge, T_gauge=tor.error_gauge,
        raw={"lambda1": lambdas, "T": torsions},
    )
