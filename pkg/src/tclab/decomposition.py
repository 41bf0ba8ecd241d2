"""Splitting multi-plane configurations into single-plane components.

A union of winding curves near several planes is grouped by assigning
every sample point to the plane whose tube (normal distance below a
fixed width) contains it.  The grouping is only meaningful while the
tubes stay disjoint over the sampled region; the radius where two tubes
must start overlapping is a function of the smallest principal angle
between the planes.

Irreducibility of one group is decided by connectivity of the sampled
support away from the vertex, with a spacing-refinement loop so that a
coarse sample cannot fake a connection.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

from .currents import WindingCurve, curve_mass
from .errors import MassLeak, TubesOverlap
from .geom import ORTHO_TOL, Plane2

VERTEX_BALL = 1e-6
LINK_FACTOR = 4.0
MASS_LEAK_TOL = 1e-9


@dataclass(frozen=True)
class EmbeddedCurve:
    """Winding curve placed in ambient space by an orthonormal frame.

    ``frame`` has shape (D, 2 + n); its first two columns span the
    reference plane of the curve's cylinder coordinates.
    """

    curve: WindingCurve
    frame: np.ndarray

    def __post_init__(self):
        frame = np.asarray(self.frame, dtype=float)
        object.__setattr__(self, "frame", frame)
        if frame.ndim != 2 or frame.shape[1] != 2 + self.curve.n:
            raise ValueError("frame must have 2 + n orthonormal columns")
        if not np.allclose(frame.T @ frame, np.eye(frame.shape[1]),
                           atol=100 * ORTHO_TOL):
            raise ValueError("frame columns must be orthonormal")

    @property
    def dim(self) -> int:
        return self.frame.shape[0]

    def plane(self) -> Plane2:
        return Plane2(e1=self.frame[:, 0].copy(), e2=self.frame[:, 1].copy())

    def points(self, theta=None) -> np.ndarray:
        if theta is None:
            theta = np.arange(self.curve.M) \
                * (self.curve.period / self.curve.M)
        return self.curve.points(theta) @ self.frame.T

    def mass(self) -> float:
        return curve_mass(self.curve.space_curve())


def principal_angles(p: Plane2, q: Plane2) -> np.ndarray:
    """Principal angles between two planes, ascending, in [0, pi/2]."""
    s = np.linalg.svd(p.basis().T @ q.basis(), compute_uv=False)
    return np.arccos(np.clip(s, -1.0, 1.0))[::-1]


def tube_overlap_radius(planes, width: float) -> float:
    """Radius beyond which two tubes of the given width stay disjoint.

    A point within width of two planes satisfies
    |x| <= width (1 + 2 / sin(phi_min)) with phi_min the smallest
    positive principal angle of the worst pair, so outside that radius
    the tubes cannot meet.
    """
    worst = 0.0
    for i in range(len(planes)):
        for j in range(i + 1, len(planes)):
            ang = principal_angles(planes[i], planes[j])
            pos = ang[ang > 1e-9]
            if pos.size == 0:
                return np.inf
            worst = max(worst, width * (1.0 + 2.0 / np.sin(pos[-1])))
    return worst


@dataclass(frozen=True)
class PlaneCluster:
    """Assignment of sample points to plane tubes."""

    planes: list
    width: float
    assignment: np.ndarray
    distances: np.ndarray
    complete: bool

    @property
    def unassigned(self) -> np.ndarray:
        return self.assignment < 0


def cluster_by_planes(points, planes, width: float) -> PlaneCluster:
    """Assign each point to the unique plane tube containing it.

    Raises TubesOverlap when any point lies inside two tubes; points in
    no tube are left unassigned and mark the cluster incomplete.
    """
    points = np.asarray(points, dtype=float)
    dists = np.stack([np.linalg.norm(points - points @ p.projector(),
                                     axis=-1) for p in planes], axis=1)
    inside = dists <= width
    counts = np.sum(inside, axis=1)
    if np.any(counts > 1):
        k = int(np.argmax(counts > 1))
        raise TubesOverlap(
            f"point {points[k]} lies within width {width} of "
            f"{int(counts[k])} planes")
    assignment = np.where(counts == 1, np.argmax(inside, axis=1), -1)
    return PlaneCluster(planes=list(planes), width=width,
                        assignment=assignment.astype(int),
                        distances=np.min(dists, axis=1),
                        complete=bool(np.all(counts == 1)))


@dataclass(frozen=True)
class SplitResult:
    """Outcome of splitting a multi-curve current by plane tubes."""

    groups: list
    multiplicities: list
    masses: list
    total_mass: float
    cluster: PlaneCluster
    passed: bool
    unassigned_curves: list = field(default_factory=list)


def split_current(curves, planes, width: float) -> SplitResult:
    """Group embedded curves by the plane tube containing them.

    Every sample of a curve must fall in the same tube, otherwise that
    curve counts as unassigned and the split fails.  Raises MassLeak if
    the group masses do not add back to the total, and TubesOverlap via
    the underlying clustering when tubes intersect the samples.
    """
    groups = [[] for _ in planes]
    unassigned = []
    masses = [c.mass() for c in curves]
    all_points = np.concatenate([c.points() for c in curves], axis=0)
    cluster = cluster_by_planes(all_points, planes, width)
    offset = 0
    for c, m in zip(curves, masses):
        k = c.curve.M
        labels = np.unique(cluster.assignment[offset:offset + k])
        offset += k
        if labels.size == 1 and labels[0] >= 0:
            groups[int(labels[0])].append(c)
        else:
            unassigned.append(c)
    group_mass = [float(sum(c.mass() for c in g)) for g in groups]
    total = float(sum(masses))
    leak = abs(total - sum(group_mass)
               - sum(c.mass() for c in unassigned))
    if leak > MASS_LEAK_TOL * max(total, 1.0):
        raise MassLeak(f"split lost mass {leak:.3e}")
    mult = [int(sum(c.curve.Q for c in g)) for g in groups]
    return SplitResult(groups=groups, multiplicities=mult,
                       masses=group_mass, total_mass=total,
                       cluster=cluster, passed=not unassigned,
                       unassigned_curves=unassigned)


@dataclass(frozen=True)
class IrreducibilityReport:
    """Connectivity verdict for a family of curves near one plane."""

    reducible: bool
    components: int
    witness: list
    spacing: float
    refinements: int


def _component_labels(points, owners, ncurves, spacing):
    tree = cKDTree(points)
    pairs = tree.query_pairs(LINK_FACTOR * spacing, output_type="ndarray")
    m = points.shape[0]
    data = np.ones(pairs.shape[0])
    adj = sparse.coo_matrix((data, (pairs[:, 0], pairs[:, 1])), shape=(m, m))
    ncomp, labels = sparse.csgraph.connected_components(
        adj, directed=False)
    curve_label = np.full(ncurves, -1, dtype=int)
    for idx in range(ncurves):
        mine = labels[owners == idx]
        curve_label[idx] = mine[0] if mine.size else -1
    merged = {}
    for idx in range(ncurves):
        merged.setdefault(curve_label[idx], []).append(idx)
    return list(merged.values())


def irreducibility_check(curves, oversample: int = 1,
                         max_refinements: int = 3) -> IrreducibilityReport:
    """Decide whether the union of curves is connected away from 0.

    Sample points closer than LINK_FACTOR times the sample spacing are
    linked; a single connected component is re-tested at half spacing
    before an irreducible verdict, since refining can only break
    spurious links.  The witness lists curve indices per component.
    """
    factor = max(int(oversample), 1)
    refinements = 0
    while True:
        pts = []
        owners = []
        spacing = 0.0
        for idx, c in enumerate(curves):
            m = c.curve.M * factor
            theta = np.arange(m) * (c.curve.period / m)
            p = c.points(theta)
            keep = np.linalg.norm(p, axis=-1) > VERTEX_BALL
            pts.append(p[keep])
            owners.append(np.full(int(np.sum(keep)), idx))
            gaps = np.linalg.norm(np.diff(np.vstack([p, p[:1]]), axis=0),
                                  axis=-1)
            spacing = max(spacing, float(np.max(gaps)))
        witness = _component_labels(np.concatenate(pts, axis=0),
                                    np.concatenate(owners), len(curves),
                                    spacing)
        if len(witness) > 1:
            return IrreducibilityReport(reducible=True,
                                        components=len(witness),
                                        witness=witness, spacing=spacing,
                                        refinements=refinements)
        if refinements >= max_refinements:
            return IrreducibilityReport(reducible=False, components=1,
                                        witness=witness, spacing=spacing,
                                        refinements=refinements)
        factor *= 2
        refinements += 1
