"""Planes, projections and two-(co)vector norms in R^(2+n).

Ambient vectors are plain numpy arrays.  A two-covector (or two-vector) is
stored as the antisymmetric matrix A with value(v, w) = v @ A @ w; the
wedge u ^ v corresponds to outer(u, v) - outer(v, u).

Norm conventions fixed here and used everywhere else:

* ``plane_distance`` is the spectral (operator) norm of the difference of
  the orthogonal projectors.
* ``comass2`` of a two-covector is its largest singular value, which for
  antisymmetric matrices equals the maximum of v @ A @ w over orthonormal
  pairs (v, w).
* the mass norm of a two-vector is the sum of its spectral pair values,
  i.e. half the nuclear norm of the matrix.  Tangent-minus-plane distances
  |T - tau| are measured in this norm.
"""

from dataclasses import dataclass, field

import numpy as np

ORTHO_TOL = 1e-12


def _as_vec(x):
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError("expected a 1-d coordinate array")
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite coordinates")
    return v


@dataclass(frozen=True)
class Plane2:
    """Oriented 2-plane through the origin, spanned by an orthonormal pair."""

    e1: np.ndarray
    e2: np.ndarray

    def __post_init__(self):
        e1 = _as_vec(self.e1)
        e2 = _as_vec(self.e2)
        if e1.shape != e2.shape or e1.size < 3:
            raise ValueError("basis vectors must share a dimension >= 3")
        if (abs(e1 @ e1 - 1.0) > ORTHO_TOL or abs(e2 @ e2 - 1.0) > ORTHO_TOL
                or abs(e1 @ e2) > ORTHO_TOL):
            raise ValueError("basis is not orthonormal to 1e-12")
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "e2", e2)

    @property
    def dim(self) -> int:
        return self.e1.size

    def projector(self) -> np.ndarray:
        return np.outer(self.e1, self.e1) + np.outer(self.e2, self.e2)

    def wedge_matrix(self) -> np.ndarray:
        """Antisymmetric matrix of the unit two-vector e1 ^ e2."""
        return np.outer(self.e1, self.e2) - np.outer(self.e2, self.e1)

    def basis(self) -> np.ndarray:
        """dim x 2 matrix whose columns span the plane."""
        return np.stack([self.e1, self.e2], axis=1)

    def frame(self) -> np.ndarray:
        """Orthogonal dim x dim matrix whose first two columns are e1, e2."""
        return complete_frame(self.basis())


def plane_from_spanning(u, v) -> Plane2:
    """Plane spanned (and oriented) by two independent vectors."""
    u = _as_vec(u)
    v = _as_vec(v)
    nu = np.linalg.norm(u)
    if nu < 1e-14:
        raise ValueError("degenerate spanning pair")
    e1 = u / nu
    w = v - (v @ e1) * e1
    nw = np.linalg.norm(w)
    if nw < 1e-14 * max(1.0, np.linalg.norm(v)):
        raise ValueError("degenerate spanning pair")
    return Plane2(e1, w / nw)


def standard_plane(dim: int) -> Plane2:
    e1 = np.zeros(dim)
    e2 = np.zeros(dim)
    e1[0] = 1.0
    e2[1] = 1.0
    return Plane2(e1, e2)


def complete_frame(basis: np.ndarray) -> np.ndarray:
    """Extend a dim x k orthonormal column set to a full orthogonal matrix.

    Deterministic: completes with the coordinate directions least aligned
    with the given columns, then Gram-Schmidt.
    """
    dim, k = basis.shape
    cols = [basis[:, j] for j in range(k)]
    # pick coordinate axes in order of residual size for reproducibility
    resid = np.eye(dim) - basis @ basis.T
    order = np.argsort(-np.diag(resid), kind="stable")
    for idx in order:
        if len(cols) == dim:
            break
        v = resid[:, idx].copy()
        for c in cols[k:]:
            v -= (v @ c) * c
        nv = np.linalg.norm(v)
        if nv > 1e-10:
            cols.append(v / nv)
    if len(cols) != dim:
        raise ValueError("failed to complete frame")
    return np.stack(cols, axis=1)


def split(x, plane: Plane2):
    """Decompose x into (parallel, perpendicular) parts for the plane.

    Broadcasts over leading axes of x.
    """
    x = np.asarray(x, dtype=float)
    B = plane.basis()
    par = (x @ B) @ B.T
    return par, x - par


def plane_distance(p: Plane2, q: Plane2) -> float:
    """Operator-norm distance between the two orthogonal projectors."""
    if p.dim != q.dim:
        raise ValueError("planes live in different ambient dimensions")
    return float(np.linalg.norm(p.projector() - q.projector(), 2))


def check_antisymmetric(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("non-finite matrix entries")
    if np.max(np.abs(A + A.T)) > 1e-9 * max(1.0, np.max(np.abs(A))):
        raise ValueError("matrix is not antisymmetric")
    return 0.5 * (A - A.T)


@dataclass(frozen=True)
class TwoCovector:
    """Constant two-covector, value(v, w) = v @ matrix @ w."""

    matrix: np.ndarray = field()

    def __post_init__(self):
        object.__setattr__(self, "matrix", check_antisymmetric(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, v, w) -> float:
        return float(np.asarray(v) @ self.matrix @ np.asarray(w))


def comass2(A) -> float:
    """Comass of a two-covector: max of A(v, w) over orthonormal pairs.

    For an antisymmetric matrix this equals the largest singular value;
    the maximizing pair can be read off the corresponding spectral block.
    """
    A = check_antisymmetric(A)
    return float(np.linalg.svd(A, compute_uv=False)[0])


def comass2_sampled(A, samples: int, rng) -> float:
    """Monte-Carlo lower bound for comass2, used as an independent check."""
    A = check_antisymmetric(A)
    d = A.shape[0]
    v = rng.standard_normal((samples, d))
    w = rng.standard_normal((samples, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    w -= np.sum(w * v, axis=1, keepdims=True) * v
    n = np.linalg.norm(w, axis=1, keepdims=True)
    good = n[:, 0] > 1e-12
    w = w[good] / n[good]
    vals = np.einsum("ki,ij,kj->k", v[good], A, w)
    return float(np.max(np.abs(vals)))


def wedge_matrix(u, v) -> np.ndarray:
    """Antisymmetric matrix of u ^ v.  Broadcasts over leading axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., :, None] * v[..., None, :] - v[..., :, None] * u[..., None, :]


def unit_tangent_matrix(u, v) -> np.ndarray:
    """Matrix of the unit simple two-vector of span(u, v), oriented u -> v."""
    W = wedge_matrix(u, v)
    nrm = np.linalg.norm(W, axis=(-2, -1), keepdims=True) / np.sqrt(2.0)
    if np.any(nrm < 1e-300):
        raise ValueError("degenerate tangent pair")
    return W / nrm


def twovector_mass_norm(A) -> np.ndarray:
    """Mass norm of a two-vector given as an antisymmetric matrix.

    Equals the sum of the spectral pair values (half the nuclear norm).
    Broadcasts over leading axes.
    """
    A = np.asarray(A, dtype=float)
    s = np.linalg.svd(A, compute_uv=False)
    return 0.5 * np.sum(s, axis=-1)


def twovector_euclid_norm(A) -> np.ndarray:
    """Euclidean norm on two-vectors: sqrt(sum of squared components)."""
    A = np.asarray(A, dtype=float)
    return np.linalg.norm(A, axis=(-2, -1)) / np.sqrt(2.0)


def random_rotation(dim: int, rng) -> np.ndarray:
    """Haar-ish random rotation from QR of a Gaussian matrix, det +1."""
    M = rng.standard_normal((dim, dim))
    Qm, R = np.linalg.qr(M)
    Qm = Qm * np.sign(np.diag(R))
    if np.linalg.det(Qm) < 0:
        Qm[:, 0] = -Qm[:, 0]
    return Qm


def rotate_plane(plane: Plane2, R: np.ndarray) -> Plane2:
    return Plane2(R @ plane.e1, R @ plane.e2)
