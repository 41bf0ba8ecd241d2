"""Semicalibrations, first-variation laws and almost-minimality probes.

A two-form field with comass at most one calibrates a surface when its
action equals the area element everywhere; the calibration defect (mass
minus form action) measures the failure.  For calibrated or nearly
calibrated surfaces the first variation along a compactly supported
vector field chi has an explicit right-hand side, either

    (b)  T(d omega restricted by chi)      for a semicalibration omega,
    (c)  integral of 2 |x|^{-2} x . chi    for cross-sections of spheres,

and both are checked here against the geometric left-hand side, the
derivative of mass along the flow of chi, computed by central
differences at two steps with Richardson extrapolation.

Almost-minimality probes exercise the defining inequality itself: the
competitor T + boundary(S) built from a short homotopy sweep S must not
undercut M(T) by more than Omega M(S).
"""

from dataclasses import dataclass

import numpy as np

from .currents import ParamSurface
from .errors import FormUndefined, NotSemicalibrated
from .quadrature import gauss_legendre

DEFECT_TOL = 1e-8
FORM_CONSISTENCY_TOL = 1e-6


def _levi_civita3():
    eps = np.zeros((3, 3, 3))
    for i, j, k, s in ((0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1),
                       (0, 2, 1, -1), (2, 1, 0, -1), (1, 0, 2, -1)):
        eps[i, j, k] = s
    return eps


LEVI3 = _levi_civita3()


@dataclass(frozen=True)
class TwoFormField:
    """A two-form on ambient space with (possibly numeric) exterior
    derivative.

    ``matrix`` maps positions (..., d) to antisymmetric matrices; the
    optional ``exterior`` maps positions to the fully antisymmetric
    (..., d, d, d) tensor of the exterior derivative.  When ``exterior``
    is None it is produced by central differences of ``matrix``.
    """

    matrix: object
    exterior: object = None
    fd_step: float = 1e-5

    def __call__(self, x):
        return self.matrix(x)

    def fd_exterior(self, x):
        x = np.asarray(x, dtype=float)
        d = x.shape[-1]
        h = self.fd_step
        rows = []
        for i in range(d):
            e = np.zeros(d)
            e[i] = h
            rows.append((self.matrix(x + e) - self.matrix(x - e)) / (2 * h))
        D = np.stack(rows, axis=-3)
        return D + np.moveaxis(D, -1, -3) + np.moveaxis(D, -3, -1)

    def three_form(self, x):
        if self.exterior is not None:
            return self.exterior(x)
        return self.fd_exterior(x)

    def comass_at(self, x):
        """Largest singular value of the form matrix at each point."""
        A = np.asarray(self.matrix(x), dtype=float)
        return np.linalg.svd(A, compute_uv=False)[..., 0]

    def check_consistency(self, x, tol: float = FORM_CONSISTENCY_TOL):
        """Sup difference between analytic and finite-difference
        exterior derivatives at the given points."""
        if self.exterior is None:
            return 0.0
        gap = float(np.max(np.abs(self.exterior(x) - self.fd_exterior(x))))
        if gap > tol:
            raise FormUndefined(
                f"exterior derivative mismatch {gap:.2e} exceeds {tol:.0e}")
        return gap


@dataclass(frozen=True)
class TestVectorField:
    """Compactly supported vector field with jacobian for flows."""

    func: object
    jac: object
    center: np.ndarray
    radius: float

    def __call__(self, x):
        return self.func(x)


def bump_field(center, radius: float, direction,
               power: int = 5) -> TestVectorField:
    """Polynomial bump (1 - |y|^2/R^2)^power times a constant direction.

    C^(power-1) at the support edge so fixed-order quadrature of flowed
    surfaces converges fast; the jacobian is analytic.  Raise the power
    when measuring quantities that sit below the default's quadrature
    floor, such as high-order derivative fits.
    """
    center = np.asarray(center, dtype=float)
    direction = np.asarray(direction, dtype=float)
    r2 = radius * radius
    p = int(power)

    def func(x):
        y = np.asarray(x, dtype=float) - center
        s = np.sum(y * y, axis=-1) / r2
        f = np.where(s < 1.0, (1.0 - np.minimum(s, 1.0)) ** p, 0.0)
        return f[..., None] * direction

    def jac(x):
        y = np.asarray(x, dtype=float) - center
        s = np.sum(y * y, axis=-1) / r2
        df = np.where(s < 1.0, -p * (1.0 - np.minimum(s, 1.0)) ** (p - 1),
                      0.0)
        grad = df[..., None] * (2.0 * y / r2)
        return direction[:, None] * grad[..., None, :]

    return TestVectorField(func=func, jac=jac, center=center, radius=radius)


def comass_field_check(form: TwoFormField, points, tol: float = 1e-9):
    """Largest comass over the sample points; fails above 1 + tol."""
    vals = form.comass_at(points)
    worst = float(np.max(vals))
    return worst, bool(worst <= 1.0 + tol)


def calibration_defect(surface, form: TwoFormField, order=None) -> float:
    """Mass minus form action; zero exactly when the form calibrates."""
    action = surface.integrate_form(form, order=order)
    return surface.mass(check=False) - action


def interior_product(three_form, chi):
    """Contract a three-form field with a vector field, yielding the
    two-form (v, w) -> d omega(chi, v, w)."""
    def matrix(x):
        T = np.asarray(three_form(x), dtype=float)
        c = np.asarray(chi(x), dtype=float)
        return np.einsum("...i,...ijk->...jk", c, T)

    return matrix


@dataclass(frozen=True)
class SphereLaw:
    """First-variation law for cross-sections of the sphere |x| = R:
    the right-hand side is the integral of 2 |x|^{-2} x . chi."""

    radius: float


@dataclass(frozen=True)
class FirstVariationReport:
    """Stepped mass derivatives against their predicted value.

    d_values are the central-difference mass derivatives at each step,
    lhs the Richardson extrapolation of the two smallest steps, rhs the
    law's prediction, and c2 the largest |d - rhs| / h^2, finite when
    the convergence is genuinely second order.
    """

    lhs: float
    rhs: float
    d_values: tuple
    steps: tuple
    c2: float
    defect: float

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs

    @property
    def errors(self) -> tuple:
        return tuple(abs(d - self.rhs) for d in self.d_values)

    @property
    def slope(self) -> float:
        """Least squares order of |d(h) - rhs| across the steps."""
        err = np.asarray(self.errors, dtype=float)
        if np.any(err == 0.0):
            return float("inf")
        k, _ = np.polyfit(np.log(np.asarray(self.steps)), np.log(err), 1)
        return float(k)


def _mass_derivative(surface, chi, h: float) -> float:
    out = []
    for sign in (1.0, -1.0):
        t = sign * h

        def phi(x, t=t):
            return x + t * chi.func(x)

        def dphi(x, t=t):
            D = np.asarray(chi.jac(x), dtype=float)
            eye = np.eye(D.shape[-1])
            return eye + t * D

        out.append(surface.pushforward(phi, dphi=dphi).mass(check=False))
    return (out[0] - out[1]) / (2 * h)


def first_variation_pair(surface, law, chi: TestVectorField,
                         steps=(1e-3, 1e-4)) -> FirstVariationReport:
    """Compare the mass derivative along chi with the law's prediction.

    For a TwoFormField law the surface must be calibrated by it up to
    DEFECT_TOL (relative), otherwise NotSemicalibrated is raised; the
    prediction is then T(d omega contracted with chi).  For a SphereLaw
    the prediction integrates 2 |x|^{-2} x . chi over the surface.
    """
    mass0 = surface.mass(check=False)
    defect = 0.0
    if isinstance(law, TwoFormField):
        defect = calibration_defect(surface, law)
        if abs(defect) > DEFECT_TOL * max(mass0, 1.0):
            raise NotSemicalibrated(
                f"calibration defect {defect:.2e} too large for the "
                "first-variation identity")
        rhs = surface.integrate_form(
            interior_product(law.three_form, chi.func))
    elif isinstance(law, SphereLaw):
        def density(x, xu, xv):
            return 2.0 * np.sum(x * chi.func(x), axis=-1) \
                / np.sum(x * x, axis=-1)

        rhs = surface.integrate_density(density)
    else:
        raise TypeError("law must be a TwoFormField or a SphereLaw")

    steps = tuple(sorted(float(h) for h in steps), )[::-1]
    if len(steps) < 2:
        raise ValueError("need at least two step sizes")
    d_values = tuple(_mass_derivative(surface, chi, h) for h in steps)
    h1, h2 = steps[-2], steps[-1]
    lhs = (h1 * h1 * d_values[-1] - h2 * h2 * d_values[-2]) \
        / (h1 * h1 - h2 * h2)
    c2 = max(abs(d - rhs) / (h * h) for d, h in zip(d_values, steps))
    return FirstVariationReport(lhs=float(lhs), rhs=float(rhs),
                                d_values=d_values, steps=tuple(steps),
                                c2=float(c2), defect=float(defect))


@dataclass(frozen=True)
class ProbeResult:
    """One almost-minimality trial at sweep length eps."""

    eps: float
    mass: float
    mass_deformed: float
    mass_sweep: float
    slack: float
    passed: bool


def sweep_mass(surface, chi: TestVectorField, eps: float,
               tnodes: int = 8) -> float:
    """Mass of the 3-current swept by flowing the surface along chi
    for time eps."""
    tn, tw = gauss_legendre(tnodes, 0.0, eps)
    u, v, w = surface._nodes(surface.order)
    x = surface.points(u, v)
    xu, xv = surface.partials(u, v)
    c = chi.func(x)
    D = np.asarray(chi.jac(x), dtype=float)
    total = 0.0
    for t, wt in zip(tn, tw):
        a = c
        b = xu + t * np.einsum("...ij,...j->...i", D, xu)
        e = xv + t * np.einsum("...ij,...j->...i", D, xv)
        G = np.empty(x.shape[:-1] + (3, 3))
        for i, p in enumerate((a, b, e)):
            for j, q in enumerate((a, b, e)):
                G[..., i, j] = np.sum(p * q, axis=-1)
        vol = np.sqrt(np.maximum(np.linalg.det(G), 0.0))
        total += wt * float(np.sum(w * vol))
    return total * surface.multiplicity


def almost_minimality_probe(surface, omega: float, chi: TestVectorField,
                            epsilons) -> list:
    """Check M(T) <= M(T + boundary S) + Omega M(S) on sweep competitors.

    The sweep S flows the surface along chi for time eps, so that
    T + boundary S is the pushforward of T by id + eps chi (up to the
    side walls already counted in S).  Slack below -1e-8 fails.
    """
    mass0 = surface.mass(check=False)
    rows = []
    for eps in epsilons:
        def phi(x, t=eps):
            return x + t * chi.func(x)

        def dphi(x, t=eps):
            D = np.asarray(chi.jac(x), dtype=float)
            return np.eye(D.shape[-1]) + t * D

        deformed = surface.pushforward(phi, dphi=dphi).mass(check=False)
        swept = sweep_mass(surface, chi, eps)
        slack = omega * swept + deformed - mass0
        rows.append(ProbeResult(eps=float(eps), mass=float(mass0),
                                mass_deformed=float(deformed),
                                mass_sweep=float(swept),
                                slack=float(slack),
                                passed=bool(slack >= -1e-8)))
    return rows


def solid_angle_form() -> TwoFormField:
    """The unit-comass two-form on R^3 minus the origin whose action on
    (v, w) at x is det[x/|x|, v, w].

    Calibrates every sphere centered at the origin; its exterior
    derivative is (2/|x|) times the volume form.
    """
    def matrix(x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1, keepdims=True)
        if np.any(r < 1e-12):
            raise FormUndefined("solid-angle form is singular at 0")
        xh = x / r
        return np.einsum("...i,ijk->...jk", xh, LEVI3)

    def exterior(x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        if np.any(r < 1e-12):
            raise FormUndefined("solid-angle form is singular at 0")
        return (2.0 / r)[..., None, None, None] * LEVI3

    return TwoFormField(matrix=matrix, exterior=exterior)


def _smoothstep(s):
    t = np.clip(2.0 * s - 1.0, 0.0, 1.0)
    return 1.0 - t ** 3 * (10.0 - 15.0 * t + 6.0 * t * t)


def _smoothstep_deriv(s):
    t = np.clip(2.0 * s - 1.0, 0.0, 1.0)
    return -2.0 * 30.0 * t * t * (t - 1.0) ** 2


def extend_form(plane, tube_radius: float) -> TwoFormField:
    """Extend the area form of a plane off itself with a C^2 cutoff in
    the normal distance.

    Constant (and calibrating) inside half the tube radius, zero outside
    the tube; because the plane form already annihilates normal
    directions, the extension differs from the constant form only
    through the cutoff factor.
    """
    A0 = plane.wedge_matrix()
    proj = plane.projector()

    def matrix(x):
        x = np.asarray(x, dtype=float)
        perp = x - x @ proj
        s = np.linalg.norm(perp, axis=-1) / tube_radius
        return _smoothstep(s)[..., None, None] * A0

    def exterior(x):
        x = np.asarray(x, dtype=float)
        perp = x - x @ proj
        dist = np.linalg.norm(perp, axis=-1)
        s = dist / tube_radius
        safe = np.maximum(dist, 1e-300)
        grad = _smoothstep_deriv(s)[..., None] * perp \
            / (tube_radius * safe[..., None])
        D = grad[..., :, None, None] * A0
        return D + np.moveaxis(D, -1, -3) + np.moveaxis(D, -3, -1)

    return TwoFormField(matrix=matrix, exterior=exterior)


def spherical_cap(radius: float, phi_min: float, phi_max: float,
                  dim: int = 3, order=(48, 96),
                  orientation: int = 1) -> ParamSurface:
    """Latitude band phi in (phi_min, phi_max) of the sphere |x| = radius,
    embedded in R^dim with trailing coordinates zero."""
    if dim < 3:
        raise ValueError("need ambient dimension at least 3")

    def chart(phi, lam):
        phi, lam = np.broadcast_arrays(np.asarray(phi, float),
                                       np.asarray(lam, float))
        out = np.zeros(phi.shape + (dim,))
        out[..., 0] = radius * np.sin(phi) * np.cos(lam)
        out[..., 1] = radius * np.sin(phi) * np.sin(lam)
        out[..., 2] = radius * np.cos(phi)
        return out

    def jacobian(phi, lam):
        phi, lam = np.broadcast_arrays(np.asarray(phi, float),
                                       np.asarray(lam, float))
        xp = np.zeros(phi.shape + (dim,))
        xl = np.zeros(phi.shape + (dim,))
        xp[..., 0] = radius * np.cos(phi) * np.cos(lam)
        xp[..., 1] = radius * np.cos(phi) * np.sin(lam)
        xp[..., 2] = -radius * np.sin(phi)
        xl[..., 0] = -radius * np.sin(phi) * np.sin(lam)
        xl[..., 1] = radius * np.sin(phi) * np.cos(lam)
        return xp, xl

    return ParamSurface(chart, (phi_min, phi_max, 0.0, 2 * np.pi),
                        jacobian=jacobian, order=order,
                        orientation=orientation)
