"""Parametrized 2-currents: winding curves, chart surfaces and cones.

Everything is a chart over a rectangle with a (possibly analytic) jacobian;
masses and form integrals are tensor Gauss-Legendre sums with a doubling
self-check, curve masses are periodic trapezoid sums.  Restriction to a
ball or annulus clips the chart along |x| level sets, which requires the
radius to be monotone along one chart axis (true for every cone, radial
extension and polar graph built here).

The winding-curve file format is JSON with fields Q, n, rho, orientation
and exactly one of "samples" (M rows of n floats at uniform angles) or
"fourier" ({"alpha": rows, "beta": rows}).  Floats survive a round trip
bit-exactly because json writes shortest round-trip representations.
"""

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (DegenerateCone, EmptyRestriction, FormUndefined,
                     NonFinite, QuadratureNotConverged, Undersampled)
from .fourier import FourierSeries, analyze
from .quadrature import gauss_legendre, periodic_trapezoid

SAMPLES_PER_WINDING_MODE = 16
MASS_SELF_CHECK_TOL = 1e-6


# ---------------------------------------------------------------------------
# curves

@dataclass(frozen=True)
class SpaceCurve:
    """Closed parametrized curve theta -> gamma(theta) on [0, period).

    ``scale`` records the geometric size (sphere or cylinder radius) so
    cones over the curve know where the curve sits relative to the vertex.
    """

    gamma: Callable
    dgamma: Callable
    Q: int
    orientation: int = 1
    scale: float = 1.0
    nsamples: int = 256

    @property
    def period(self) -> float:
        return 2.0 * np.pi * self.Q

    def points(self, theta):
        return self.gamma(np.asarray(theta, dtype=float))

    def velocities(self, theta):
        return self.dgamma(np.asarray(theta, dtype=float))


@dataclass(frozen=True)
class WindingCurve:
    """Closed curve winding Q times around a cylinder of radius rho.

    The trace is theta -> rho * (cos theta, sin theta, f(theta)) for
    theta in [0, 2*pi*Q), with the profile f stored both as uniform
    samples and as its Fourier series.
    """

    Q: int
    n: int
    rho: float
    samples: np.ndarray
    series: FourierSeries
    orientation: int = 1
    source: str = "samples"

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != self.n:
            raise ValueError("samples must have shape (M, n)")
        if not np.all(np.isfinite(samples)):
            raise NonFinite("non-finite curve samples")
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.orientation not in (-1, 1):
            raise ValueError("orientation must be +1 or -1")
        need = SAMPLES_PER_WINDING_MODE * self.Q * max(
            self.series.max_active_frequency(1e-12), 1)
        if samples.shape[0] < need:
            raise Undersampled(
                f"{samples.shape[0]} samples < {need} required for the "
                "active frequency content")
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_samples(cls, samples, Q: int, rho: float = 1.0,
                     orientation: int = 1, nmodes: int | None = None):
        samples = np.asarray(samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[:, None]
        series = analyze(samples, Q, nmodes=nmodes)
        return cls(Q=Q, n=samples.shape[1], rho=rho, samples=samples,
                   series=series, orientation=orientation, source="samples")

    @classmethod
    def from_fourier(cls, series: FourierSeries, rho: float = 1.0,
                     orientation: int = 1, nsamples: int | None = None):
        fa = max(series.max_active_frequency(1e-12), 1)
        if nsamples is None:
            nsamples = max(256, SAMPLES_PER_WINDING_MODE * series.Q * fa,
                           2 * series.nmodes + 2)
        theta = np.arange(nsamples) * (series.period / nsamples)
        return cls(Q=series.Q, n=series.n, rho=rho,
                   samples=series.synthesize(theta), series=series,
                   orientation=orientation, source="fourier")

    @property
    def M(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return 2 + self.n

    @property
    def period(self) -> float:
        return 2.0 * np.pi * self.Q

    def profile(self, theta):
        return self.series.synthesize(theta)

    def points(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.empty(theta.shape + (self.dim,))
        out[..., 0] = np.cos(theta)
        out[..., 1] = np.sin(theta)
        out[..., 2:] = self.profile(theta)
        return self.rho * out

    def velocities(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.empty(theta.shape + (self.dim,))
        out[..., 0] = -np.sin(theta)
        out[..., 1] = np.cos(theta)
        out[..., 2:] = self.series.derivative(theta)
        return self.rho * out

    def lipschitz(self) -> float:
        """Max finite-difference quotient of the profile over adjacent nodes."""
        d = np.diff(self.samples, axis=0, append=self.samples[:1])
        step = self.period / self.M
        return float(np.max(np.linalg.norm(d, axis=1))) / step

    def space_curve(self) -> SpaceCurve:
        return SpaceCurve(self.points, self.velocities, self.Q,
                          self.orientation, scale=self.rho,
                          nsamples=self.M)


def normalize_to_sphere(curve, radius: float = 1.0) -> SpaceCurve:
    """Radially project a curve onto the sphere of the given radius."""
    base = curve.space_curve() if isinstance(curve, WindingCurve) else curve

    def gamma(theta):
        g = base.points(theta)
        return radius * g / np.linalg.norm(g, axis=-1, keepdims=True)

    def dgamma(theta):
        g = base.points(theta)
        dg = base.velocities(theta)
        r2 = np.sum(g * g, axis=-1, keepdims=True)
        rad = np.sqrt(r2)
        return radius * (dg / rad - g * np.sum(g * dg, axis=-1, keepdims=True)
                         / (rad * r2))

    return SpaceCurve(gamma, dgamma, base.Q, base.orientation,
                      scale=radius, nsamples=base.nsamples)


def curve_mass(curve, rtol: float = 1e-9) -> float:
    """Length of the curve counted with its winding multiplicity."""
    base = curve.space_curve() if isinstance(curve, WindingCurve) else curve

    def speed(theta):
        v = np.linalg.norm(base.velocities(theta), axis=-1)
        if not np.all(np.isfinite(v)):
            raise NonFinite("non-finite curve velocity")
        return v

    return float(periodic_trapezoid(speed, base.period, base.nsamples, rtol))


# ---------------------------------------------------------------------------
# curve spec files

def curve_to_spec(curve: WindingCurve) -> dict:
    spec = {"Q": curve.Q, "n": curve.n, "rho": curve.rho,
            "orientation": curve.orientation}
    if curve.source == "fourier":
        spec["fourier"] = {"alpha": curve.series.alpha.tolist(),
                           "beta": curve.series.beta.tolist()}
    else:
        spec["samples"] = curve.samples.tolist()
    return spec


def curve_from_spec(spec: dict) -> WindingCurve:
    try:
        Q = int(spec["Q"])
        n = int(spec["n"])
        rho = float(spec["rho"])
        orientation = int(spec["orientation"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad curve spec: {exc}") from exc
    if "fourier" in spec:
        alpha = np.asarray(spec["fourier"]["alpha"], dtype=float)
        beta = np.asarray(spec["fourier"]["beta"], dtype=float)
        series = FourierSeries(Q=Q, n=n, alpha=alpha, beta=beta)
        return WindingCurve.from_fourier(series, rho=rho,
                                         orientation=orientation)
    if "samples" in spec:
        samples = np.asarray(spec["samples"], dtype=float)
        return WindingCurve.from_samples(samples, Q, rho=rho,
                                         orientation=orientation)
    raise ValueError("curve spec needs either 'samples' or 'fourier'")


def save_curve(path, curve: WindingCurve) -> None:
    with open(path, "w") as fh:
        json.dump(curve_to_spec(curve), fh)


def load_curve(path) -> WindingCurve:
    with open(path) as fh:
        return curve_from_spec(json.load(fh))


# ---------------------------------------------------------------------------
# chart surfaces

class ParamSurface:
    """Oriented 2-current given by a chart over a rectangle.

    Parameters
    ----------
    chart : callable (U, V) -> (..., d)
        Vectorized map; must broadcast U against V.
    domain : (u0, u1, v0, v1)
    jacobian : callable or None
        Returns (x_u, x_v); central finite differences when omitted.
    multiplicity, orientation : int
    order : (int, int)
        Gauss-Legendre order per axis.
    radial_axis : 0 or None
        Declares |chart| strictly monotone along the u axis, enabling
        annulus restriction.
    radius_solver : callable (c, V) -> U or None
        Exact solver for |chart(U, V)| = c along u, if one is known.
    """

    def __init__(self, chart, domain, jacobian=None, multiplicity=1,
                 orientation=1, order=(32, 32), radial_axis=None,
                 radius_solver=None, fd_step=1e-6):
        self.chart = chart
        self.domain = tuple(float(t) for t in domain)
        self.jacobian = jacobian
        self.multiplicity = int(multiplicity)
        self.orientation = int(orientation)
        self.order = (int(order[0]), int(order[1]))
        self.radial_axis = radial_axis
        self.radius_solver = radius_solver
        self.fd_step = float(fd_step)
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be a positive integer")
        if self.orientation not in (-1, 1):
            raise ValueError("orientation must be +1 or -1")
        u0, u1, v0, v1 = self.domain
        if not (u1 > u0 and v1 > v0):
            raise ValueError("degenerate chart domain")

    def points(self, U, V):
        return self.chart(np.asarray(U, dtype=float),
                          np.asarray(V, dtype=float))

    def partials(self, U, V):
        U = np.asarray(U, dtype=float)
        V = np.asarray(V, dtype=float)
        if self.jacobian is not None:
            return self.jacobian(U, V)
        u0, u1, v0, v1 = self.domain
        hu = self.fd_step * (u1 - u0)
        hv = self.fd_step * (v1 - v0)
        xu = (self.chart(U + hu, V) - self.chart(U - hu, V)) / (2 * hu)
        xv = (self.chart(U, V + hv) - self.chart(U, V - hv)) / (2 * hv)
        return xu, xv

    def _nodes(self, order):
        u0, u1, v0, v1 = self.domain
        xu, wu = gauss_legendre(order[0], u0, u1)
        xv, wv = gauss_legendre(order[1], v0, v1)
        U, V = np.meshgrid(xu, xv, indexing="ij")
        W = np.outer(wu, wv)
        return U.ravel(), V.ravel(), W.ravel()

    def _frame(self, order):
        """Quadrature nodes with positions, partials, weights."""
        U, V, W = self._nodes(order)
        x = self.points(U, V)
        xu, xv = self.partials(U, V)
        return x, xu, xv, W

    @staticmethod
    def _area_element(xu, xv):
        E = np.sum(xu * xu, axis=-1)
        G = np.sum(xv * xv, axis=-1)
        F = np.sum(xu * xv, axis=-1)
        return np.sqrt(np.maximum(E * G - F * F, 0.0))

    def integrate_density(self, density=None, order=None) -> float:
        """Integral of a scalar density against the area measure.

        ``density(x, xu, xv)`` gets positions and chart partials at the
        quadrature nodes; None integrates 1 (mass).  Unsigned; includes
        the multiplicity.
        """
        order = order or self.order
        x, xu, xv, W = self._frame(order)
        area = self._area_element(xu, xv)
        vals = area if density is None else area * density(x, xu, xv)
        if not np.all(np.isfinite(vals)):
            raise NonFinite("non-finite integrand on the chart")
        return self.multiplicity * float(np.sum(W * vals))

    def mass(self, check: bool = True, rtol: float = MASS_SELF_CHECK_TOL):
        coarse = self.integrate_density()
        if not check:
            return coarse
        fine = self.integrate_density(
            order=(2 * self.order[0], 2 * self.order[1]))
        scale = max(abs(fine), 1e-300)
        if abs(fine - coarse) > rtol * scale:
            raise QuadratureNotConverged(
                f"mass moved {abs(fine - coarse):.3e} "
                f"({abs(fine - coarse) / scale:.3e} rel) when doubling the rule")
        return fine

    def integrate_form(self, form, order=None) -> float:
        """Signed action of a two-form field: sum of form(x)(x_u, x_v).

        ``form`` maps batched positions (..., d) to antisymmetric matrices
        (..., d, d).
        """
        order = order or self.order
        x, xu, xv, W = self._frame(order)
        A = np.asarray(form(x), dtype=float)
        if A.shape != x.shape + (x.shape[-1],):
            raise FormUndefined("form field returned a bad shape")
        vals = np.einsum("...i,...ij,...j->...", xu, A, xv)
        if not np.all(np.isfinite(vals)):
            raise FormUndefined("form field produced non-finite values")
        return self.orientation * self.multiplicity * float(np.sum(W * vals))

    # -- derived surfaces ---------------------------------------------------

    def pushforward(self, phi, dphi=None, step=1e-6):
        """Image surface under a C^1 map phi (optionally with jacobian)."""
        base = self

        def chart(U, V):
            return phi(base.points(U, V))

        if dphi is not None:
            def jac(U, V):
                x = base.points(U, V)
                xu, xv = base.partials(U, V)
                D = np.asarray(dphi(x), dtype=float)
                return (np.einsum("...ij,...j->...i", D, xu),
                        np.einsum("...ij,...j->...i", D, xv))
        else:
            def jac(U, V):
                x = base.points(U, V)
                xu, xv = base.partials(U, V)
                out = []
                for t in (xu, xv):
                    tn = np.linalg.norm(t, axis=-1, keepdims=True)
                    tn = np.maximum(tn, 1e-300)
                    h = step / tn
                    out.append((phi(x + h * t) - phi(x - h * t)) / (2 * h))
                return out[0], out[1]

        return ParamSurface(chart, self.domain, jacobian=jac,
                            multiplicity=self.multiplicity,
                            orientation=self.orientation, order=self.order)

    def restrict(self, s: float, r: float):
        return RadialRestriction(self, s, r)

    def boundary_samples(self, m: int = 512):
        """Points at the outer edge u = u1 of the chart."""
        u0, u1, v0, v1 = self.domain
        V = v0 + (v1 - v0) * np.arange(m) / m
        return self.points(np.full(m, u1), V)


class RadialRestriction(ParamSurface):
    """Chart clipped to the annulus s <= |x| <= r along the radial axis.

    The clipped integral is computed by the substitution
    u = u_lo(v) + w * (u_hi(v) - u_lo(v)) whose jacobian in the area
    element is just u_hi(v) - u_lo(v); tangent directions come from the
    base chart, so no derivatives of the clip bounds are ever needed.
    """

    def __init__(self, base: ParamSurface, s: float, r: float):
        if base.radial_axis != 0:
            raise ValueError("restriction needs a chart with radial_axis=0")
        if s < 0 or r < s:
            raise ValueError("need 0 <= s <= r")
        if isinstance(base, RadialRestriction):
            s = max(s, base.inner)
            r = min(r, base.outer)
            base = base.base
        self.base = base
        self.inner = float(s)
        self.outer = float(r)
        u0, u1, v0, v1 = base.domain
        self.order = base.order
        self.domain = (0.0, 1.0, v0, v1)
        self.multiplicity = base.multiplicity
        self.orientation = base.orientation
        self.radial_axis = 0
        self.radius_solver = None
        self.fd_step = base.fd_step
        self.jacobian = None
        if self.inner >= self.outer:
            raise EmptyRestriction("empty radius interval")
        probe = v0 + (v1 - v0) * (np.arange(64) + 0.5) / 64
        rmin = self._radius(np.full(64, u0), probe)
        rmax = self._radius(np.full(64, u1), probe)
        if np.any(rmax < rmin - 1e-12 * max(1.0, float(np.max(rmax)))):
            raise ValueError("radius is not increasing along the radial axis")
        if float(np.min(rmax)) <= self.inner or float(np.max(rmin)) >= self.outer:
            raise EmptyRestriction(
                "annulus does not meet the chart's radius range")

    def _radius(self, U, V):
        return np.linalg.norm(self.base.points(U, V), axis=-1)

    def _solve_radius(self, c: float, V):
        """u with |x(u, V)| = c, clipped to the chart's radial range."""
        base = self.base
        u0, u1 = base.domain[0], base.domain[1]
        V = np.asarray(V, dtype=float)
        if base.radius_solver is not None:
            u = np.asarray(base.radius_solver(c, V), dtype=float)
            return np.clip(u, u0, u1)
        lo = np.full(V.shape, u0)
        hi = np.full(V.shape, u1)
        rlo = self._radius(lo, V)
        rhi = self._radius(hi, V)
        out = np.where(rlo >= c, lo, np.where(rhi <= c, hi, np.nan))
        need = np.isnan(out)
        if np.any(need):
            a = lo[need]
            b = hi[need]
            Vn = V[need]
            for _ in range(52):
                mid = 0.5 * (a + b)
                below = self._radius(mid, Vn) < c
                a = np.where(below, mid, a)
                b = np.where(below, b, mid)
            mid = 0.5 * (a + b)
            # Newton polish with the base partials
            for _ in range(3):
                x = self.base.points(mid, Vn)
                xu, _ = self.base.partials(mid, Vn)
                rr = np.linalg.norm(x, axis=-1)
                drr = np.sum(x * xu, axis=-1) / np.maximum(rr, 1e-300)
                stepn = (rr - c) / np.where(np.abs(drr) < 1e-300, np.inf, drr)
                mid = np.clip(mid - stepn, u0, u1)
            out[need] = mid
        return out

    def _bounds(self, V):
        ulo = self._solve_radius(self.inner, V)
        uhi = self._solve_radius(self.outer, V)
        return ulo, np.maximum(uhi, ulo)

    def points(self, U, V):
        U = np.asarray(U, dtype=float)
        V = np.asarray(V, dtype=float)
        ulo, uhi = self._bounds(V)
        return self.base.points(ulo + U * (uhi - ulo), V)

    def partials(self, U, V):
        """Tangent pair at the clipped nodes, in base-chart parametrization.

        The u-partial is scaled by the clip width so that the plain
        rectangle quadrature over [0,1] x [v0,v1] reproduces the clipped
        integral; the spanned tangent plane is unchanged up to the exact
        level-set shear, which no area or density integral sees.
        """
        U = np.asarray(U, dtype=float)
        V = np.asarray(V, dtype=float)
        ulo, uhi = self._bounds(V)
        xu, xv = self.base.partials(ulo + U * (uhi - ulo), V)
        return xu * (uhi - ulo)[..., None], xv

    def boundary_samples(self, m: int = 512):
        v0, v1 = self.domain[2], self.domain[3]
        V = v0 + (v1 - v0) * np.arange(m) / m
        ulo, uhi = self._bounds(V)
        return self.base.points(uhi, V)


class SurfaceStack:
    """Formal sum of chart surfaces, integrated piecewise."""

    def __init__(self, pieces):
        self.pieces = list(pieces)
        if not self.pieces:
            raise ValueError("empty surface stack")

    def mass(self, check: bool = True, rtol: float = MASS_SELF_CHECK_TOL):
        return sum(p.mass(check=check, rtol=rtol) for p in self.pieces)

    def integrate_density(self, density=None, order=None) -> float:
        return sum(p.integrate_density(density, order) for p in self.pieces)

    def integrate_form(self, form, order=None) -> float:
        return sum(p.integrate_form(form, order) for p in self.pieces)


# ---------------------------------------------------------------------------
# cones

@dataclass(frozen=True)
class ConeOverCurve:
    """Cone with the given vertex over a closed curve.

    The chart is (t, theta) -> vertex + t * (gamma(theta) - vertex) for
    t in (0, t_out] with t_out = outer_radius / link.scale, so
    outer_radius = link.scale reaches exactly the curve.
    """

    vertex: np.ndarray
    link: object
    outer_radius: float = 0.0

    def __post_init__(self):
        base = (self.link.space_curve() if isinstance(self.link, WindingCurve)
                else self.link)
        v = np.asarray(self.vertex, dtype=float)
        object.__setattr__(self, "vertex", v)
        object.__setattr__(self, "_curve", base)
        r = self.outer_radius if self.outer_radius > 0 else base.scale
        object.__setattr__(self, "outer_radius", float(r))

    @property
    def curve(self) -> SpaceCurve:
        return self._curve

    @property
    def t_out(self) -> float:
        return self.outer_radius / self.curve.scale

    def wedge_speed(self, theta):
        """|(gamma - vertex) ^ gamma'| at the given angles."""
        g = self.curve.points(theta) - self.vertex
        dg = self.curve.velocities(theta)
        g2 = np.sum(g * g, axis=-1)
        dg2 = np.sum(dg * dg, axis=-1)
        cross = np.sum(g * dg, axis=-1)
        return np.sqrt(np.maximum(g2 * dg2 - cross * cross, 0.0))

    def check_nondegenerate(self, tol: float = 1e-10):
        m = self.curve.nsamples
        theta = np.arange(m) * (self.curve.period / m)
        g = self.curve.points(theta) - self.vertex
        dg = self.curve.velocities(theta)
        wedge = self.wedge_speed(theta)
        scale = np.linalg.norm(g, axis=-1) * np.linalg.norm(dg, axis=-1)
        bad = wedge <= tol * np.maximum(scale, 1e-300)
        if np.mean(bad) > 0.01:
            raise DegenerateCone(
                "link direction and velocity are parallel on "
                f"{100 * np.mean(bad):.1f}% of the samples")

    def chart(self, order=(32, 64)) -> ParamSurface:
        curve = self.curve
        vertex = self.vertex

        def cmap(T, TH):
            g = curve.points(TH)
            return vertex + np.asarray(T)[..., None] * (g - vertex)

        def cjac(T, TH):
            g = curve.points(TH)
            dg = curve.velocities(TH)
            return g - vertex, np.asarray(T)[..., None] * dg

        solver = None
        if np.all(vertex == 0.0):
            def solver(c, V):
                return c / np.linalg.norm(curve.points(V), axis=-1)

        return ParamSurface(cmap, (0.0, self.t_out, 0.0, curve.period),
                            jacobian=cjac, order=order, radial_axis=0,
                            radius_solver=solver)


def cone_mass(cone: ConeOverCurve, rtol: float = 1e-9) -> float:
    """Mass of the cone, (t_out^2 / 2) * integral of the wedge speed."""
    cone.check_nondegenerate()
    val = periodic_trapezoid(cone.wedge_speed, cone.curve.period,
                             cone.curve.nsamples, rtol)
    return 0.5 * cone.t_out ** 2 * float(val)


def infinite_cone_cylinder_mass(curve, plane_basis: np.ndarray,
                                radius: float, nsamples: int | None = None
                                ) -> float:
    """Mass of the infinite cone over the curve inside a plane's cylinder.

    ``plane_basis`` is a d x 2 orthonormal column pair; the cylinder is
    {|B^T x| <= radius}.  Rays are cut at t = radius / |B^T gamma| so the
    integral is closed in t.
    """
    base = curve.space_curve() if isinstance(curve, WindingCurve) else curve

    def integrand(theta):
        g = base.points(theta)
        dg = base.velocities(theta)
        g2 = np.sum(g * g, axis=-1)
        dg2 = np.sum(dg * dg, axis=-1)
        cross = np.sum(g * dg, axis=-1)
        wedge = np.sqrt(np.maximum(g2 * dg2 - cross * cross, 0.0))
        proj = np.linalg.norm(g @ plane_basis, axis=-1)
        return wedge * (radius / proj) ** 2

    m = nsamples or base.nsamples
    return 0.5 * float(periodic_trapezoid(integrand, base.period, m))


# ---------------------------------------------------------------------------
# module-level operation names

def surface_mass(surface, check: bool = True,
                 rtol: float = MASS_SELF_CHECK_TOL) -> float:
    return surface.mass(check=check, rtol=rtol)


def integrate_form(surface, form, order=None) -> float:
    return surface.integrate_form(form, order=order)


def integrate_density(surface, density, order=None) -> float:
    if isinstance(surface, ConeOverCurve):
        surface = surface.chart()
    return surface.integrate_density(density, order=order)


def pushforward(surface, phi, dphi=None):
    if isinstance(surface, ConeOverCurve):
        surface = surface.chart()
    return surface.pushforward(phi, dphi)


def restrict_annulus(current, s: float, r: float):
    """Restriction to the annulus s <= |x| <= r about the origin."""
    if isinstance(current, ConeOverCurve):
        current = current.chart()
    if isinstance(current, SurfaceStack):
        pieces = []
        for p in current.pieces:
            try:
                pieces.append(RadialRestriction(p, s, r))
            except EmptyRestriction:
                pass
        if not pieces:
            raise EmptyRestriction("annulus misses every piece")
        return SurfaceStack(pieces)
    return RadialRestriction(current, s, r)


def annulus_mass(current, s: float, r: float, check: bool = True) -> float:
    """Mass of the annulus restriction; zero when the slab is empty."""
    try:
        return restrict_annulus(current, s, r).mass(check=check)
    except EmptyRestriction:
        return 0.0
