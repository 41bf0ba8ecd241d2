"""Mass ratios over ball scales, almost-monotonicity fits and decay envelopes.

For a 2-current with vertex at the origin the normalized mass ratio is

    e(r) = ||T||(B_r) / (pi r^2) - Q

and the deviation integral collects |x_perp|^2 / |x|^4 over annuli, where
x_perp is the component of the position normal to the surface.  Cones have
deviation zero; the fitted constant of the almost-monotonicity inequality

    dev(s, r) <= C * (e(r) - e(s) + r^alpha0)

measures how far a given current is from that ideal.  Decay envelopes
bound e(s) by a power of s/r plus an additive drift with its own rate.
"""

from dataclasses import dataclass, field

import numpy as np

from .currents import annulus_mass, integrate_density, restrict_annulus
from .errors import EmptyRestriction, VertexTooClose
from .geom import Plane2

OMEGA2 = np.pi
VERTEX_RADIUS = 1e-6


@dataclass(frozen=True)
class MassProfile:
    """Ball masses of one current over an increasing ladder of radii."""

    radii: np.ndarray
    values: np.ndarray
    Q: int

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "values", values)
        if radii.ndim != 1 or radii.size < 2:
            raise ValueError("need at least two radii")
        if radii.size != values.size:
            raise ValueError("radii and values must have equal length")
        if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
            raise ValueError("radii must be positive and increasing")

    def excess(self) -> np.ndarray:
        return self.values / (OMEGA2 * self.radii ** 2) - self.Q


@dataclass(frozen=True)
class DecayConstants:
    """Constants steering the mass-ratio decay estimate.

    epsilon12 sets the geometric rate a = 2 / (1 - epsilon12); alpha0 is
    the almost-minimality exponent, cbar its coefficient and eps the drift
    rate, subject to 2 + alpha0 > eps + a.
    """

    epsilon12: float
    alpha0: float = 1.0
    cbar: float = 0.0
    eps: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.epsilon12 < 1.0:
            raise ValueError("epsilon12 must lie in (0, 1)")
        if self.alpha0 <= 0 or self.cbar < 0 or self.eps <= 0:
            raise ValueError("alpha0 and eps must be positive, cbar >= 0")
        if 2.0 + self.alpha0 <= self.eps + self.a:
            raise ValueError(
                f"need 2 + alpha0 > eps + a, got a = {self.a:.4f}")

    @property
    def a(self) -> float:
        return 2.0 / (1.0 - self.epsilon12)

    @property
    def decay_exponent(self) -> float:
        """Power of s/r in the mass-ratio envelope."""
        return self.a - 2.0


def mass_profile(current, radii, Q: int) -> MassProfile:
    values = np.array([annulus_mass(current, 0.0, float(r)) for r in radii])
    return MassProfile(radii=np.asarray(radii, float), values=values, Q=Q)


def _perp_density(perp_against):
    if perp_against == "tangent":
        def density(x, xu, xv):
            e = np.sum(xu * xu, axis=-1)
            f = np.sum(xu * xv, axis=-1)
            g = np.sum(xv * xv, axis=-1)
            pu = np.sum(xu * x, axis=-1)
            pv = np.sum(xv * x, axis=-1)
            det = e * g - f * f
            ca = (g * pu - f * pv) / det
            cb = (e * pv - f * pu) / det
            perp = x - ca[..., None] * xu - cb[..., None] * xv
            return np.sum(perp * perp, axis=-1), np.sum(x * x, axis=-1)
    elif isinstance(perp_against, Plane2):
        proj = perp_against.projector()

        def density(x, xu, xv):
            perp = x - x @ proj
            return np.sum(perp * perp, axis=-1), np.sum(x * x, axis=-1)
    else:
        raise TypeError("perp_against must be 'tangent' or a Plane2")
    return density


def deviation_integral(current, s: float, r: float,
                       perp_against="tangent") -> float:
    """Integral of |x_perp|^2 / |x|^4 over the annulus between s and r.

    Normal components are taken against the surface tangent plane by
    default, or against a fixed reference plane.
    """
    if s < VERTEX_RADIUS:
        raise VertexTooClose(
            f"inner radius {s} is inside the vertex ball {VERTEX_RADIUS}")
    base = _perp_density(perp_against)

    def density(x, xu, xv):
        p2, x2 = base(x, xu, xv)
        return p2 / x2 ** 2

    try:
        region = restrict_annulus(current, s, r)
    except EmptyRestriction:
        return 0.0
    return integrate_density(region, density)


@dataclass(frozen=True)
class RadialBound:
    """Mass of the radial projection with its Cauchy-Schwarz factors."""

    value: float
    i1: float
    i2: float

    @property
    def product(self) -> float:
        return self.i1 * self.i2


def radial_projection_mass(current, s: float, r: float) -> RadialBound:
    """Integral of |x_perp| / |x|^3 over an annulus, with the two
    square-integral factors that dominate it."""
    if s < VERTEX_RADIUS:
        raise VertexTooClose(
            f"inner radius {s} is inside the vertex ball {VERTEX_RADIUS}")
    base = _perp_density("tangent")

    def dens_value(x, xu, xv):
        p2, x2 = base(x, xu, xv)
        return np.sqrt(p2) / x2 ** 1.5

    def dens_i1(x, xu, xv):
        p2, x2 = base(x, xu, xv)
        return p2 / x2 ** 2

    def dens_i2(x, xu, xv):
        return 1.0 / np.sum(x * x, axis=-1)

    try:
        region = restrict_annulus(current, s, r)
    except EmptyRestriction:
        return RadialBound(0.0, 0.0, 0.0)
    value = integrate_density(region, dens_value)
    i1 = np.sqrt(integrate_density(region, dens_i1))
    i2 = np.sqrt(integrate_density(region, dens_i2))
    return RadialBound(value=value, i1=i1, i2=i2)


@dataclass(frozen=True)
class MonotonicityReport:
    """Fit of the almost-monotonicity constant over all radius pairs."""

    c02: float
    passed: bool
    worst_pair: tuple
    alpha0: float
    budget: float
    infeasible: list = field(default_factory=list)


def check_almost_monotonicity(current, radii, Q: int, alpha0: float = 1.0,
                              budget: float = 10.0) -> MonotonicityReport:
    """Fit the smallest C with dev(s, r) <= C (e(r) - e(s) + r^alpha0).

    Deviations are accumulated over consecutive slabs, so the cost is one
    annulus integral per rung.  Pairs whose right-hand side is not
    positive are reported as infeasible and fail the check.
    """
    profile = mass_profile(current, radii, Q)
    e = profile.excess()
    rr = profile.radii
    slabs = np.array([deviation_integral(current, rr[j], rr[j + 1])
                      for j in range(rr.size - 1)])
    cum = np.concatenate([[0.0], np.cumsum(slabs)])
    c02 = 0.0
    worst = (rr[0], rr[-1])
    infeasible = []
    for i in range(rr.size):
        for j in range(i + 1, rr.size):
            dev = cum[j] - cum[i]
            rhs = e[j] - e[i] + rr[j] ** alpha0
            if rhs <= 0:
                infeasible.append((float(rr[i]), float(rr[j])))
                continue
            cand = dev / rhs
            if cand > c02:
                c02 = cand
                worst = (float(rr[i]), float(rr[j]))
    passed = (not infeasible) and c02 <= budget
    return MonotonicityReport(c02=float(c02), passed=passed,
                              worst_pair=worst, alpha0=alpha0,
                              budget=budget, infeasible=infeasible)


def synthesize_decay_profile(constants: DecayConstants, e0: float,
                             r0: float, radii, Q: int = 1) -> MassProfile:
    """Closed-form mass profile of the comparison rate equation.

    Integrating d/dr (r^{-a} gap(r)) = -a cbar r^{eps - 1} from s to r0
    with gap(r) = ||T||(B_r) - Q pi r^2 gives

        e(s) = (s/r0)^{a-2} e(r0)
             + (a cbar / (eps pi)) s^{a-2} (r0^eps - s^eps).
    """
    radii = np.asarray(radii, dtype=float)
    a = constants.a
    eps = constants.eps
    drift = (a * constants.cbar / (eps * OMEGA2)) \
        * radii ** (a - 2.0) * (r0 ** eps - radii ** eps)
    e = (radii / r0) ** (a - 2.0) * e0 + drift
    values = OMEGA2 * radii ** 2 * (Q + e)
    return MassProfile(radii=radii, values=values, Q=Q)


@dataclass(frozen=True)
class EnvelopeReport:
    """Least drift coefficient closing the two-scale decay inequality."""

    c: float
    exponent: float
    passed: bool
    worst_pair: tuple
    budget: float


def decay_envelope(profile: MassProfile, constants: DecayConstants,
                   budget: float = 10.0) -> EnvelopeReport:
    """Fit the least C with e(s) <= (s/r)^(a-2) e(r) + C s^(a-2) r^eps
    over all scale pairs of the profile."""
    e = profile.excess()
    rr = profile.radii
    a = constants.a
    eps = constants.eps
    c = 0.0
    worst = (float(rr[0]), float(rr[-1]))
    for i in range(rr.size):
        for j in range(i + 1, rr.size):
            s, r = rr[i], rr[j]
            need = (e[i] - (s / r) ** (a - 2.0) * e[j]) \
                / (s ** (a - 2.0) * r ** eps)
            if need > c:
                c = float(need)
                worst = (float(s), float(r))
    return EnvelopeReport(c=c, exponent=a - 2.0, passed=c <= budget,
                          worst_pair=worst, budget=budget)
