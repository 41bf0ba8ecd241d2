"""Scenario families and runners behind the command line interface.

A scenario is a named, seeded experiment of one of five kinds: ``epi``
(cone vs competitor gap ratios), ``decay`` (mass profile envelopes),
``flat`` (radial homotopy bounds), ``calib`` (mass comparison probes) and
``split`` (plane clustering).  Each scenario renders to a CSV (``split``
to JSON), with a trailing config-hash comment so artifacts can be tied
back to the exact configuration that produced them.  All randomness is
drawn from a generator seeded per scenario; two runs of the same config
produce byte-identical artifacts.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ScenarioError, TclabError
from .fourier import FourierSeries, harmonic_extension
from .currents import WindingCurve
from .epiperimetric import epiperimetric_gap, mode_ratio
from .monotonicity import (DecayConstants, mass_profile, deviation_integral,
                           synthesize_decay_profile, decay_envelope)
from .flat import radial_homotopy_filling
from .calibration import (solid_angle_form, TwoFormField, bump_field,
                          comass_field_check, almost_minimality_probe,
                          spherical_cap)
from .decomposition import EmbeddedCurve, split_current

KINDS = ("epi", "decay", "flat", "calib", "split")

# Single-mode linear theory predicts a gap ratio of 2a/(1+a^2) for a
# profile of frequency ratio a.  Random families must certify ratio
# <= 0.95 with margin for quadratic corrections, so the mode pool
# excludes the band where the linear ratio already exceeds this cap.
RANDOM_RATIO_CAP = 0.93
EXCESS_CAP = 0.05


# ---------------------------------------------------------------------------
# curve families

def single_mode_curve(Q: int, mode: int, amplitude: float, n: int = 1,
                      rho: float = 1.0, phase: float = 0.0,
                      direction: int = 0) -> WindingCurve:
    """Winding curve whose profile is one cosine mode of the given size."""
    alpha = np.zeros((mode + 1, n))
    beta = np.zeros((mode, n))
    alpha[mode, direction] = amplitude * np.cos(phase)
    beta[mode - 1, direction] = amplitude * np.sin(phase)
    series = FourierSeries(Q=Q, n=n, alpha=alpha, beta=beta)
    return WindingCurve.from_fourier(series, rho=rho)


def single_mode_series(Q: int, mode: int, amplitude: float, n: int = 1,
                       phase: float = 0.0) -> FourierSeries:
    alpha = np.zeros((mode + 1, n))
    beta = np.zeros((mode, n))
    alpha[mode, 0] = amplitude * np.cos(phase)
    beta[mode - 1, 0] = amplitude * np.sin(phase)
    return FourierSeries(Q=Q, n=n, alpha=alpha, beta=beta)


def random_link_curve(rng: np.random.Generator, qmax: int = 3,
                      nmax: int = 3, max_mode: int = 6) -> WindingCurve:
    """Band-limited random winding curve for cone and length checks."""
    Q = int(rng.integers(1, qmax + 1))
    n = int(rng.integers(1, nmax + 1))
    nmodes = int(rng.integers(1, max_mode + 1))
    alpha = np.zeros((nmodes + 1, n))
    beta = np.zeros((nmodes, n))
    decay = 1.0 / (1.0 + np.arange(1, nmodes + 1)) ** 2
    alpha[1:] = rng.standard_normal((nmodes, n)) * decay[:, None]
    beta[:] = rng.standard_normal((nmodes, n)) * decay[:, None]
    scale = 0.25 / max(1.0, np.abs(alpha).max() + np.abs(beta).max())
    series = FourierSeries(Q=Q, n=n, alpha=alpha * scale, beta=beta * scale)
    return WindingCurve.from_fourier(series, rho=1.0)


def allowed_random_modes(Q: int, max_mode_factor: int = 5) -> list:
    """Profile frequencies whose linear gap ratio stays below the cap.

    Frequencies with i/Q near 1 have ratios above 0.95 and cannot
    certify the random-family bound; frequency Q itself is a plane tilt,
    not a genuine perturbation.  Both are excluded.
    """
    pool = []
    for i in range(1, max_mode_factor * Q + 1):
        if i == Q:
            continue
        if mode_ratio(i / Q) <= RANDOM_RATIO_CAP:
            pool.append(i)
    return pool


def random_epi_curve(rng: np.random.Generator, qmax: int = 3,
                     lip_max: float = 0.1) -> WindingCurve:
    """Random multi-mode curve in the certified convergence regime.

    All modes share one normal direction, the mode pool obeys the
    linear ratio cap, and the profile is rescaled to the requested
    Lipschitz budget.
    """
    Q = int(rng.integers(1, qmax + 1))
    n = int(rng.integers(1, 3))
    pool = allowed_random_modes(Q)
    k = int(rng.integers(2, min(4, len(pool)) + 1))
    modes = sorted(rng.choice(pool, size=k, replace=False).tolist())
    direction = int(rng.integers(0, n))
    N = max(modes)
    alpha = np.zeros((N + 1, n))
    beta = np.zeros((N, n))
    for i in modes:
        c = rng.standard_normal() / (i / Q)
        s = rng.standard_normal() / (i / Q)
        alpha[i, direction] = c
        beta[i - 1, direction] = s
    # rescale to the Lipschitz budget; bound sup |f'| by the triangle
    # inequality over modes rather than a sampled maximum, which can
    # miss a peak between grid points and leak past the budget
    freq = np.arange(1, N + 1) / Q
    power = np.sum(alpha[1:] ** 2, axis=1) + np.sum(beta ** 2, axis=1)
    lip = float(np.sum(freq * np.sqrt(power)))
    target = lip_max * float(rng.uniform(0.3, 1.0))
    scale = target / lip
    # a Lipschitz budget alone does not bound the excess: a slow mode
    # (i < Q) buys a tall profile with a flat derivative, so also cap
    # the quadratic excess model to stay inside the tilt search's gate
    e2 = 0.25 * np.pi * Q * scale * scale \
        * float(np.sum(power * (1.0 + freq ** 2)))
    if e2 > EXCESS_CAP:
        scale *= np.sqrt(EXCESS_CAP / e2)
    series = FourierSeries(Q=Q, n=n, alpha=alpha * scale, beta=beta * scale)
    return WindingCurve.from_fourier(series, rho=1.0)


def extension_surface(Q: int, mode: int, amplitude: float, rho: float = 1.0,
                      n: int = 1, order=None):
    """Graph surface extending a single-mode curve into the disk."""
    series = single_mode_series(Q, mode, amplitude, n=n)
    if isinstance(order, int):
        order = (order, max(order, 8 * mode))
    return harmonic_extension(series, r_out=rho, order=order)


def orthogonal_planes_instance(Q_list=(1, 1), rho: float = 1.0):
    """Flat circles in the two orthogonal coordinate planes of R^4."""
    eye = np.eye(4)
    frames = [eye[:, [0, 1, 2]], eye[:, [2, 3, 0]]]
    curves = []
    for k, Q in enumerate(Q_list):
        series = FourierSeries(Q=int(Q), n=1, alpha=np.zeros((1, 1)),
                               beta=np.zeros((0, 1)))
        curve = WindingCurve.from_fourier(series, rho=rho)
        curves.append(EmbeddedCurve(curve=curve, frame=frames[k % 2]))
    return curves


# ---------------------------------------------------------------------------
# scenario plumbing

@dataclass(frozen=True)
class Scenario:
    """One named experiment: kind, seed and kind-specific parameters."""

    name: str
    kind: str
    seed: int
    params: dict = field(default_factory=dict)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng([self.seed & 0xFFFFFFFFFFFFFFFF])

    def config_hash(self) -> str:
        blob = json.dumps({"name": self.name, "kind": self.kind,
                           "seed": self.seed, "params": self.params},
                          sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class ScenarioResult:
    name: str
    kind: str
    columns: tuple
    rows: list
    verdicts: list
    fitted: dict
    config_hash: str
    payload: dict | None = None

    @property
    def npass(self) -> int:
        return sum(1 for v in self.verdicts if v == "PASS")

    @property
    def nfail(self) -> int:
        return len(self.verdicts) - self.npass


def load_config(source) -> list:
    """Parse a config mapping (or JSON text) into scenario objects."""
    if isinstance(source, str):
        try:
            source = json.loads(source)
        except json.JSONDecodeError as err:
            raise ConfigError(f"config is not valid JSON: {err}")
    if not isinstance(source, dict):
        raise ConfigError("config root must be a JSON object")
    raw = source.get("scenarios")
    if raw is None:
        raise ConfigError("config lacks a 'scenarios' list")
    if not isinstance(raw, list):
        raise ConfigError("'scenarios' must be a list")
    out = []
    seen = set()
    for k, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ConfigError(f"scenario #{k} is not an object")
        name = entry.get("name")
        kind = entry.get("kind")
        if not isinstance(name, str) or not name:
            raise ConfigError(f"scenario #{k} lacks a name")
        if name in seen:
            raise ConfigError(f"duplicate scenario name {name!r}")
        seen.add(name)
        if kind not in KINDS:
            raise ConfigError(f"scenario {name!r}: unknown kind {kind!r}")
        seed = entry.get("seed", 0)
        if not isinstance(seed, int):
            raise ConfigError(f"scenario {name!r}: seed must be an integer")
        params = entry.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError(f"scenario {name!r}: params must be an object")
        out.append(Scenario(name=name, kind=kind, seed=seed, params=params))
    return out


def _fit_power(x, y):
    """Least squares exponent and prefactor of y = C * x^k, y > 0."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    k, logc = np.polyfit(lx, ly, 1)
    return float(k), float(np.exp(logc))


# ---------------------------------------------------------------------------
# per-kind runners

def _run_epi(sc: Scenario):
    p = sc.params
    rng = sc.rng()
    qs = [int(q) for q in p.get("Q", [1, 2, 3])]
    ratios = [int(r) for r in p.get("ratios", [2, 3, 4])]
    amplitudes = [float(a) for a in p.get("amplitudes", [1e-3, 1e-2])]
    nrandom = int(p.get("random", 0))
    lip_max = float(p.get("lip_max", 0.1))
    eps_target = float(p.get("eps_target", 1e-2))

    columns = ("Q", "n", "modes", "amplitude", "raw_excess",
               "optimal_excess", "cone_gap", "competitor_gap", "ratio",
               "verdict")
    rows, verdicts = [], []
    worst_ratio = 0.0

    def push(curve, amplitude):
        nonlocal worst_ratio
        vd = epiperimetric_gap(curve, eps_target=eps_target, lip_max=lip_max)
        series = curve.series
        active = [i for i in range(1, series.nmodes + 1)
                  if np.abs(series.alpha[i]).max() > 0
                  or np.abs(series.beta[i - 1]).max() > 0]
        verdict = "PASS" if vd.passed else "FAIL"
        rows.append((curve.Q, series.n, "+".join(str(i) for i in active),
                     amplitude, vd.raw_excess, vd.optimal_excess,
                     vd.cone_gap, vd.competitor_gap, vd.ratio, verdict))
        verdicts.append(verdict)
        worst_ratio = max(worst_ratio, vd.ratio)

    for Q in qs:
        for ratio in ratios:
            for amp in amplitudes:
                push(single_mode_curve(Q, ratio * Q, amp), amp)
    for _ in range(nrandom):
        curve = random_epi_curve(rng, lip_max=lip_max)
        amp = float(max(np.abs(curve.series.alpha).max(),
                        np.abs(curve.series.beta).max()))
        push(curve, amp)

    fitted = {"epsilon13": 1.0 - worst_ratio}
    return columns, rows, verdicts, fitted, None


def _decay_radii(r_max: float, levels: int):
    return [r_max * 2.0 ** (-k) for k in range(levels - 1, -1, -1)]


def _run_decay(sc: Scenario):
    p = sc.params
    family = p.get("family", "extension")
    constants = DecayConstants(epsilon12=float(p.get("epsilon12", 0.1)),
                               alpha0=float(p.get("alpha0", 1.0)),
                               cbar=float(p.get("cbar", 0.0)),
                               eps=float(p.get("eps", 0.5)))
    budget = float(p.get("budget", 10.0))
    levels = int(p.get("levels", 8))
    Q = int(p.get("Q", 1))

    columns = ("r", "f", "e", "deviation", "envelope_C", "verdict")
    rows, verdicts = [], []

    if family == "extension":
        mode = int(p.get("mode", 2 * Q))
        amp = float(p.get("amplitude", 1e-2))
        rho = float(p.get("rho", 1.0))
        r_max = float(p.get("r_max", 0.5 * rho))
        surface = extension_surface(Q, mode, amp, rho=rho,
                                    order=p.get("quad_order"))
        radii = _decay_radii(r_max, levels)
        profile = mass_profile(surface, radii, Q)
        report = decay_envelope(profile, constants, budget=budget)
        verdict = "PASS" if report.passed else "FAIL"
        exc = profile.excess()
        for k, r in enumerate(radii):
            dev = (deviation_integral(surface, radii[k - 1], r)
                   if k > 0 else "")
            rows.append((r, profile.values[k], exc[k], dev, report.c,
                         verdict))
            verdicts.append(verdict)
        kfit, _ = _fit_power(radii, np.maximum(exc, 1e-300))
        fitted = {"gamma0": 0.5 * kfit, "C": report.c}
    elif family == "ode":
        e0 = float(p.get("e0", 1e-2))
        r0 = float(p.get("r0", 1.0))
        radii = _decay_radii(r0, levels)
        profile = synthesize_decay_profile(constants, e0, r0, radii, Q=Q)
        report = decay_envelope(profile, constants, budget=budget)
        verdict = "PASS" if report.passed else "FAIL"
        exc = profile.excess()
        for k, r in enumerate(radii):
            rows.append((r, profile.values[k], exc[k], "", report.c,
                         verdict))
            verdicts.append(verdict)
        kfit, _ = _fit_power(radii, np.maximum(exc, 1e-300))
        fitted = {"gamma0": 0.5 * kfit, "C": report.c}
    else:
        raise ConfigError(f"decay family {family!r} not recognized")
    return columns, rows, verdicts, fitted, None


def _run_flat(sc: Scenario):
    p = sc.params
    Q = int(p.get("Q", 1))
    mode = int(p.get("mode", 2 * Q))
    amp = float(p.get("amplitude", 1e-2))
    rho = float(p.get("rho", 1.0))
    r_max = float(p.get("r_max", 0.5 * rho))
    levels = int(p.get("levels", 6))
    tnodes = int(p.get("tnodes", 12))
    surface = extension_surface(Q, mode, amp, rho=rho,
                                order=p.get("quad_order"))

    columns = ("r", "s", "bound", "filling", "residual", "verdict")
    rows, verdicts = [], []
    radii = _decay_radii(r_max, levels)
    bounds = []
    for r in radii:
        s = 0.5 * r
        est = radial_homotopy_filling(surface, s, r, tnodes=tnodes)
        ok = np.isfinite(est.bound) and est.bound >= 0.0
        verdict = "PASS" if ok else "FAIL"
        rows.append((r, s, est.bound, est.filling_mass, est.residual_mass,
                     verdict))
        verdicts.append(verdict)
        bounds.append(est.bound)
    kfit, cfit = _fit_power(radii, np.maximum(bounds, 1e-300))
    fitted = {"gamma0": kfit, "C": cfit}
    return columns, rows, verdicts, fitted, None


def _calib_surface(p):
    kind = p.get("surface", "disk")
    radius = float(p.get("radius", 1.0))
    qo = p.get("quad_order")
    if qo is None:
        order = (96, 192)
    elif isinstance(qo, int):
        order = (qo, 2 * qo)
    else:
        order = (int(qo[0]), int(qo[1]))
    if kind == "disk":
        from .currents import ParamSurface

        def chart(w, theta):
            w, theta = np.broadcast_arrays(np.asarray(w, dtype=float),
                                           np.asarray(theta, dtype=float))
            out = np.zeros(w.shape + (3,))
            out[..., 0] = radius * w * np.cos(theta)
            out[..., 1] = radius * w * np.sin(theta)
            return out

        def jac(w, theta):
            w, theta = np.broadcast_arrays(np.asarray(w, dtype=float),
                                           np.asarray(theta, dtype=float))
            xu = np.zeros(w.shape + (3,))
            xv = np.zeros(w.shape + (3,))
            xu[..., 0] = radius * np.cos(theta)
            xu[..., 1] = radius * np.sin(theta)
            xv[..., 0] = -radius * w * np.sin(theta)
            xv[..., 1] = radius * w * np.cos(theta)
            return xu, xv

        return ParamSurface(chart, (0.0, 1.0, 0.0, 2.0 * np.pi),
                            jacobian=jac, order=order), 3
    if kind == "equator":
        return spherical_cap(radius, 0.0, np.pi, dim=4, order=order), 4
    if kind == "sphere":
        return spherical_cap(radius, 0.0, np.pi, dim=3, order=order), 3
    raise ConfigError(f"calib surface {kind!r} not recognized")


def _run_calib(sc: Scenario):
    p = sc.params
    rng = sc.rng()
    surface, dim = _calib_surface(p)
    omega = float(p.get("omega", 0.0))
    nprobes = int(p.get("probes", 20))
    eps_list = [float(e) for e in p.get("eps", [0.05])]
    radius = float(p.get("radius", 1.0))
    form_scale = float(p.get("form_scale", 1.0))
    bump_power = int(p.get("bump_power", 5))

    columns = ("probe", "mass_T", "mass_T_plus_dS", "mass_S", "omega",
               "slack", "verdict")
    rows, verdicts = [], []

    if form_scale != 1.0 or p.get("comass_check", False):
        base = solid_angle_form()
        form = TwoFormField(
            matrix=lambda x: form_scale * base(x),
            exterior=lambda x: form_scale * base.exterior(x))
        u = rng.standard_normal((32, 3))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        worst, ok = comass_field_check(form, radius * u)
        if not ok:
            rows.append(("comass", worst, 0.0, 0.0, omega, 1.0 - worst,
                         "FAIL"))
            verdicts.append("FAIL")
            return columns, rows, verdicts, {}, None

    kind = p.get("surface", "disk")
    for k in range(nprobes):
        if kind == "disk":
            c2 = rng.uniform(-0.45, 0.45, size=2)
            center = np.array([c2[0], c2[1], 0.0]) * radius
            rmax = radius * (0.93 - np.linalg.norm(c2))
            brad = float(rng.uniform(0.15 * radius,
                                     min(0.45 * radius, rmax)))
            direction = rng.standard_normal(3)
        else:
            u = rng.standard_normal(3)
            u /= np.linalg.norm(u)
            center = np.zeros(dim)
            center[:3] = radius * u
            brad = float(rng.uniform(0.2, 0.6) * radius)
            direction = rng.standard_normal(dim)
        direction /= np.linalg.norm(direction)
        chi = bump_field(center, brad, direction, power=bump_power)
        for eps in eps_list:
            probe = almost_minimality_probe(surface, omega, chi, [eps])[0]
            verdict = "PASS" if probe.passed else "FAIL"
            rows.append((k, probe.mass, probe.mass_deformed,
                         probe.mass_sweep, omega, probe.slack, verdict))
            verdicts.append(verdict)
    return columns, rows, verdicts, {}, None


def _run_split(sc: Scenario):
    p = sc.params
    q_list = [int(q) for q in p.get("Q", [1, 1])]
    width = float(p.get("width", 0.05))
    curves = orthogonal_planes_instance(q_list)
    planes = [c.plane() for c in curves]
    result = split_current(curves, planes, width)
    index = {id(c): k for k, c in enumerate(curves)}
    payload = {
        "clusters": [[index[id(c)] for c in g] for g in result.groups],
        "multiplicities": [int(m) for m in result.multiplicities],
        "masses": [float(m) for m in result.masses],
        "total_mass": float(result.total_mass),
        "verdict": "PASS" if result.passed else "FAIL",
    }
    columns = ("group", "multiplicity", "mass", "verdict")
    rows, verdicts = [], []
    for g, (mult, m) in enumerate(zip(result.multiplicities, result.masses)):
        verdict = "PASS" if result.passed else "FAIL"
        rows.append((g, mult, m, verdict))
        verdicts.append(verdict)
    return columns, rows, verdicts, {}, payload


_RUNNERS = {"epi": _run_epi, "decay": _run_decay, "flat": _run_flat,
            "calib": _run_calib, "split": _run_split}


def run_scenario(sc: Scenario) -> ScenarioResult:
    """Execute one scenario, wrapping module errors with its name."""
    try:
        columns, rows, verdicts, fitted, payload = _RUNNERS[sc.kind](sc)
    except ConfigError:
        raise
    except TclabError as err:
        raise ScenarioError(sc.name, str(err)) from err
    return ScenarioResult(name=sc.name, kind=sc.kind, columns=columns,
                          rows=rows, verdicts=verdicts, fitted=fitted,
                          config_hash=sc.config_hash(), payload=payload)


# ---------------------------------------------------------------------------
# artifact rendering

def _cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def render_csv(result: ScenarioResult) -> str:
    lines = [",".join(result.columns)]
    for row in result.rows:
        lines.append(",".join(_cell(v) for v in row))
    lines.append(f"# config_hash={result.config_hash}")
    return "\n".join(lines) + "\n"


def render_json(result: ScenarioResult) -> str:
    payload = dict(result.payload or {})
    payload["config_hash"] = result.config_hash
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def artifact_name(result: ScenarioResult) -> str:
    ext = "json" if result.kind == "split" else "csv"
    return f"{result.name}.{ext}"


def render_artifact(result: ScenarioResult) -> str:
    if result.kind == "split":
        return render_json(result)
    return render_csv(result)


SUMMARY_COLUMNS = ("scenario", "kind", "pass", "fail", "epsilon13",
                   "gamma0", "C")


def summary_rows(results) -> list:
    rows = []
    for res in results:
        fit = res.fitted
        rows.append((res.name, res.kind, res.npass, res.nfail,
                     fit.get("epsilon13", ""), fit.get("gamma0", ""),
                     fit.get("C", "")))
    return rows


def render_summary(results) -> str:
    lines = [",".join(SUMMARY_COLUMNS)]
    for row in summary_rows(results):
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"
