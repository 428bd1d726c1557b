"""Quantitative checks on the dissipative dynamics: a-priori norm bound,
absorbing ball, spatial tail decay, two-trajectory contraction, continuity
in the driving, and an empirical correlation-dimension estimate.

Each predict_* turns the closed-form constants into a prediction object;
the matching verify_* tests a simulated trajectory against it and reports
pass/fail with margins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _sstats
from scipy.spatial.distance import pdist as _pdist

from . import driving as drv
from .driving import DrivingSpec
from .errors import DampingTooWeakError, DomainError, TruncationTooSmallError
from .integrator import IntegratorConfig, Trajectory, integrate
from .lattice import LatticeState, ModelParams, norm_sq, random_state


def _require_positive_damping(gamma: float, spec: DrivingSpec) -> float:
    gt = drv.effective_damping(gamma, spec)
    if gt <= 0:
        raise DampingTooWeakError(
            "strong-damping condition violated: need gamma > 2*sup||g2|| "
            f"(gamma={gamma:.6g}, 2*sup||g2||={2 * spec.g2.sup_norm():.6g})")
    return gt


# ---------------------------------------------------------------------------
# a-priori bound

@dataclass
class BoundReport:
    ok: bool
    max_excess: float
    first_violation_t: float | None = None


def check_apriori_bound(traj: Trajectory, params: ModelParams,
                        spec: DrivingSpec) -> BoundReport:
    """||psi(t)||^2 <= ||psi(t0)||^2 e^{-Gamma (t-t0)} + sup||g1||^2/Gamma^2
    at every sample, with slack 1e-6*(1 + ||psi(t0)||^2)."""
    gamma_eff = _require_positive_damping(params.gamma, spec)
    g1_sup = spec.g1.sup_norm()
    n0_sq = traj.norms[0] ** 2
    slack = 1e-6 * (1 + n0_sq)
    t0 = traj.times[0]
    bound = n0_sq * np.exp(-gamma_eff * (traj.times - t0)) + g1_sup ** 2 / gamma_eff ** 2
    excess = traj.norms ** 2 - bound - slack
    bad = np.nonzero(excess > 0)[0]
    return BoundReport(
        ok=bad.size == 0,
        max_excess=float(np.max(excess)),
        first_violation_t=float(traj.times[bad[0]]) if bad.size else None,
    )


# ---------------------------------------------------------------------------
# absorbing ball

@dataclass
class AbsorbingPrediction:
    gamma_eff: float
    radius: float  # K, with K^2 = 2 sup||g1||^2 / Gamma^2
    entry_time: float  # T(r), clamped to >= 0
    initial_radius: float

    def entry_time_for(self, r: float) -> float:
        g1_sup = self.radius * self.gamma_eff / math.sqrt(2.0)
        if g1_sup == 0.0:
            return 0.0
        arg = self.gamma_eff ** 2 * r ** 2 / g1_sup ** 2
        return max(0.0, math.log(arg) / self.gamma_eff) if arg > 0 else 0.0


def predict_absorbing(params: ModelParams, spec: DrivingSpec,
                      r: float) -> AbsorbingPrediction:
    """Ball radius K and entry time T for initial data of norm <= r."""
    gamma_eff = _require_positive_damping(params.gamma, spec)
    g1_sup = spec.g1.sup_norm()
    radius = math.sqrt(2.0) * g1_sup / gamma_eff
    if g1_sup > 0:
        arg = gamma_eff ** 2 * r ** 2 / g1_sup ** 2
        entry = max(0.0, math.log(arg) / gamma_eff) if arg > 0 else 0.0
    else:
        entry = 0.0
    return AbsorbingPrediction(gamma_eff=gamma_eff, radius=radius,
                               entry_time=entry, initial_radius=r)


@dataclass
class AbsorbingReport:
    ok: bool
    first_entry_t: float | None
    max_norm_after_entry: float
    predicted_entry_t: float
    radius: float


def verify_absorbing(traj: Trajectory, pred: AbsorbingPrediction,
                     radius_slack: float = 1e-6) -> AbsorbingReport:
    """Assert ||psi(t)|| <= K*(1+slack) for all samples past t0 + T."""
    t0 = traj.times[0]
    deadline = t0 + pred.entry_time
    if traj.times[-1] < deadline:
        raise DomainError(
            f"trajectory ends at t={traj.times[-1]:.6g}, before the "
            f"predicted entry time {deadline:.6g}")
    limit = pred.radius * (1 + radius_slack)
    inside = traj.norms <= limit
    first_entry = None
    for i in range(traj.n_samples):
        if inside[i]:
            first_entry = float(traj.times[i])
            break
    after = traj.times >= deadline - 1e-12
    max_after = float(np.max(traj.norms[after])) if np.any(after) else 0.0
    ok = (first_entry is not None and first_entry <= deadline + 1e-12
          and max_after <= limit)
    return AbsorbingReport(ok=ok, first_entry_t=first_entry,
                           max_norm_after_entry=max_after,
                           predicted_entry_t=deadline, radius=pred.radius)


# ---------------------------------------------------------------------------
# tail decay

@dataclass
class TailPrediction:
    xi: float
    entry_time: float  # T(xi, r) = ln(2 r^2/xi)/Gamma, clamped to >= 0
    cutoff: int        # M(xi): driving tail beyond it is <= Gamma^2 xi / 2
    gamma_eff: float


def predict_tail(xi: float, r: float, params: ModelParams,
                 spec: DrivingSpec, n_sites: int) -> TailPrediction:
    if xi <= 0:
        raise DomainError("xi must be positive")
    if spec.g1.profile.kind == "custom" or spec.g2.profile.kind == "custom":
        pass  # custom tables have exact finite tails, also fine
    gamma_eff = _require_positive_damping(params.gamma, spec)
    entry = max(0.0, math.log(2.0 * r * r / xi) / gamma_eff) if r > 0 else 0.0
    target = gamma_eff ** 2 * xi / 2.0
    amp1 = spec.g1.law.amp_bound()
    cutoff = 0
    while True:
        tail = spec.g1.profile.tail_sq(cutoff) * amp1 ** 2
        if tail <= target:
            break
        cutoff += 1
        if cutoff >= n_sites // 2:
            raise TruncationTooSmallError(
                f"driving tail needs cutoff >= {cutoff}, but truncation has "
                f"only {n_sites // 2} sites per side")
    return TailPrediction(xi=xi, entry_time=entry, cutoff=cutoff,
                          gamma_eff=gamma_eff)


@dataclass
class TailReport:
    ok: bool
    max_tail_after_entry: float
    predicted_entry_t: float
    cutoff: int


def verify_tail(traj: Trajectory, pred: TailPrediction) -> TailReport:
    if traj.tails is None or traj.tail_cutoff != pred.cutoff:
        raise DomainError("trajectory lacks a tail series at the predicted cutoff")
    t0 = traj.times[0]
    deadline = t0 + pred.entry_time
    if traj.times[-1] < deadline:
        raise DomainError("trajectory shorter than the predicted tail entry time")
    after = traj.times >= deadline - 1e-12
    max_tail = float(np.max(traj.tails[after])) if np.any(after) else 0.0
    return TailReport(ok=max_tail <= pred.xi, max_tail_after_entry=max_tail,
                      predicted_entry_t=deadline, cutoff=pred.cutoff)


# ---------------------------------------------------------------------------
# two-trajectory contraction

@dataclass
class ContractionReport:
    fitted_rate: float     # slope of ln||w(t)|| (negative when contracting)
    predicted_rate: float  # gamma - a*r^b - sup||g2||
    ball_radius: float
    pass_: bool
    times: np.ndarray = field(repr=False, default=None)
    log_dist: np.ndarray = field(repr=False, default=None)


def contraction_rate(params: ModelParams, spec: DrivingSpec, seeds,
                     horizon: float, n_sites: int = 256,
                     config: IntegratorConfig = IntegratorConfig(),
                     slack: float = 0.05) -> ContractionReport:
    """Integrate two trajectories seeded inside the absorbing ball and fit
    the decay rate of their distance.  Pass iff the fitted decay is at
    least the predicted rate minus ``slack`` (relative)."""
    s0, s1 = seeds
    if s0 == s1:
        raise DomainError("seeds must differ (degenerate fit)")
    gamma_eff = _require_positive_damping(params.gamma, spec)
    radius = math.sqrt(2.0) * spec.g1.sup_norm() / gamma_eff
    a = params.nonlinearity.a if params.nonlinearity else 0.0
    b = params.nonlinearity.b if params.nonlinearity else 1.0
    predicted = params.gamma - a * radius ** b - spec.g2.sup_norm()
    if predicted <= 0:
        raise DomainError(
            f"damping too weak for contraction: gamma - a*K^b - sup||g2|| "
            f"= {predicted:.6g} <= 0")
    r_init = 0.9 * radius if radius > 0 else 0.5
    psi0 = random_state(n_sites, s0, norm=r_init)
    phi0 = random_state(n_sites, s1, norm=r_init)
    tp = integrate(psi0, 0.0, horizon, params, spec, config)
    tq = integrate(phi0, 0.0, horizon, params, spec, config)
    dist = np.array([math.sqrt(norm_sq(tp.values[i] - tq.values[i]))
                     for i in range(tp.n_samples)])
    # skip transients (first 20% of the window) and anything at noise level
    floor = 1e3 * config.rtol * max(1.0, radius)
    start = int(0.2 * dist.size)
    mask = np.zeros(dist.size, dtype=bool)
    mask[start:] = dist[start:] > floor
    if np.count_nonzero(mask) < 3:
        raise DomainError("distance decayed to noise before the fit window")
    t_fit = tp.times[mask]
    ld = np.log(dist[mask])
    slope = _sstats.linregress(t_fit, ld).slope
    return ContractionReport(
        fitted_rate=float(slope), predicted_rate=float(predicted),
        ball_radius=radius, pass_=bool(slope <= -(1 - slack) * predicted),
        times=t_fit, log_dist=ld)


# ---------------------------------------------------------------------------
# continuity in initial data and driving

@dataclass
class ContinuityReport:
    ok: bool
    times: np.ndarray
    gap: np.ndarray
    bound: np.ndarray
    growth_rate: float


def continuity_gap(params: ModelParams, spec: DrivingSpec,
                   perturbed_spec: DrivingSpec, theta: LatticeState,
                   theta_n: LatticeState, horizon: float,
                   config: IntegratorConfig = IntegratorConfig()) -> ContinuityReport:
    """Measured distance of the two evolutions against the Gronwall bound

        gap(t) <= e^{L*(t-t0)} ||theta_n - theta||
                  + (e^{L*(t-t0)} - 1)/L * (dg1 + 2*R*dg2)

    with growth rate L = gamma + sqrt(2)*a*R^b + 4|kappa| + sup||g2|| and R
    the largest norm either trajectory attains."""
    ta = integrate(theta_n, 0.0, horizon, params, perturbed_spec, config)
    tb = integrate(theta, 0.0, horizon, params, spec, config)
    gap = np.array([math.sqrt(norm_sq(ta.values[i] - tb.values[i]))
                    for i in range(ta.n_samples)])
    r_max = float(max(np.max(ta.norms), np.max(tb.norms)))
    a = params.nonlinearity.a if params.nonlinearity else 0.0
    b = params.nonlinearity.b if params.nonlinearity else 1.0
    lips = math.sqrt(2.0) * a * r_max ** b
    rate = params.gamma + lips + 4.0 * abs(params.kappa) + spec.g2.sup_norm()
    dg1, dg2 = _driving_gap(spec, perturbed_spec, ta.values.shape[1],
                            0.0, horizon)
    growth = np.exp(rate * (ta.times - ta.times[0]))
    bound = growth * gap[0] + (growth - 1.0) / rate * (dg1 + 2.0 * r_max * dg2)
    ok = bool(np.all(gap <= bound + 1e-9 * (1 + bound)))
    return ContinuityReport(ok=ok, times=ta.times, gap=gap, bound=bound,
                            growth_rate=rate)


def _driving_gap(spec_a: DrivingSpec, spec_b: DrivingSpec, n_sites: int,
                 t0: float, t1: float, n_scan: int = 2001) -> tuple[float, float]:
    """Upper bound on sup_t ||g_a(t) - g_b(t)|| per component, by a dense
    scan padded with the triangle-inequality bound of both fields."""
    sa = spec_a.sampler(n_sites)
    sb = spec_b.sampler(n_sites)
    zero = np.zeros(n_sites, dtype=np.complex128)
    d1 = d2 = 0.0
    for t in np.linspace(t0, t1, n_scan):
        a1, a2 = sa.sample_values(t, n_sites)
        b1, b2 = sb.sample_values(t, n_sites)
        d1 = max(d1, math.sqrt(norm_sq((a1 if a1 is not None else zero)
                                       - (b1 if b1 is not None else zero))))
        d2 = max(d2, math.sqrt(norm_sq((a2 if a2 is not None else zero)
                                       - (b2 if b2 is not None else zero))))
    # pad the scan by 10% so the result remains an upper bound in practice
    return 1.1 * d1, 1.1 * d2


# ---------------------------------------------------------------------------
# correlation dimension (Grassberger-Procaccia)

@dataclass
class DimensionEstimate:
    slope: float
    ci_low: float
    ci_high: float
    radii: np.ndarray
    correlations: np.ndarray
    fit_radii: np.ndarray
    degenerate: bool = False

    @property
    def ci_width(self) -> float:
        return self.ci_high - self.ci_low


def correlation_dimension(points: np.ndarray, radii=None,
                          theiler_window: int = 10,
                          min_points: int = 100) -> DimensionEstimate:
    """Correlation-integral dimension estimate of a point cloud.

    ``points`` is (n_points, dim) real.  C(eps) is the fraction of pairs
    closer than eps, excluding pairs of temporal index distance up to the
    Theiler window; the dimension is the log-log slope over the central
    scaling region, with a 95% confidence interval from the regression.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < min_points:
        raise DomainError(f"need at least {min_points} points")
    n = pts.shape[0]
    all_dists = _pdist(pts)
    ii, jj = np.triu_indices(n, k=1)
    dists = all_dists[(jj - ii) > theiler_window]
    if dists.size == 0:
        raise DomainError("Theiler window leaves no pairs")
    dmax = float(np.max(dists))
    if dmax <= 1e3 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(pts)))):
        radii_out = np.geomspace(1e-3, 1.0, 8) if radii is None else np.asarray(radii, float)
        ones = np.ones_like(radii_out)
        return DimensionEstimate(slope=0.0, ci_low=0.0, ci_high=0.0,
                                 radii=radii_out, correlations=ones,
                                 fit_radii=radii_out, degenerate=True)
    if radii is None:
        lo = float(np.quantile(dists, 0.002))
        lo = max(lo, 1e-12 * dmax)
        radii = np.geomspace(lo, dmax, 32)
    radii = np.asarray(radii, dtype=float)
    corr = np.array([np.count_nonzero(dists < eps) for eps in radii],
                    dtype=float) / dists.size
    # fit on the scaling region: enough pairs for statistics, but well
    # below saturation; prefer the smallest usable decade (the dimension
    # is a small-radius limit)
    min_count = 50
    usable = (corr * dists.size >= min_count) & (corr < 0.2)
    if np.count_nonzero(usable) < 3:
        usable = (corr * dists.size >= 2) & (corr < 0.5)
    fit_r = radii[usable]
    if fit_r.size >= 3 and fit_r[-1] / fit_r[0] > 10.0:
        low = fit_r <= fit_r[0] * 10.0
        if np.count_nonzero(low) >= 3:
            fit_r = fit_r[low]
    sel = np.isin(radii, fit_r)
    res = _sstats.linregress(np.log(radii[sel]), np.log(corr[sel]))
    half = 1.96 * (res.stderr if res.stderr == res.stderr else 0.0)
    slope = max(0.0, float(res.slope))
    return DimensionEstimate(slope=slope, ci_low=slope - half,
                             ci_high=slope + half, radii=radii,
                             correlations=corr, fit_radii=radii[sel])


def poincare_points(params: ModelParams, spec: DrivingSpec, n_points: int,
                    section_period: float, n_sites: int = 64,
                    seed: int = 0,
                    config: IntegratorConfig | None = None,
                    burn_in: float | None = None) -> np.ndarray:
    """Stroboscopic section of the driven dynamics: states sampled once per
    ``section_period`` after the trajectory has settled into the absorbing
    ball.  Returns (n_points, 2*n_sites) real coordinates."""
    if config is None:
        config = IntegratorConfig(rtol=1e-7, atol=1e-10,
                                  sample_stride=section_period)
    else:
        config = IntegratorConfig(rtol=config.rtol, atol=config.atol,
                                  dt_init=config.dt_init, dt_min=config.dt_min,
                                  dt_max=config.dt_max,
                                  sample_stride=section_period)
    pred = predict_absorbing(params, spec, r=1.0)
    if burn_in is None:
        burn_in = pred.entry_time + 20.0 / pred.gamma_eff
    psi0 = random_state(n_sites, seed, norm=min(1.0, max(pred.radius, 0.1)))
    t1 = burn_in + n_points * section_period
    traj = integrate(psi0, 0.0, t1, params, spec, config)
    keep = traj.times >= burn_in - 1e-9
    vals = traj.values[keep][-n_points:]
    return vals.view(np.float64).reshape(vals.shape[0], -1)
