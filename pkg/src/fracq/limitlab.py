"""Monte Carlo verification of scaling limits.

Each experiment simulates an observable from the event-level construction,
samples the claimed limit law by an independent route, and reduces the
comparison to one binding statistic with a pass direction.  Limit processes
built from inverse stable clocks are sampled either exactly at a single time
(via the stable subordinator identity) or pathwise on first-passage grids
whose resolution bounds the reflection bias.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DomainError, ParameterError
from .gof import chi_square_counts, ecdf, ks_two_sample
from .processes import (
    ClassProbabilities,
    _covering_subordinator,
    renewal_counts,
    timechange_counts,
)
from .queueing import LocationSampler, reflected_path_stats, simulate_continuum_queue
from .samplers import RngStream, sample_inverse_subordinator_at, sample_mittag_leffler
from .special import FppParams, fpp_pmf_table, inverse_subordinator_moments

DEFAULT_P_MIN = 1e-3
DEFAULT_Z_MAX = 4.0
DEFAULT_RESOLUTION = 1e-3


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):  # before int: bool subclasses int
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    return obj


@dataclass(frozen=True)
class ExperimentReport:
    """Outcome of one verification experiment.

    The verdict is determined by the binding statistic alone: pass iff
    statistic > threshold (direction '>') or statistic < threshold ('<').
    Structural subchecks (monotonicity, z-windows) force the statistic to the
    failing side when violated; the raw numbers stay in `details`.
    """

    name: str
    parameters: dict
    statistic: float
    threshold: float
    direction: str
    replicas: int
    seed: int
    details: dict = field(default_factory=dict)
    artifacts: tuple[str, ...] = ()

    @property
    def verdict(self) -> bool:
        if self.direction == ">":
            return bool(self.statistic > self.threshold)
        return bool(self.statistic < self.threshold)

    def summary_line(self) -> str:
        mark = "PASS" if self.verdict else "FAIL"
        return (
            f"[{mark}] {self.name}: statistic={self.statistic:.6g} "
            f"{self.direction} threshold={self.threshold:.6g} "
            f"(replicas={self.replicas}, seed={self.seed})"
        )

    def to_dict(self) -> dict:
        return _jsonify(
            {
                "name": self.name,
                "parameters": self.parameters,
                "statistic": self.statistic,
                "threshold": self.threshold,
                "direction": self.direction,
                "verdict": self.verdict,
                "replicas": self.replicas,
                "seed": self.seed,
                "details": self.details,
                "artifacts": list(self.artifacts),
            }
        )

    def write_json(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _finish(report: ExperimentReport, out_dir: str | None, verbose: bool) -> ExperimentReport:
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        report.write_json(os.path.join(out_dir, f"{report.name}.json"))
    if verbose:
        print(report.summary_line())
    return report


def _ecdf_artifact(out_dir: str | None, name: str, sample) -> list[str]:
    if out_dir is None:
        return []
    os.makedirs(out_dir, exist_ok=True)
    xs, ps = ecdf(sample)
    path = os.path.join(out_dir, f"{name}.csv")
    with open(path, "w") as fh:
        fh.write("x,F\n")
        for x, p in zip(xs, ps):
            fh.write(f"{x:.17g},{p:.17g}\n")
    return [path]


def map_replicas(fn, n: int, jobs: int = 1) -> list:
    """Evaluate fn(r) for r in range(n), optionally on a thread pool.

    Deterministic regardless of jobs as long as fn derives all randomness
    from a per-replica substream.
    """
    if jobs <= 1:
        return [fn(r) for r in range(n)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, range(n)))


# ---------------------------------------------------------------------------
# limit-law sampling

def _passages(theta: float, step: float, horizon: float, rng: RngStream) -> np.ndarray:
    """First-passage times of the level grid {0, step, 2 step, ...}, starting
    at 0 and extended beyond the horizon."""
    return _covering_subordinator(theta, step, horizon, rng).values


def _clock_difference_path(
    theta_a: float,
    coef_a: float,
    theta_b: float,
    coef_b: float,
    t: float,
    resolution: float,
    rng: RngStream,
) -> np.ndarray:
    """coef_a Y_a(s) - coef_b Y_b(s) on the union of passage grids up to t."""
    step_a = resolution * t**theta_a
    la = _passages(theta_a, step_a, t, rng.substream(0))
    if coef_b != 0.0:
        step_b = resolution * t**theta_b
        lb = _passages(theta_b, step_b, t, rng.substream(1))
        ev = np.union1d(la[la <= t], lb[lb <= t])
    else:
        ev = la[la <= t]
    if ev.size == 0 or ev[-1] < t:
        ev = np.append(ev, t)
    ka = np.searchsorted(la, ev, side="right") - 1
    path = coef_a * step_a * ka
    if coef_b != 0.0:
        kb = np.searchsorted(lb, ev, side="right") - 1
        path = path - coef_b * step_b * kb
    return path


def _brownian_difference_path(
    theta_a: float,
    var_a: float,
    theta_b: float,
    var_b: float,
    t: float,
    resolution: float,
    rng: RngStream,
) -> np.ndarray:
    """sqrt(var_a) B(Y_a(s)) - sqrt(var_b) B~(Y_b(s)) on the union grid."""
    step_a = resolution * t**theta_a
    la = _passages(theta_a, step_a, t, rng.substream(0))
    ga = rng.substream(2).generator()
    ba = np.concatenate([[0.0], np.cumsum(ga.normal(0.0, math.sqrt(step_a), la.size - 1))])
    if var_b != 0.0:
        step_b = resolution * t**theta_b
        lb = _passages(theta_b, step_b, t, rng.substream(1))
        gb = rng.substream(3).generator()
        bb = np.concatenate([[0.0], np.cumsum(gb.normal(0.0, math.sqrt(step_b), lb.size - 1))])
        ev = np.union1d(la[la <= t], lb[lb <= t])
    else:
        ev = la[la <= t]
    if ev.size == 0 or ev[-1] < t:
        ev = np.append(ev, t)
    ka = np.searchsorted(la, ev, side="right") - 1
    path = math.sqrt(var_a) * ba[ka]
    if var_b != 0.0:
        kb = np.searchsorted(lb, ev, side="right") - 1
        path = path - math.sqrt(var_b) * bb[kb]
    return path


def _reflected_end(path: np.ndarray) -> float:
    return float(path[-1] - min(0.0, path.min()))


_KINDS = (
    "inverse_clock",
    "reflected_difference",
    "brownian_time_changed",
    "reflected_brownian_difference",
)


@dataclass(frozen=True)
class LimitLawSampler:
    """Single-time sampler for the limit laws appearing in the scaling results.

    coef_a/coef_b are linear scales for the clock kinds and variance scales
    for the Brownian kinds.  Where an exact single-time representation exists
    (monotone paths, or a one-sided reflection of a time-changed Brownian
    motion) it is used; two-sided reflections fall back to passage-grid paths
    at the given resolution.
    """

    kind: str
    t: float
    theta_a: float
    coef_a: float
    theta_b: float = 1.0
    coef_b: float = 0.0
    resolution: float = DEFAULT_RESOLUTION

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown limit-law kind {self.kind!r}")
        if self.t <= 0:
            raise ParameterError("t must be positive")
        for th in (self.theta_a, self.theta_b):
            if not (0.0 < th <= 1.0):
                raise ParameterError(f"clock index must be in (0, 1], got {th}")
        if self.coef_a < 0 or self.coef_b < 0:
            raise ParameterError("coefficients must be nonnegative")
        if self.resolution <= 0:
            raise ParameterError("resolution must be positive")

    @classmethod
    def inverse_clock(cls, theta: float, scale: float, t: float) -> "LimitLawSampler":
        return cls(kind="inverse_clock", t=t, theta_a=theta, coef_a=scale)

    @classmethod
    def reflected_difference(
        cls,
        theta_a: float,
        scale_a: float,
        theta_b: float,
        scale_b: float,
        t: float,
        resolution: float = DEFAULT_RESOLUTION,
    ) -> "LimitLawSampler":
        return cls(
            kind="reflected_difference",
            t=t,
            theta_a=theta_a,
            coef_a=scale_a,
            theta_b=theta_b,
            coef_b=scale_b,
            resolution=resolution,
        )

    @classmethod
    def brownian_time_changed(cls, theta: float, variance_scale: float, t: float) -> "LimitLawSampler":
        return cls(kind="brownian_time_changed", t=t, theta_a=theta, coef_a=variance_scale)

    @classmethod
    def reflected_brownian_difference(
        cls,
        theta_a: float,
        variance_a: float,
        theta_b: float = 1.0,
        variance_b: float = 0.0,
        t: float = 1.0,
        resolution: float = DEFAULT_RESOLUTION,
    ) -> "LimitLawSampler":
        return cls(
            kind="reflected_brownian_difference",
            t=t,
            theta_a=theta_a,
            coef_a=variance_a,
            theta_b=theta_b,
            coef_b=variance_b,
            resolution=resolution,
        )

    def sample(self, rng: RngStream, size: int) -> np.ndarray:
        if size < 0:
            raise ParameterError("size must be nonnegative")
        if self.kind == "inverse_clock":
            y = sample_inverse_subordinator_at(self.theta_a, self.t, rng, size=size)
            return self.coef_a * y
        if self.kind == "brownian_time_changed":
            y = sample_inverse_subordinator_at(self.theta_a, self.t, rng.substream(0), size=size)
            z = rng.substream(1).generator().standard_normal(size)
            return np.sqrt(self.coef_a * y) * z
        if self.kind == "reflected_difference":
            if self.coef_b == 0.0:
                # reflection of a nondecreasing path started at 0 is the path
                y = sample_inverse_subordinator_at(self.theta_a, self.t, rng, size=size)
                return self.coef_a * y
            return np.array(
                [
                    _reflected_end(
                        _clock_difference_path(
                            self.theta_a,
                            self.coef_a,
                            self.theta_b,
                            self.coef_b,
                            self.t,
                            self.resolution,
                            rng.substream(r),
                        )
                    )
                    for r in range(size)
                ]
            )
        # reflected_brownian_difference
        if self.coef_b == 0.0:
            # continuity of the clock gives Phi(B o Y)(t) =d |B(Y(t))|
            y = sample_inverse_subordinator_at(self.theta_a, self.t, rng.substream(0), size=size)
            z = rng.substream(1).generator().standard_normal(size)
            return np.abs(np.sqrt(self.coef_a * y) * z)
        return np.array(
            [
                _reflected_end(
                    _brownian_difference_path(
                        self.theta_a,
                        self.coef_a,
                        self.theta_b,
                        self.coef_b,
                        self.t,
                        self.resolution,
                        rng.substream(r),
                    )
                )
                for r in range(size)
            ]
        )

    def closed_form_quantile(self, q) -> np.ndarray | float:
        """Quantile function when every active clock index equals 1."""
        q_arr = np.asarray(q, dtype=float)
        if np.any((q_arr <= 0) | (q_arr >= 1)):
            raise ParameterError("quantile levels must lie in (0, 1)")
        active_b = self.coef_b != 0.0
        if self.theta_a != 1.0 or (active_b and self.theta_b != 1.0):
            raise DomainError("closed form requires all clock indices equal to 1")
        if self.kind == "inverse_clock":
            out = np.full_like(q_arr, self.coef_a * self.t)
        elif self.kind == "reflected_difference":
            out = np.full_like(q_arr, max(self.coef_a - self.coef_b, 0.0) * self.t)
        elif self.kind == "brownian_time_changed":
            out = stats.norm.ppf(q_arr, scale=math.sqrt(self.coef_a * self.t))
        else:
            scale = math.sqrt((self.coef_a + self.coef_b) * self.t)
            out = scale * stats.norm.ppf((1.0 + q_arr) / 2.0)
        return float(out) if np.isscalar(q) else out


# ---------------------------------------------------------------------------
# event-level observables

def _renewal_event_times(
    theta: float, lam: float, horizon: float, rng: RngStream
) -> np.ndarray:
    """Event times of one renewal-construction path on (0, horizon]."""
    p = FppParams(theta=theta, lam=lam)
    mean_y, var_y = inverse_subordinator_moments(theta, horizon)
    rate = lam**theta
    block = max(16, int(rate * mean_y + 8.0 * math.sqrt(rate**2 * var_y + rate * mean_y + 1.0)))
    chunks: list[np.ndarray] = []
    total = 0.0
    while True:
        part = total + np.cumsum(sample_mittag_leffler(p, rng, size=block))
        chunks.append(part)
        total = part[-1]
        if total > horizon:
            break
    times = np.concatenate(chunks) if len(chunks) > 1 else chunks[0]
    return times[times <= horizon]


def _scaled_queue_end(
    alpha: float,
    beta: float,
    lam: float,
    mu: float,
    head_prob: float,
    horizon: float,
    rng: RngStream,
) -> tuple[int, int, int]:
    """(Q_{<=i}(T), emptyings, running max) for one replica of the queue fed by
    class-(<=i) arrivals (kept with probability head_prob) and all services."""
    arr = _renewal_event_times(alpha, lam, horizon, rng.substream(0))
    if head_prob < 1.0:
        keep = rng.substream(1).generator().random(arr.size) < head_prob
        arr = arr[keep]
    dep = _renewal_event_times(beta, mu, horizon, rng.substream(2))
    return reflected_path_stats(arr, dep)


def _compensated_queue_end(
    alpha: float,
    beta: float,
    rate_a: float,
    rate_b: float,
    horizon: float,
    resolution: float,
    rng: RngStream,
) -> float:
    """Reflected end value of the compensated netflow

        [A(s) - rate_a Y_a(s)] - [C(s) - rate_b Y_b(s)],  s <= horizon,

    with A, C Poisson streams run in the clocks' internal times.  Evaluated on
    the union of the two passage grids, where the path is exactly piecewise
    constant in the discretized model.
    """
    step_a = resolution * horizon**alpha
    step_b = resolution * horizon**beta
    la = _passages(alpha, step_a, horizon, rng.substream(0))
    lb = _passages(beta, step_b, horizon, rng.substream(1))
    ga = rng.substream(2).generator()
    gb = rng.substream(3).generator()
    y_top_a = step_a * (la.size - 1)
    y_top_b = step_b * (lb.size - 1)
    arr_pos = np.sort(ga.random(ga.poisson(rate_a * y_top_a)) * y_top_a)
    dep_pos = np.sort(gb.random(gb.poisson(rate_b * y_top_b)) * y_top_b)
    ev = np.union1d(la[la <= horizon], lb[lb <= horizon])
    if ev.size == 0 or ev[-1] < horizon:
        ev = np.append(ev, horizon)
    ya = step_a * (np.searchsorted(la, ev, side="right") - 1)
    yb = step_b * (np.searchsorted(lb, ev, side="right") - 1)
    a_counts = np.searchsorted(arr_pos, ya, side="right")
    c_counts = np.searchsorted(dep_pos, yb, side="right")
    path = (a_counts - rate_a * ya) - (c_counts - rate_b * yb)
    return _reflected_end(path)


# ---------------------------------------------------------------------------
# verification experiments

def verify_pmf(
    theta: float,
    lam: float,
    t: float,
    replicas: int,
    rng: RngStream,
    p_min: float = DEFAULT_P_MIN,
    out_dir: str | None = None,
    verbose: bool = True,
) -> ExperimentReport:
    """Both process constructions against the analytic pmf, and against
    each other."""
    params = FppParams(theta=theta, lam=lam)
    ren = renewal_counts(params, t, replicas, rng.substream(0))
    tch = timechange_counts(params, t, replicas, rng.substream(1))
    pmf = fpp_pmf_table(params, t, cum_tol=1e-10)
    chi_ren = chi_square_counts(ren, pmf)
    chi_tch = chi_square_counts(tch, pmf)
    _, p_cross = ks_two_sample(ren, tch)
    details = {
        "chi2_renewal": {"stat": chi_ren[0], "p": chi_ren[1], "dof": chi_ren[2]},
        "chi2_timechange": {"stat": chi_tch[0], "p": chi_tch[1], "dof": chi_tch[2]},
        "ks_cross_p": p_cross,
        "mean_renewal": float(ren.mean()),
        "mean_timechange": float(tch.mean()),
    }
    artifacts = _ecdf_artifact(out_dir, "pmf_renewal_ecdf", ren)
    artifacts += _ecdf_artifact(out_dir, "pmf_timechange_ecdf", tch)
    report = ExperimentReport(
        name="pmf-agreement",
        parameters={"theta": theta, "lam": lam, "t": t},
        statistic=float(min(chi_ren[1], chi_tch[1], p_cross)),
        threshold=p_min,
        direction=">",
        replicas=replicas,
        seed=rng.seed,
        details=details,
        artifacts=tuple(artifacts),
    )
    return _finish(report, out_dir, verbose)


def verify_covariance(
    alpha: float,
    lam: float,
    probs: ClassProbabilities,
    t: float,
    replicas: int,
    rng: RngStream,
    z_max: float = DEFAULT_Z_MAX,
    out_dir: str | None = None,
    verbose: bool = True,
) -> ExperimentReport:
    """Empirical second moments of thinned counts against the analytic
    covariance p_i p_j lam^(2 alpha) Var Y_alpha(t) (and the matching
    per-class variances)."""
    total = renewal_counts(FppParams(alpha, lam), t, replicas, rng.substream(0))
    split = rng.substream(1).generator().multinomial(total, probs.p).astype(float)
    mean_y, var_y = inverse_subordinator_moments(alpha, t)
    rate = lam**alpha
    centered = split - split.mean(axis=0)
    k = probs.n_classes
    z_scores = {}
    worst = 0.0
    for i in range(k):
        for j in range(i, k):
            prod = centered[:, i] * centered[:, j]
            if i == j:
                target = probs.p[i] * rate * mean_y + probs.p[i] ** 2 * rate**2 * var_y
            else:
                target = probs.p[i] * probs.p[j] * rate**2 * var_y
            se = prod.std(ddof=1) / math.sqrt(replicas)
            z = (prod.mean() - target) / se
            z_scores[f"z_{i + 1}{j + 1}"] = float(z)
            z_scores[f"target_{i + 1}{j + 1}"] = float(target)
            z_scores[f"empirical_{i + 1}{j + 1}"] = float(prod.mean())
            worst = max(worst, abs(z))
    report = ExperimentReport(
        name="thinning-covariance",
        parameters={"alpha": alpha, "lam": lam, "p": list(probs.p), "t": t},
        statistic=float(worst),
        threshold=z_max,
        direction="<",
        replicas=replicas,
        seed=rng.seed,
        details=z_scores,
    )
    return _finish(report, out_dir, verbose)


def verify_lln(
    theta: float,
    lam: float,
    probs: ClassProbabilities,
    t: float,
    u: float,
    replicas: int,
    rng: RngStream,
    p_min: float = DEFAULT_P_MIN,
    concentration_tol: float = 0.05,
    out_dir: str | None = None,
    verbose: bool = True,
) -> ExperimentReport:
    """Scaled class counts N_i(ut)/u^theta against the law lam^theta p_i Y(t);
    at theta = 1 the limit is deterministic and the check is an RMS window."""
    total = renewal_counts(FppParams(theta, lam), u * t, replicas, rng.substream(0))
    split = rng.substream(1).generator().multinomial(total, probs.p).astype(float)
    scaled = split / u**theta
    rate = lam**theta
    artifacts: list[str] = []
    if theta == 1.0:
        rms = np.sqrt(((scaled - rate * probs.p * t) ** 2).mean(axis=0))
        report = ExperimentReport(
            name="lln",
            parameters={"theta": theta, "lam": lam, "p": list(probs.p), "t": t, "u": u},
            statistic=float(rms.max()),
            threshold=concentration_tol,
            direction="<",
            replicas=replicas,
            seed=rng.seed,
            details={"rms_per_class": [float(v) for v in rms]},
        )
        return _finish(report, out_dir, verbose)
    y = sample_inverse_subordinator_at(theta, t, rng.substream(2), size=replicas)
    details: dict = {}
    p_vals = []
    for i in range(probs.n_classes):
        oracle = rate * probs.p[i] * y
        d, p = ks_two_sample(scaled[:, i], oracle)
        p_vals.append(p)
        details[f"ks_class_{i + 1}"] = {"D": d, "p": p}
        artifacts += _ecdf_artifact(out_dir, f"lln_class{i + 1}_observable_ecdf", scaled[:, i])
        artifacts += _ecdf_artifact(out_dir, f"lln_class{i + 1}_oracle_ecdf", oracle)
    if probs.n_classes >= 2:
        details["corr_12"] = float(np.corrcoef(scaled[:, 0], scaled[:, 1])[0, 1])
    report = ExperimentReport(
        name="lln",
        parameters={"theta": theta, "lam": lam, "p": list(probs.p), "t": t, "u": u},
        statistic=float(min(p_vals)),
        threshold=p_min,
        direction=">",
        replicas=replicas,
        seed=rng.seed,
        details=details,
        artifacts=tuple(artifacts),
    )
    return _finish(report, out_dir, verbose)


def verify_fclt(
    theta: float,
    lam: float,
    probs: ClassProbabilities,
    t: float,
    u: float,
    replicas: int,
    rng: RngStream,
    p_min: float = DEFAULT_P_MIN,
    z_max: float = DEFAULT_Z_MAX,
    out_dir: str | None = None,
    verbose: bool = True,
) -> ExperimentReport:
    """Compensated class counts (N_i(ut) - p_i lam^theta Y(ut)) / u^(theta/2)
    against independent Brownian motions run on an independent clock.

    The observable uses the exact single-time law of the pair (Y(ut), N(ut)):
    counts are conditionally Poisson given the clock.  At theta = 1 the
    compensator is deterministic, so the observable lives on a lattice of
    width u^(-1/2); the oracle is projected onto that lattice before the KS
    comparison to keep the test well specified.
    """
    rate = lam**theta
    y_big = sample_inverse_subordinator_at(theta, u * t, rng.substream(0), size=replicas)
    g = rng.substream(1).generator()
    counts = g.poisson(probs.p[None, :] * rate * y_big[:, None])
    m = (counts - probs.p[None, :] * rate * y_big[:, None]) / u ** (theta / 2.0)

    y_lim = sample_inverse_subordinator_at(theta, t, rng.substream(2), size=replicas)
    z = rng.substream(3).generator().standard_normal((replicas, probs.n_classes))
    oracle = np.sqrt(probs.p[None, :] * rate * y_lim[:, None]) * z

    mean_y, var_y = inverse_subordinator_moments(theta, t)
    details: dict = {}
    artifacts: list[str] = []
    p_vals = []
    z_ok = True
    for i in range(probs.n_classes):
        obs_i = m[:, i]
        ora_i = oracle[:, i]
        if theta == 1.0:
            # project oracle draws onto the observable's count lattice
            center = probs.p[i] * rate * u * t
            ora_i = (np.round(ora_i * math.sqrt(u) + center) - center) / math.sqrt(u)
        d, p = ks_two_sample(obs_i, ora_i)
        p_vals.append(p)
        target_var = probs.p[i] * rate * mean_y
        sq = obs_i**2
        z_var = (sq.mean() - target_var) / (sq.std(ddof=1) / math.sqrt(replicas))
        z_mean = obs_i.mean() / (obs_i.std(ddof=1) / math.sqrt(replicas))
        z_ok = z_ok and abs(z_var) <= z_max and abs(z_mean) <= z_max
        details[f"class_{i + 1}"] = {
            "ks_D": d,
            "ks_p": p,
            "var_target": float(target_var),
            "var_empirical": float(sq.mean()),
            "z_var": float(z_var),
            "z_mean": float(z_mean),
        }
        artifacts += _ecdf_artifact(out_dir, f"fclt_class{i + 1}_observable_ecdf", obs_i)
        artifacts += _ecdf_artifact(out_dir, f"fclt_class{i + 1}_oracle_ecdf", ora_i)
    if probs.n_classes >= 2:
        prod = m[:, 0] * m[:, 1]
        z_corr = prod.mean() / (prod.std(ddof=1) / math.sqrt(replicas))
        details["z_cross_class"] = float(z_corr)
        z_ok = z_ok and abs(z_corr) <= z_max
    statistic = float(min(p_vals)) if z_ok else -1.0
    if not z_ok:
        details["z_window_violation"] = True
    report = ExperimentReport(
        name="fclt",
        parameters={"theta": theta, "lam": lam, "p": list(probs.p), "t": t, "u": u},
        statistic=statistic,
        threshold=p_min,
        direction=">",
        replicas=replicas,
        seed=rng.seed,
        details=details,
        artifacts=tuple(artifacts),
    )
    return _finish(report, out_dir, verbose)


def _regime(alpha: float, beta: float) -> str:
    if alpha > beta:
        return "arrivals-dominate"
    if beta > alpha:
        return "services-dominate"
    return "balanced"


def verify_queue_scaling(
    alpha: float,
    beta: float,
    lam: float,
    mu: float,
    probs: ClassProbabilities,
    i: int,
    t: float,
    u: float,
    replicas: int,
    rng: RngStream,
    p_min: float = DEFAULT_P_MIN,
    degenerate_tol: float = 0.01,
    resolution: float = DEFAULT_RESOLUTION,
    out_dir: str | None = None,
    jobs: int = 1,
    verbose: bool = True,
) -> ExperimentReport:
    """Scaled aggregate queue Q_{<=i}(ut) / u^gamma against its limit law.

    gamma = max(alpha, beta).  Regimes: arrivals dominate (limit
    lam^alpha P_i Y_alpha(t)), services dominate (limit 0, mean window),
    balanced (limit Phi(lam^alpha P_i Y - mu^beta Y~)(t), KS); the balanced
    regime also checks the per-class difference Q_i when i >= 2.
    """
    gamma = max(alpha, beta)
    head = probs.head_sum(i)
    horizon = u * t
    regime = _regime(alpha, beta)

    def one(r: int) -> tuple[int, int]:
        sub = rng.substream(4).substream(r)
        q_head = _scaled_queue_end(alpha, beta, lam, mu, head, horizon, sub)[0]
        if regime == "balanced" and i >= 2:
            # same arrivals thinned one class shorter, fresh services kept
            # identical by reusing the substream layout
            arr = _renewal_event_times(alpha, lam, horizon, sub.substream(0))
            gloc = sub.substream(1).generator()
            unif = gloc.random(arr.size)
            arr_head = arr[unif < head]
            arr_prev = arr[unif < probs.head_sum(i - 1)]
            dep = _renewal_event_times(beta, mu, horizon, sub.substream(2))
            q_hi = reflected_path_stats(arr_head, dep)[0]
            q_lo = reflected_path_stats(arr_prev, dep)[0]
            return q_hi, q_hi - q_lo
        return q_head, 0

    # the replica closure draws from substream(4); keep 0-3 for oracles
    pairs = map_replicas(one, replicas, jobs)
    q_end = np.array([pr[0] for pr in pairs], dtype=float)
    observable = q_end / u**gamma
    details: dict = {"regime": regime}
    artifacts = _ecdf_artifact(out_dir, "queue_scaling_observable_ecdf", observable)

    if regime == "services-dominate":
        statistic = float(observable.mean())
        threshold, direction = degenerate_tol, "<"
        details["mean_scaled"] = statistic
    elif regime == "arrivals-dominate":
        oracle = LimitLawSampler.inverse_clock(alpha, lam**alpha * head, t).sample(
            rng.substream(1), replicas
        )
        d, p = ks_two_sample(observable, oracle)
        details["ks"] = {"D": d, "p": p}
        artifacts += _ecdf_artifact(out_dir, "queue_scaling_oracle_ecdf", oracle)
        statistic, threshold, direction = float(p), p_min, ">"
    else:
        oracle_sampler = LimitLawSampler.reflected_difference(
            alpha, lam**alpha * head, beta, mu**beta, t, resolution
        )
        oracle = oracle_sampler.sample(rng.substream(1), replicas)
        d, p = ks_two_sample(observable, oracle)
        details["ks"] = {"D": d, "p": p}
        artifacts += _ecdf_artifact(out_dir, "queue_scaling_oracle_ecdf", oracle)
        p_all = [p]
        if i >= 2:
            per_class = np.array([pr[1] for pr in pairs], dtype=float) / u**gamma

            # per-class oracle: difference of the two reflections driven by
            # one shared pair of clock paths
            def one_per_class(r: int) -> float:
                sub = rng.substream(2).substream(r)
                step_a = resolution * t**alpha
                step_b = resolution * t**beta
                la = _passages(alpha, step_a, t, sub.substream(0))
                lb = _passages(beta, step_b, t, sub.substream(1))
                ev = np.union1d(la[la <= t], lb[lb <= t])
                if ev.size == 0 or ev[-1] < t:
                    ev = np.append(ev, t)
                ya = step_a * (np.searchsorted(la, ev, side="right") - 1)
                yb = step_b * (np.searchsorted(lb, ev, side="right") - 1)
                hi = lam**alpha * head * ya - mu**beta * yb
                lo = lam**alpha * probs.head_sum(i - 1) * ya - mu**beta * yb
                return _reflected_end(hi) - _reflected_end(lo)

            oracle_pc = np.array(map_replicas(one_per_class, replicas, jobs))
            d_pc, p_pc = ks_two_sample(per_class, oracle_pc)
            details["ks_per_class"] = {"D": d_pc, "p": p_pc, "class": i}
            artifacts += _ecdf_artifact(out_dir, "queue_scaling_per_class_ecdf", per_class)
            p_all.append(p_pc)
        statistic, threshold, direction = float(min(p_all)), p_min, ">"

    report = ExperimentReport(
        name="queue-scaling",
        parameters={
            "alpha": alpha,
            "beta": beta,
            "lam": lam,
            "mu": mu,
            "p": list(probs.p),
            "i": i,
            "t": t,
            "u": u,
        },
        statistic=statistic,
        threshold=threshold,
        direction=direction,
        replicas=replicas,
        seed=rng.seed,
        details=details,
        artifacts=tuple(artifacts),
    )
    return _finish(report, out_dir, verbose)


def verify_centered_queue_clt(
    alpha: float,
    beta: float,
    lam: float,
    mu: float,
    probs: ClassProbabilities,
    i: int,
    t: float,
    u: float,
    replicas: int,
    rng: RngStream,
    p_min: float = DEFAULT_P_MIN,
    resolution: float = DEFAULT_RESOLUTION,
    out_dir: str | None = None,
    jobs: int = 1,
    verbose: bool = True,
) -> ExperimentReport:
    """Reflected compensated netflow, scaled by u^(gamma/2), against the
    reflected difference of Brownian motions on independent inverse clocks."""
    gamma = max(alpha, beta)
    head = probs.head_sum(i)
    horizon = u * t
    rate_a = lam**alpha * head
    rate_b = mu**beta

    def one(r: int) -> float:
        return _compensated_queue_end(
            alpha, beta, rate_a, rate_b, horizon, resolution, rng.substream(2).substream(r)
        )

    observable = np.array(map_replicas(one, replicas, jobs)) / u ** (gamma / 2.0)

    if alpha > beta:
        oracle_sampler = LimitLawSampler.reflected_brownian_difference(
            alpha, rate_a, t=t, resolution=resolution
        )
    elif beta > alpha:
        oracle_sampler = LimitLawSampler.reflected_brownian_difference(
            beta, rate_b, t=t, resolution=resolution
        )
    else:
        oracle_sampler = LimitLawSampler.reflected_brownian_difference(
            alpha, rate_a, beta, rate_b, t=t, resolution=resolution
        )
    oracle = oracle_sampler.sample(rng.substream(1), replicas)
    d, p = ks_two_sample(observable, oracle)
    artifacts = _ecdf_artifact(out_dir, "centered_clt_observable_ecdf", observable)
    artifacts += _ecdf_artifact(out_dir, "centered_clt_oracle_ecdf", oracle)
    report = ExperimentReport(
        name="centered-queue-clt",
        parameters={
            "alpha": alpha,
            "beta": beta,
            "lam": lam,
            "mu": mu,
            "p": list(probs.p),
            "i": i,
            "t": t,
            "u": u,
        },
        statistic=float(p),
        threshold=p_min,
        direction=">",
        replicas=replicas,
        seed=rng.seed,
        details={
            "ks": {"D": d, "p": p},
            "mean_observable": float(observable.mean()),
            "mean_oracle": float(oracle.mean()),
        },
        artifacts=tuple(artifacts),
    )
    return _finish(report, out_dir, verbose)


def verify_recurrence(
    alpha: float,
    lam: float,
    mu: float,
    probs: ClassProbabilities,
    horizons,
    replicas: int,
    rng: RngStream,
    out_dir: str | None = None,
    jobs: int = 1,
    verbose: bool = True,
) -> ExperimentReport:
    """Median emptying count and median running maximum of the total queue
    must both grow strictly along increasing horizons.

    Critical regime only: arrivals and services share the index alpha.  The
    thinning probabilities are recorded but the statistics live on the total
    queue, whose law they do not affect.
    """
    horizons = [float(h) for h in horizons]
    if sorted(horizons) != horizons or len(horizons) < 3:
        raise ParameterError("need at least three increasing horizons")
    med_empty: list[float] = []
    med_max: list[float] = []
    for hi, horizon in enumerate(horizons):

        def one(r: int, horizon=horizon, hi=hi) -> tuple[int, int]:
            sub = rng.substream(hi).substream(r)
            _, emptyings, running_max = _scaled_queue_end(
                alpha, alpha, lam, mu, 1.0, horizon, sub
            )
            return emptyings, running_max

        stats_pairs = map_replicas(one, replicas, jobs)
        med_empty.append(float(np.median([s[0] for s in stats_pairs])))
        med_max.append(float(np.median([s[1] for s in stats_pairs])))
    margins = [b - a for a, b in zip(med_empty, med_empty[1:])]
    margins += [b - a for a, b in zip(med_max, med_max[1:])]
    report = ExperimentReport(
        name="recurrence",
        parameters={
            "alpha": alpha,
            "lam": lam,
            "mu": mu,
            "p": list(probs.p),
            "horizons": horizons,
        },
        statistic=float(min(margins)),
        threshold=0.0,
        direction=">",
        replicas=replicas,
        seed=rng.seed,
        details={"median_emptyings": med_empty, "median_running_max": med_max},
    )
    return _finish(report, out_dir, verbose)


def verify_oscillation(
    theta: float,
    c: float,
    horizons,
    replicas: int,
    rng: RngStream,
    resolution: float = DEFAULT_RESOLUTION,
    out_dir: str | None = None,
    jobs: int = 1,
    verbose: bool = True,
) -> ExperimentReport:
    """The difference Y(s) - c Y~(s) of independent inverse clocks must
    oscillate without bound: median running min strictly decreases and median
    running max strictly increases along growing horizons."""
    if not (0.0 < theta < 1.0):
        raise ParameterError("oscillation requires theta in (0, 1); at 1 the difference is degenerate")
    if c <= 0:
        raise ParameterError("c must be positive")
    horizons = [float(h) for h in horizons]
    if sorted(horizons) != horizons or len(horizons) < 2:
        raise ParameterError("need at least two increasing horizons")
    med_min: list[float] = []
    med_max: list[float] = []
    for hi, horizon in enumerate(horizons):

        def one(r: int, horizon=horizon, hi=hi) -> tuple[float, float]:
            path = _clock_difference_path(
                theta, 1.0, theta, c, horizon, resolution, rng.substream(hi).substream(r)
            )
            return float(path.min()), float(path.max())

        pairs = map_replicas(one, replicas, jobs)
        med_min.append(float(np.median([p[0] for p in pairs])))
        med_max.append(float(np.median([p[1] for p in pairs])))
    margins = [a - b for a, b in zip(med_min, med_min[1:])]
    margins += [b - a for a, b in zip(med_max, med_max[1:])]
    report = ExperimentReport(
        name="oscillation",
        parameters={"theta": theta, "c": c, "horizons": horizons},
        statistic=float(min(margins)),
        threshold=0.0,
        direction=">",
        replicas=replicas,
        seed=rng.seed,
        details={"median_running_min": med_min, "median_running_max": med_max},
    )
    return _finish(report, out_dir, verbose)


def verify_best_ask(
    alpha: float,
    beta: float,
    lam: float,
    mu: float,
    locations: LocationSampler,
    t_values,
    replicas: int,
    rng: RngStream,
    eps_values=(0.1, 0.05),
    out_dir: str | None = None,
    jobs: int = 1,
    verbose: bool = True,
) -> ExperimentReport:
    """Best ask converging to the support infimum: exceedance probabilities
    P(best ask > a + eps) must be nonincreasing in t and small at the largest
    horizon, while the queue near the infimum outgrows t^(beta/2)."""
    from .processes import EventTimeline

    if alpha <= beta:
        raise ParameterError("best-ask convergence needs arrivals to dominate: alpha > beta")
    t_values = [float(tv) for tv in t_values]
    if sorted(t_values) != t_values or len(t_values) < 2:
        raise ParameterError("need at least two increasing horizons")
    a = locations.support_infimum()
    eps_main = max(eps_values)
    exceed = {eps: [] for eps in eps_values}
    mass_freq = {eps: [] for eps in eps_values}
    for ti, horizon in enumerate(t_values):

        def one(r: int, horizon=horizon, ti=ti) -> tuple[float, tuple[int, ...]]:
            sub = rng.substream(ti).substream(r)
            arr = EventTimeline(
                horizon=horizon,
                times=_renewal_event_times(alpha, lam, horizon, sub.substream(0)),
            )
            dep = EventTimeline(
                horizon=horizon,
                times=_renewal_event_times(beta, mu, horizon, sub.substream(1)),
            )
            _, state = simulate_continuum_queue(arr, locations, dep, sub.substream(2))
            return state.best_ask, tuple(state.count_within(a + eps) for eps in eps_values)
        results = map_replicas(one, replicas, jobs)
        asks = np.array([res[0] for res in results])
        for j, eps in enumerate(eps_values):
            exceed[eps].append(float((asks > a + eps).mean()))
            near = np.array([res[1][j] for res in results], dtype=float)
            mass_freq[eps].append(float((near > horizon ** (beta / 2.0)).mean()))
    def _noise_slack(p_prev: float, p_next: float) -> float:
        # two-sided binomial noise on the difference of consecutive estimates
        var = (p_prev * (1.0 - p_prev) + p_next * (1.0 - p_next)) / replicas
        return 2.0 * math.sqrt(var) + 1e-12

    monotone_ok = all(
        all(b <= a_prev + _noise_slack(a_prev, b) for a_prev, b in zip(seq, seq[1:]))
        for seq in exceed.values()
    )
    # the pass/fail margins bind at the widest window; narrower windows converge
    # later and are reported for trend inspection only
    final_margins = [0.1 - exceed[eps_main][-1], mass_freq[eps_main][-1] - 0.9]
    statistic = float(min(final_margins)) if monotone_ok else -1.0
    details = {
        "support_infimum": a,
        "exceedance": {str(eps): seq for eps, seq in exceed.items()},
        "near_mass_freq": {str(eps): seq for eps, seq in mass_freq.items()},
        "monotone_ok": monotone_ok,
    }
    report = ExperimentReport(
        name="best-ask",
        parameters={
            "alpha": alpha,
            "beta": beta,
            "lam": lam,
            "mu": mu,
            "t_values": t_values,
            "eps_values": list(eps_values),
            "location_kind": locations.kind,
        },
        statistic=statistic,
        threshold=0.0,
        direction=">",
        replicas=replicas,
        seed=rng.seed,
        details=details,
    )
    return _finish(report, out_dir, verbose)
