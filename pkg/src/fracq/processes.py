"""Event-time simulation: fractional Poisson processes, stable subordinator
paths, inverse-clock grids, and multinomial thinning into classes.

Two constructions of the fractional Poisson process are provided and must
agree in law: a renewal construction (partial sums of Mittag-Leffler waiting
times) and a time-change construction (homogeneous Poisson events placed in
inverse-subordinator time and mapped back through the clock's generalized
inverse).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CoverageError, EventCapError, ParameterError
from .samplers import RngStream, sample_positive_stable
from .special import FppParams, inverse_subordinator_moments

DEFAULT_EVENT_CAP = 10_000_000
_FLOAT_FMT = "%.17g"


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x: float) -> str:
    if np.isposinf(x):
        return "inf"
    return _FLOAT_FMT % x


@dataclass(frozen=True)
class EventTimeline:
    """Strictly increasing event times in (0, horizon], optionally labeled."""

    horizon: float
    times: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        if self.horizon <= 0:
            raise ParameterError("horizon must be positive")
        if times.size:
            if not np.all(np.diff(times) > 0):
                raise ParameterError("event times must be strictly increasing")
            if times[0] <= 0 or times[-1] > self.horizon:
                raise ParameterError("event times must lie in (0, horizon]")
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=int)
            object.__setattr__(self, "labels", labels)
            if labels.shape != times.shape:
                raise ParameterError("labels must match times in length")
            if labels.size and labels.min() < 1:
                raise ParameterError("class labels start at 1")

    def __len__(self) -> int:
        return int(self.times.size)

    def count_at(self, t: float) -> int:
        """Number of events with time <= t."""
        return int(np.searchsorted(self.times, t, side="right"))

    def to_csv(self, path: str) -> None:
        labels = self.labels
        rows = (
            (_fmt(t), "" if labels is None else int(labels[i]))
            for i, t in enumerate(self.times)
        )
        _write_csv(path, ["time", "class"], rows)


@dataclass(frozen=True)
class SubordinatorGrid:
    """Stable subordinator sampled on the regular grid {0, step, 2 step, ...}."""

    step: float
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if self.step <= 0:
            raise ParameterError("step must be positive")
        if values.size == 0 or values[0] != 0.0:
            raise ParameterError("grid must start at L(0) = 0")
        if np.any(np.diff(values) < 0):
            raise ParameterError("subordinator values must be nondecreasing")

    def to_csv(self, path: str) -> None:
        rows = ((_fmt(k * self.step), _fmt(v)) for k, v in enumerate(self.values))
        _write_csv(path, ["t", "y"], rows)


@dataclass(frozen=True)
class InverseClockGrid:
    """Inverse-subordinator values on query times, an over-approximation
    with bias at most one grid step."""

    t_grid: np.ndarray
    y_values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "t_grid", np.asarray(self.t_grid, dtype=float))
        object.__setattr__(self, "y_values", np.asarray(self.y_values, dtype=float))
        if self.t_grid.shape != self.y_values.shape:
            raise ParameterError("t_grid and y_values must have equal length")

    def to_csv(self, path: str) -> None:
        rows = ((_fmt(t), _fmt(y)) for t, y in zip(self.t_grid, self.y_values))
        _write_csv(path, ["t", "y"], rows)


@dataclass(frozen=True)
class ClassProbabilities:
    """Thinning probabilities p_1..p_K, all positive, summing to one."""

    p: np.ndarray
    cumulative: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        p = np.asarray(self.p, dtype=float)
        object.__setattr__(self, "p", p)
        if p.ndim != 1 or p.size == 0:
            raise ParameterError("p must be a nonempty vector")
        if np.any(p <= 0):
            raise ParameterError("all class probabilities must be positive")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ParameterError(f"class probabilities sum to {p.sum()}, not 1")
        cum = np.cumsum(p)
        cum[-1] = 1.0
        object.__setattr__(self, "cumulative", cum)

    @property
    def n_classes(self) -> int:
        return int(self.p.size)

    def head_sum(self, i: int) -> float:
        """P_i = p_1 + ... + p_i."""
        if not 1 <= i <= self.n_classes:
            raise ParameterError(f"class index {i} out of range")
        return float(self.cumulative[i - 1])


def _strictly_increasing(times: np.ndarray) -> np.ndarray:
    """Resolve float-collision ties by nudging later events up one ulp,
    preserving insertion order."""
    out = times.copy()
    while True:
        bad = np.flatnonzero(np.diff(out) <= 0)
        if bad.size == 0:
            return out
        out[bad + 1] = np.nextafter(out[bad], np.inf)


def simulate_fpp_renewal(
    p: FppParams,
    horizon: float,
    rng: RngStream,
    event_cap: int = DEFAULT_EVENT_CAP,
) -> EventTimeline:
    """Fractional Poisson events on (0, horizon] as Mittag-Leffler partial sums."""
    if horizon <= 0:
        raise ParameterError("horizon must be positive")
    from .samplers import sample_mittag_leffler

    mean_y, var_y = inverse_subordinator_moments(p.theta, horizon)
    rate = p.lam**p.theta
    block = max(64, int(rate * mean_y + 8.0 * math.sqrt(rate**2 * var_y + rate * mean_y + 1.0)))
    chunks: list[np.ndarray] = []
    total = 0.0
    n_drawn = 0
    while True:
        gaps = sample_mittag_leffler(p, rng, size=block)
        partial = total + np.cumsum(gaps)
        chunks.append(partial)
        total = partial[-1]
        n_drawn += block
        if total > horizon:
            break
        if n_drawn > event_cap:
            raise EventCapError(
                f"renewal simulation exceeded {event_cap} events before reaching the horizon"
            )
    times = np.concatenate(chunks) if len(chunks) > 1 else chunks[0]
    times = times[times <= horizon]
    if times.size > event_cap:
        raise EventCapError(f"simulation produced more than {event_cap} events")
    return EventTimeline(horizon=horizon, times=times)


def simulate_subordinator(
    theta: float, step: float, s_max: float, rng: RngStream
) -> SubordinatorGrid:
    """Stable subordinator increments on a regular grid: values[k] = L(k step),
    built from iid scaled stable draws step^(1/theta) S_j."""
    if not (0.0 < theta <= 1.0):
        raise ParameterError(f"theta must be in (0, 1], got {theta}")
    if step <= 0 or s_max < step:
        raise ParameterError("require 0 < step <= s_max")
    m = int(math.ceil(s_max / step - 1e-12))
    incs = step ** (1.0 / theta) * sample_positive_stable(theta, rng, size=m)
    values = np.concatenate([[0.0], np.cumsum(incs)])
    return SubordinatorGrid(step=step, values=values)


def invert_subordinator(grid: SubordinatorGrid, t_grid) -> InverseClockGrid:
    """First-passage inversion: y(t) = min{k step : L(k step) > t}.

    Over-approximates the true inverse clock with bias at most one step.
    Raises CoverageError when the path does not exceed some query time.
    """
    t_arr = np.asarray(t_grid, dtype=float)
    if t_arr.size and t_arr.min() < 0:
        raise ParameterError("query times must be nonnegative")
    if t_arr.size and grid.values[-1] <= t_arr.max():
        raise CoverageError(
            "subordinator path does not exceed the largest query time; extend s_max"
        )
    idx = np.searchsorted(grid.values, t_arr, side="right")
    return InverseClockGrid(t_grid=t_arr, y_values=idx * grid.step)


def default_inverse_clock_step(theta: float, horizon: float) -> float:
    """Default clock-level resolution: 1e-3 of the clock's natural scale."""
    return 1e-3 * max(horizon, 1e-12) ** theta


def _covering_subordinator(
    theta: float, step: float, horizon: float, rng: RngStream
) -> SubordinatorGrid:
    """Simulate L on the level grid, extending until L exceeds the horizon."""
    mean_y, var_y = inverse_subordinator_moments(theta, horizon)
    s_max = max(step, 1.25 * mean_y + 8.0 * math.sqrt(var_y) + 2.0 * step)
    grid = simulate_subordinator(theta, step, s_max, rng)
    values = grid.values
    while values[-1] <= horizon:
        m_extra = max(64, values.size // 2)
        incs = step ** (1.0 / theta) * sample_positive_stable(theta, rng, size=m_extra)
        values = np.concatenate([values, values[-1] + np.cumsum(incs)])
    return SubordinatorGrid(step=step, values=values)


def simulate_fpp_timechange(
    p: FppParams,
    horizon: float,
    rng: RngStream,
    step: float | None = None,
    event_cap: int = DEFAULT_EVENT_CAP,
) -> EventTimeline:
    """Fractional Poisson events via the inverse-clock construction.

    Homogeneous Poisson events of rate lam^theta are placed in clock time on
    (0, Y(horizon)] and mapped back through the right-continuous generalized
    inverse of the simulated clock path.  The clock is discretized on levels
    spaced by ``step`` (default 1e-3 of its natural scale), so event times
    carry a bias of at most one level passage.
    """
    if horizon <= 0:
        raise ParameterError("horizon must be positive")
    if step is None:
        step = default_inverse_clock_step(p.theta, horizon)
    g = rng.generator()
    grid = _covering_subordinator(p.theta, step, horizon, rng)
    # Y(horizon) in the over-approximating grid sense
    k_top = int(np.searchsorted(grid.values, horizon, side="right"))
    y_top = k_top * step
    n_events = int(g.poisson(p.lam**p.theta * y_top))
    if n_events > event_cap:
        raise EventCapError(f"time-change simulation produced more than {event_cap} events")
    y_pos = np.sort(g.random(n_events)) * y_top
    # event at clock position y becomes visible when Y first reaches level
    # ceil(y/step); that happens at the passage time of the previous level
    k_ev = np.ceil(y_pos / step).astype(int)
    k_ev = np.clip(k_ev, 1, grid.values.size - 1)
    times = grid.values[k_ev - 1]
    times = np.where(times <= 0.0, np.nextafter(0.0, 1.0), times)
    times = _strictly_increasing(times)
    keep = times <= horizon
    return EventTimeline(horizon=horizon, times=times[keep])


def thin_events(
    events: EventTimeline, classes: ClassProbabilities, rng: RngStream
) -> EventTimeline:
    """Label each event independently with class i with probability p_i."""
    g = rng.generator()
    u = g.random(len(events))
    labels = np.searchsorted(classes.cumulative, u, side="right") + 1
    return EventTimeline(horizon=events.horizon, times=events.times, labels=labels)


def class_count_at(events: EventTimeline, class_id: int, t: float) -> int:
    """Number of class-`class_id` events with time <= t."""
    if events.labels is None:
        raise ParameterError("timeline carries no class labels")
    if class_id < 1:
        raise ParameterError("class labels start at 1")
    upto = int(np.searchsorted(events.times, t, side="right"))
    return int(np.count_nonzero(events.labels[:upto] == class_id))


# ---------------------------------------------------------------------------
# vectorized single-time count helpers used by the verification experiments

def renewal_counts(p: FppParams, t: float, n: int, rng: RngStream) -> np.ndarray:
    """n independent copies of the renewal-construction count N(t)."""
    from .samplers import sample_mittag_leffler

    if t < 0:
        raise ParameterError("t must be nonnegative")
    mean_y, var_y = inverse_subordinator_moments(p.theta, t)
    rate = p.lam**p.theta
    block = max(16, int(rate * mean_y + 8.0 * math.sqrt(rate**2 * var_y + rate * mean_y + 1.0)))
    out = np.empty(n, dtype=np.int64)
    chunk = max(1, min(n, int(4_000_000 // block)))
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        rows = hi - lo
        sums = np.cumsum(
            sample_mittag_leffler(p, rng, size=rows * block).reshape(rows, block), axis=1
        )
        counts = (sums <= t).sum(axis=1)
        unfinished = np.flatnonzero(sums[:, -1] <= t)
        tails = sums[unfinished, -1]
        while unfinished.size:
            more = np.cumsum(
                sample_mittag_leffler(p, rng, size=unfinished.size * block).reshape(
                    unfinished.size, block
                ),
                axis=1,
            ) + tails[:, None]
            counts[unfinished] += (more <= t).sum(axis=1)
            still = np.flatnonzero(more[:, -1] <= t)
            tails = more[still, -1]
            unfinished = unfinished[still]
        out[lo:hi] = counts
    return out


def timechange_counts(
    p: FppParams, t: float, n: int, rng: RngStream, step: float | None = None
) -> np.ndarray:
    """n independent copies of the time-change-construction count N(t).

    The count at one time only needs the clock value: N(t) = Pi(lam^theta Y(t))
    with Pi a unit-rate Poisson process.  By default Y(t) is drawn exactly via
    (t/S)^theta; passing an explicit level `step` instead discretizes the clock
    on the same grid as simulate_fpp_timechange (bias at most one level).
    """
    if t < 0:
        raise ParameterError("t must be nonnegative")
    from .samplers import sample_inverse_subordinator_at

    g = rng.substream(1).generator()
    if step is None:
        y_t = sample_inverse_subordinator_at(p.theta, t, rng.substream(0), size=n)
        return g.poisson(p.lam**p.theta * y_t).astype(np.int64)
    mean_y, var_y = inverse_subordinator_moments(p.theta, t)
    m0 = max(8, int((mean_y + 8.0 * math.sqrt(var_y) + 2.0 * step) / step))
    clock = rng.substream(0)
    out = np.empty(n, dtype=np.int64)
    chunk = max(1, min(n, int(4_000_000 // m0)))
    scale = step ** (1.0 / p.theta)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        rows = hi - lo
        incs = scale * sample_positive_stable(p.theta, clock, size=rows * m0).reshape(rows, m0)
        paths = np.cumsum(incs, axis=1)
        while True:
            short = np.flatnonzero(paths[:, -1] <= t)
            if short.size == 0:
                break
            m_extra = max(16, m0 // 2)
            more = scale * sample_positive_stable(p.theta, clock, size=short.size * m_extra)
            more = np.cumsum(more.reshape(short.size, m_extra), axis=1) + paths[short, -1][:, None]
            paths = np.concatenate(
                [paths, np.full((rows, m_extra), np.inf)], axis=1
            )
            paths[short, -m_extra:] = more
        k = (paths <= t).sum(axis=1) + 1
        y_t = k * step
        out[lo:hi] = g.poisson(p.lam**p.theta * y_t)
    return out
