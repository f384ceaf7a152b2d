"""Reflected queues driven by event timelines.

The total queue length is the Skorokhod reflection of the netflow (arrivals
minus attempted services): Q(t) = f(t) - min(0, inf_{s<=t} f(s)).  Class
resolution follows a static priority rule: each service removes a customer
from the lowest-indexed nonempty class, and a service finding an empty system
is wasted.  A continuum variant marks arrivals with locations and serves the
current minimum (best ask).
"""

from __future__ import annotations

import csv
import heapq
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .processes import EventTimeline, _fmt
from .samplers import RngStream


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous piecewise-constant function with jumps at
    strictly increasing positive times."""

    jump_times: np.ndarray
    values: np.ndarray
    initial_value: float = 0.0

    def __post_init__(self) -> None:
        jt = np.asarray(self.jump_times, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "jump_times", jt)
        object.__setattr__(self, "values", vals)
        if jt.shape != vals.shape or jt.ndim != 1:
            raise ParameterError("jump_times and values must be equal-length vectors")
        if jt.size:
            if jt[0] <= 0:
                raise ParameterError("jumps must occur at positive times")
            if not np.all(np.diff(jt) > 0):
                raise ParameterError("jump times must be strictly increasing")

    def __call__(self, t):
        idx = np.searchsorted(self.jump_times, np.asarray(t, dtype=float), side="right")
        padded = np.concatenate([[self.initial_value], self.values])
        out = padded[idx]
        return float(out) if np.isscalar(t) else out

    @property
    def end_value(self) -> float:
        return float(self.values[-1]) if self.values.size else float(self.initial_value)


def skorokhod_reflect(f: StepFunction) -> StepFunction:
    """One-sided reflection at zero: f(t) - min(0, running minimum of f).

    Requires f(0) = 0, i.e. zero initial value and no jump at time zero.
    """
    if f.initial_value != 0.0:
        raise ParameterError("reflection requires f(0) = 0")
    if f.values.size == 0:
        return f
    running_min = np.minimum(np.minimum.accumulate(f.values), 0.0)
    return StepFunction(f.jump_times, f.values - running_min, 0.0)


def _merged_netflow(
    arrival_times: np.ndarray, departure_times: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Merge the two event streams into (times, +1/-1 signs), with arrivals
    ordered before departures at ties."""
    times = np.concatenate([arrival_times, departure_times])
    kinds = np.concatenate(
        [np.zeros(arrival_times.size, dtype=np.int8), np.ones(departure_times.size, dtype=np.int8)]
    )
    order = np.lexsort((kinds, times))
    return times[order], np.where(kinds[order] == 0, 1, -1).astype(np.int64)


def reflected_path_stats(
    arrival_times: np.ndarray, departure_times: np.ndarray
) -> tuple[int, int, int]:
    """(final length, number of emptyings, running maximum) of the reflected
    total queue driven by the two event streams.

    An emptying is a service that takes the queue from one to zero.
    """
    _, signs = _merged_netflow(
        np.asarray(arrival_times, dtype=float), np.asarray(departure_times, dtype=float)
    )
    if signs.size == 0:
        return 0, 0, 0
    netflow = np.cumsum(signs)
    running_min = np.minimum(np.minimum.accumulate(netflow), 0)
    q = netflow - running_min
    prev = np.concatenate([[0], q[:-1]])
    emptyings = int(np.count_nonzero((signs == -1) & (q == 0) & (prev == 1)))
    return int(q[-1]), emptyings, int(q.max(initial=0))


@dataclass(frozen=True)
class QueueTrajectory:
    """Event-by-event state of the multiclass priority queue."""

    horizon: float
    n_classes: int
    event_times: np.ndarray
    event_types: np.ndarray  # 'A' arrival, 'D' departure, 'W' wasted service
    event_classes: np.ndarray  # class served or arriving; 0 for wasted services
    lengths: np.ndarray  # shape (n_events, n_classes), state after the event
    netflow_infimum: np.ndarray  # running min(0, inf netflow) after the event
    emptying_times: np.ndarray
    wasted_services: int

    @property
    def total_lengths(self) -> np.ndarray:
        return self.lengths.sum(axis=1)

    def final_lengths(self) -> np.ndarray:
        if self.lengths.shape[0] == 0:
            return np.zeros(self.n_classes, dtype=np.int64)
        return self.lengths[-1]

    def to_csv(self, path: str) -> None:
        header = (
            ["time", "event_type", "class"]
            + [f"q_{i}" for i in range(1, self.n_classes + 1)]
            + ["q_total", "infimum"]
        )
        totals = self.total_lengths
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for k in range(self.event_times.size):
                cls = self.event_classes[k]
                writer.writerow(
                    [_fmt(self.event_times[k]), str(self.event_types[k]), "" if cls == 0 else int(cls)]
                    + [int(v) for v in self.lengths[k]]
                    + [int(totals[k]), int(self.netflow_infimum[k])]
                )


def simulate_multiclass_queue(
    arrivals: EventTimeline,
    departures: EventTimeline,
    n_classes: int | None = None,
) -> QueueTrajectory:
    """Run the priority queue over merged arrival and service events.

    Arrivals must be labeled with classes 1..K.  Ties between an arrival and a
    service at the same instant are resolved arrival first.  Each service
    removes a customer from the lowest-indexed nonempty class; a service that
    finds the system empty is counted as wasted.
    """
    if arrivals.labels is None:
        raise ParameterError("arrivals must carry class labels")
    if arrivals.horizon != departures.horizon:
        raise ParameterError("arrival and departure timelines must share one horizon")
    k_seen = int(arrivals.labels.max(initial=0))
    n_k = k_seen if n_classes is None else int(n_classes)
    if n_k < max(1, k_seen):
        raise ParameterError(f"n_classes={n_k} below largest arrival label {k_seen}")

    times = np.concatenate([arrivals.times, departures.times])
    kinds = np.concatenate(
        [np.zeros(len(arrivals), dtype=np.int8), np.ones(len(departures), dtype=np.int8)]
    )
    labels = np.concatenate([arrivals.labels, np.zeros(len(departures), dtype=int)])
    order = np.lexsort((kinds, times))
    times, kinds, labels = times[order], kinds[order], labels[order]

    n_events = times.size
    q = np.zeros(n_k, dtype=np.int64)
    lengths = np.zeros((n_events, n_k), dtype=np.int64)
    event_types = np.empty(n_events, dtype="U1")
    event_classes = np.zeros(n_events, dtype=np.int64)
    inf_track = np.zeros(n_events, dtype=np.int64)
    emptyings: list[float] = []
    netflow = 0
    running_inf = 0
    wasted = 0
    total = 0
    for k in range(n_events):
        if kinds[k] == 0:
            c = labels[k]
            q[c - 1] += 1
            total += 1
            netflow += 1
            event_types[k] = "A"
            event_classes[k] = c
        else:
            netflow -= 1
            running_inf = min(running_inf, netflow)
            if total > 0:
                c = int(np.flatnonzero(q)[0]) + 1
                q[c - 1] -= 1
                total -= 1
                event_types[k] = "D"
                event_classes[k] = c
                if total == 0:
                    emptyings.append(times[k])
            else:
                wasted += 1
                event_types[k] = "W"
        lengths[k] = q
        inf_track[k] = running_inf
    return QueueTrajectory(
        horizon=arrivals.horizon,
        n_classes=n_k,
        event_times=times,
        event_types=event_types,
        event_classes=event_classes,
        lengths=lengths,
        netflow_infimum=inf_track,
        emptying_times=np.asarray(emptyings, dtype=float),
        wasted_services=wasted,
    )


def aggregate_lengths(traj: QueueTrajectory, upto_class: int) -> StepFunction:
    """Step path of Q_1 + ... + Q_i between consecutive distinct event times."""
    if not 1 <= upto_class <= traj.n_classes:
        raise ParameterError(f"class index {upto_class} out of range")
    agg = traj.lengths[:, :upto_class].sum(axis=1).astype(float)
    t = traj.event_times
    if t.size == 0:
        return StepFunction(t, agg, 0.0)
    # several events can share one float timestamp; keep the last state
    last_of_time = np.flatnonzero(np.concatenate([np.diff(t) > 0, [True]]))
    return StepFunction(t[last_of_time], agg[last_of_time], 0.0)


@dataclass(frozen=True)
class LocationSampler:
    """Distribution of arrival locations on the positive half-line."""

    kind: str
    a: float = 0.0
    b: float = 1.0
    rate: float = 1.0
    locations: np.ndarray | None = None
    weights: np.ndarray | None = None

    @classmethod
    def uniform(cls, a: float, b: float) -> "LocationSampler":
        if not (0 <= a < b):
            raise ParameterError("require 0 <= a < b")
        return cls(kind="uniform", a=a, b=b)

    @classmethod
    def exponential(cls, rate: float) -> "LocationSampler":
        if rate <= 0:
            raise ParameterError("rate must be positive")
        return cls(kind="exponential", rate=rate)

    @classmethod
    def point_masses(cls, locations, weights) -> "LocationSampler":
        locs = np.asarray(locations, dtype=float)
        w = np.asarray(weights, dtype=float)
        if locs.size == 0 or locs.shape != w.shape:
            raise ParameterError("locations and weights must be equal-length nonempty vectors")
        if np.any(locs < 0) or np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ParameterError("need nonnegative locations and positive weights summing to 1")
        return cls(kind="points", locations=locs, weights=w)

    @classmethod
    def empirical(cls, values) -> "LocationSampler":
        vals = np.asarray(values, dtype=float)
        if vals.size == 0 or np.any(vals < 0):
            raise ParameterError("need a nonempty sample of nonnegative locations")
        return cls(kind="empirical", locations=vals)

    def support_infimum(self) -> float:
        if self.kind == "uniform":
            return self.a
        if self.kind == "exponential":
            return 0.0
        return float(self.locations.min())

    def sample(self, rng: RngStream, n: int) -> np.ndarray:
        g = rng.generator()
        if self.kind == "uniform":
            return self.a + (self.b - self.a) * g.random(n)
        if self.kind == "exponential":
            return g.exponential(1.0 / self.rate, size=n)
        if self.kind == "points":
            cum = np.cumsum(self.weights)
            cum[-1] = 1.0
            return self.locations[np.searchsorted(cum, g.random(n), side="right")]
        if self.kind == "empirical":
            return self.locations[g.integers(0, self.locations.size, size=n)]
        raise ParameterError(f"unknown location sampler kind {self.kind!r}")


@dataclass(frozen=True)
class ContinuumQueueState:
    """Final state of the location-marked queue: the multiset of waiting
    locations (sorted) and the wasted-service count."""

    locations: np.ndarray
    wasted_services: int

    @property
    def total(self) -> int:
        return int(self.locations.size)

    @property
    def best_ask(self) -> float:
        return float(self.locations[0]) if self.locations.size else np.inf

    def count_within(self, x: float) -> int:
        """Number of waiting customers at locations <= x."""
        return int(np.searchsorted(self.locations, x, side="right"))


def simulate_continuum_queue(
    arrivals: EventTimeline,
    locations: LocationSampler,
    departures: EventTimeline,
    rng: RngStream,
) -> tuple[StepFunction, ContinuumQueueState]:
    """Serve the minimum-location customer at each departure event.

    Returns the best-ask path (minimum waiting location after each event,
    +inf when empty) and the final state.  Ties at equal times process the
    arrival first; a service on an empty system is wasted.
    """
    if arrivals.horizon != departures.horizon:
        raise ParameterError("arrival and departure timelines must share one horizon")
    marks = locations.sample(rng, len(arrivals))
    times = np.concatenate([arrivals.times, departures.times])
    kinds = np.concatenate(
        [np.zeros(len(arrivals), dtype=np.int8), np.ones(len(departures), dtype=np.int8)]
    )
    mark_idx = np.concatenate([np.arange(len(arrivals)), np.full(len(departures), -1)])
    order = np.lexsort((kinds, times))

    heap: list[float] = []
    live: dict[float, int] = {}
    wasted = 0
    path_t = np.empty(times.size, dtype=float)
    path_v = np.empty(times.size, dtype=float)
    for j, idx in enumerate(order):
        if kinds[idx] == 0:
            x = float(marks[mark_idx[idx]])
            heapq.heappush(heap, x)
            live[x] = live.get(x, 0) + 1
        else:
            while heap and live.get(heap[0], 0) == 0:
                heapq.heappop(heap)
            if heap:
                x = heapq.heappop(heap)
                live[x] -= 1
            else:
                wasted += 1
        while heap and live.get(heap[0], 0) == 0:
            heapq.heappop(heap)
        path_t[j] = times[idx]
        path_v[j] = heap[0] if heap else np.inf
    if path_t.size:
        last_of_time = np.flatnonzero(np.concatenate([np.diff(path_t) > 0, [True]]))
        path_t, path_v = path_t[last_of_time], path_v[last_of_time]
    final = np.sort(np.repeat(list(live.keys()), list(live.values()))) if live else np.empty(0)
    return (
        StepFunction(path_t, path_v, np.inf),
        ContinuumQueueState(locations=np.asarray(final, dtype=float), wasted_services=wasted),
    )
