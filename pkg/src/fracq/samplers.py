"""Random variate generators for stable, Mittag-Leffler and inverse-clock laws.

All draws flow through RngStream, a thin wrapper over a counter-based
64-bit generator (Philox) keyed by (seed, stream_index).  Distinct stream
indices give non-overlapping streams, so replicas can be fanned out across
workers without coordination and still reproduce bit-identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .special import FppParams


@dataclass
class RngStream:
    """Reproducible random stream keyed by a seed and a stream index."""

    seed: int
    stream_index: int = 0
    _path: tuple[int, ...] = field(default=(), repr=False, compare=False)
    _gen: np.random.Generator | None = field(default=None, repr=False, compare=False)

    def generator(self) -> np.random.Generator:
        """The underlying generator; successive calls continue one stream."""
        if self._gen is None:
            seq = np.random.SeedSequence(
                self.seed, spawn_key=(self.stream_index, *self._path)
            )
            self._gen = np.random.Generator(np.random.Philox(seq))
        return self._gen

    def substream(self, k: int) -> "RngStream":
        """Derived independent stream, e.g. one per replica."""
        return RngStream(self.seed, self.stream_index, self._path + (k,))


def _check_theta(theta: float) -> None:
    if not (0.0 < theta <= 1.0):
        raise ParameterError(f"theta must be in (0, 1], got {theta}")


def sample_positive_stable(theta: float, rng: RngStream, size: int | None = None):
    """One-sided positive stable variates S with E exp(-s S) = exp(-s^theta).

    Uses Kanter's exact representation

        S = sin(theta pi U) sin((1-theta) pi U)^((1-theta)/theta)
            / (sin(pi U)^(1/theta) E^((1-theta)/theta)),

    with U uniform on (0,1) and E unit exponential.  At theta = 1 the law
    degenerates to the point mass at 1 and exactly 1.0 is returned.
    """
    _check_theta(theta)
    n = 1 if size is None else int(size)
    if n < 0:
        raise ParameterError("size must be nonnegative")
    g = rng.generator()
    if theta == 1.0:
        out = np.ones(n)
    else:
        u = g.random(n) * np.pi
        e = g.standard_exponential(n)
        ratio = (1.0 - theta) / theta
        out = (np.sin(theta * u) / np.sin(u) ** (1.0 / theta)) * (
            np.sin((1.0 - theta) * u) / e
        ) ** ratio
    return float(out[0]) if size is None else out


def sample_mittag_leffler(p: FppParams, rng: RngStream, size: int | None = None):
    """Mittag-Leffler waiting times via the product form X = E^(1/theta) S / lam.

    E is unit exponential and S positive stable; the Laplace transform of the
    result is 1 / (1 + (s/lam)^theta).  theta = 1 reduces to Exp(lam) exactly.
    """
    n = 1 if size is None else int(size)
    if n < 0:
        raise ParameterError("size must be nonnegative")
    g = rng.generator()
    if p.theta == 1.0:
        out = g.standard_exponential(n) / p.lam
        return float(out[0]) if size is None else out
    e = g.standard_exponential(n)
    s = sample_positive_stable(p.theta, rng, size=n)
    out = e ** (1.0 / p.theta) * s / p.lam
    return float(out[0]) if size is None else out


def sample_mittag_leffler_trig(p: FppParams, rng: RngStream, size: int | None = None):
    """Mittag-Leffler waiting times via the trigonometric inversion form

        X = -ln(U) (sin(theta pi)/tan(theta pi V) - cos(theta pi))^(1/theta) / lam,

    U, V independent uniforms.  Independent of the product-form construction;
    the two must agree in law.  theta = 1 is special-cased to Exp(lam).
    """
    n = 1 if size is None else int(size)
    if n < 0:
        raise ParameterError("size must be nonnegative")
    g = rng.generator()
    if p.theta == 1.0:
        out = g.standard_exponential(n) / p.lam
        return float(out[0]) if size is None else out
    u = g.random(n)
    v = g.random(n)
    # guard the measure-zero endpoints of the open interval
    u = np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
    v = np.where(v == 0.0, np.nextafter(0.0, 1.0), v)
    tp = p.theta * np.pi
    bracket = np.sin(tp) / np.tan(tp * v) - np.cos(tp)
    out = -np.log(u) * bracket ** (1.0 / p.theta) / p.lam
    return float(out[0]) if size is None else out


def sample_inverse_subordinator_at(
    theta: float, t: float, rng: RngStream, size: int | None = None
):
    """Y_theta(t), the inverse stable subordinator at a single fixed time.

    Uses the identity Y_theta(t) =d (t / S)^theta with S positive stable,
    which follows from P(Y(t) > s) = P(L(s) <= t) and self-similarity of L.
    theta = 1 returns exactly t.
    """
    _check_theta(theta)
    if t < 0:
        raise ParameterError("t must be nonnegative")
    n = 1 if size is None else int(size)
    if n < 0:
        raise ParameterError("size must be nonnegative")
    if theta == 1.0:
        out = np.full(n, float(t))
        return float(out[0]) if size is None else out
    s = sample_positive_stable(theta, rng, size=n)
    out = (t / s) ** theta
    return float(out[0]) if size is None else out
