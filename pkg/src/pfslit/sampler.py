"""Deterministic sampling of scattering events.

Random numbers come from a counter-based SplitMix64: every particle owns the
stream ``(seed, particle_id)`` and reads fixed counter slots from it, so the
event list does not depend on how particles are split between workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SlitGeometry

_MASK = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

# counter slots within a particle's stream
SLOT_SLIT = 0
SLOT_POSITION = 1
SLOT_THETA = 2
SLOT_DISPLAY = 3

DEFAULT_RESOLUTION = 2 ** 14
MIN_RESOLUTION = 1024


def mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer on a uint64 array (wrapping arithmetic)."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _as_u64(values) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=object))
    return np.array([int(v) & _MASK for v in arr.ravel()], dtype=np.uint64).reshape(arr.shape)


def stream_state(seed: int, stream_ids) -> np.ndarray:
    """Initial SplitMix64 state of each substream."""
    ids = np.atleast_1d(np.asarray(stream_ids))
    ids = ids.astype(np.uint64) if ids.dtype.kind in "iu" else _as_u64(ids)
    with np.errstate(over="ignore"):
        return np.uint64(seed & _MASK) ^ mix64(ids + _GOLDEN)


def raw64(seed: int, stream_ids, counter: int) -> np.ndarray:
    state = stream_state(seed, stream_ids)
    with np.errstate(over="ignore"):
        return mix64(state + np.uint64((counter + 1) & _MASK) * _GOLDEN)


def uniforms(seed: int, stream_ids, counter: int) -> np.ndarray:
    """Doubles in [0, 1) from counter slot ``counter`` of each stream (top 53 bits)."""
    return (raw64(seed, stream_ids, counter) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int

    def uniform(self, counter: int) -> float:
        return float(uniforms(self.seed, [self.stream_id], counter)[0])


@dataclass(frozen=True, eq=False)
class CdfTable:
    thetas: np.ndarray
    cdf: np.ndarray

    def __post_init__(self):
        if self.thetas.shape != self.cdf.shape or self.thetas.size < 2:
            raise ValueError("thetas and cdf must be matching arrays")
        if np.any(np.diff(self.cdf) < 0) or self.cdf[0] != 0.0 or self.cdf[-1] != 1.0:
            raise ValueError("cdf must rise monotonically from 0 to 1")

    def invert(self, u):
        """Inverse CDF with linear interpolation inside each cell."""
        u = np.asarray(u, dtype=float)
        idx = np.clip(np.searchsorted(self.cdf, u, side="right") - 1, 0, self.cdf.size - 2)
        c_lo, c_hi = self.cdf[idx], self.cdf[idx + 1]
        width = c_hi - c_lo
        frac = np.where(width > 0, (u - c_lo) / np.where(width > 0, width, 1.0), 0.5)
        t_lo = self.thetas[idx]
        out = t_lo + frac * (self.thetas[idx + 1] - t_lo)
        return out if out.ndim else float(out)

    def evaluate(self, theta):
        return np.interp(theta, self.thetas, self.cdf)


def build_cdf(density, theta_max: float, resolution: int = DEFAULT_RESOLUTION) -> CdfTable:
    """Trapezoid-accumulated CDF of ``density`` on a uniform grid over [-theta_max, theta_max].

    ``density`` is any vectorized callable; an :class:`AngularDensityModel`
    qualifies.
    """
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be >= {MIN_RESOLUTION}")
    thetas = np.linspace(-theta_max, theta_max, resolution)
    vals = np.asarray(density(thetas), dtype=float)
    if np.any(vals < 0) or not np.all(np.isfinite(vals)):
        raise ValueError("density must be finite and non-negative")
    cells = 0.5 * (vals[1:] + vals[:-1]) * np.diff(thetas)
    cdf = np.concatenate(([0.0], np.cumsum(cells)))
    cdf /= cdf[-1]
    cdf[-1] = 1.0
    return CdfTable(thetas, cdf)


def sample_theta(table: CdfTable, rng: RngStream) -> float:
    return table.invert(rng.uniform(SLOT_THETA))


def sample_thetas(table: CdfTable, seed: int, particle_ids) -> np.ndarray:
    return np.atleast_1d(table.invert(uniforms(seed, particle_ids, SLOT_THETA)))


def launch_from_uniforms(geometry: SlitGeometry, u_slit, u_pos):
    """Map two uniforms to (slit_index, y_eps): fair slit choice, uniform across the slit."""
    slit = np.where(np.asarray(u_slit) < 0.5, 1, 2)
    centers = np.where(slit == 1, geometry.y1, geometry.y2)
    return slit, centers + (np.asarray(u_pos) - 0.5) * geometry.width


def sample_launch(geometry: SlitGeometry, rng: RngStream) -> tuple[int, float]:
    slit, y = launch_from_uniforms(geometry, rng.uniform(SLOT_SLIT), rng.uniform(SLOT_POSITION))
    return int(slit), float(y)


def sample_launches(geometry: SlitGeometry, seed: int, particle_ids):
    return launch_from_uniforms(geometry, uniforms(seed, particle_ids, SLOT_SLIT),
                                uniforms(seed, particle_ids, SLOT_POSITION))


def sample_rejection(model, rng: RngStream, max_tries: int = 1_000_000) -> float:
    """Exact rejection sampler with a flat envelope at the peak density (test oracle).

    Counter slots 2k and 2k+1 of the stream hold the k-th proposal and its
    acceptance draw.
    """
    ceiling = model.density(0.0)
    tm = model.theta_max
    for k in range(max_tries):
        theta = (2.0 * rng.uniform(2 * k) - 1.0) * tm
        if rng.uniform(2 * k + 1) * ceiling <= model.density(theta):
            return theta
    raise RuntimeError("rejection sampler exhausted its proposal budget")


def sample_rejection_batch(model, seed: int, n: int, max_rounds: int = 10_000):
    """Vectorized rejection sampling: ``n`` accepted angles plus the overall acceptance rate.

    Stream ``i`` draws proposals until one is accepted, exactly as
    :func:`sample_rejection` does for a single stream.
    """
    ids = np.arange(n, dtype=np.uint64)
    out = np.empty(n)
    pending = np.arange(n)
    ceiling = model.density(0.0)
    tm = model.theta_max
    proposals = 0
    for k in range(max_rounds):
        if pending.size == 0:
            break
        sid = ids[pending]
        theta = (2.0 * uniforms(seed, sid, 2 * k) - 1.0) * tm
        accept = uniforms(seed, sid, 2 * k + 1) * ceiling <= model.density(theta)
        proposals += pending.size
        out[pending[accept]] = theta[accept]
        pending = pending[~accept]
    if pending.size:
        raise RuntimeError("rejection sampler exhausted its proposal budget")
    return out, n / proposals
