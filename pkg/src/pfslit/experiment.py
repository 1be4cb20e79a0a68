"""End-to-end runs: sample events, histogram the screen, compare with the model."""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import BeamSpec, SlitGeometry, validate_slit_width
from .sampler import DEFAULT_RESOLUTION, build_cdf, sample_launches, sample_thetas
from .stats import ChiSquareResult, pearson_chi_square
from .trajectory import PAPER, PROPAGATION_MODES, propagate_arrays, screen_offset
from .wavefield import APPROXIMATE, DENSITY_MODES, AngularDensityModel, FieldParams

DEFAULT_BINS = 100
MIN_EVENTS_FOR_VERDICT = 30
EXPECTED_GRID = 2 ** 17 + 1
SCAN_POINTS = 200_001
PEAK_HEIGHT_FRACTION = 0.25

EVENT_FIELDS = ("particle_id", "slit_index", "y_eps", "theta", "y_det", "x_det", "flight_scale")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    beam: BeamSpec
    geometry: SlitGeometry
    field: FieldParams
    theta_max: float
    n_particles: int
    seed: int = 0
    density_mode: str = APPROXIMATE
    propagation_mode: str = PAPER
    bins: int = DEFAULT_BINS
    cdf_resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if not isinstance(self.n_particles, int) or self.n_particles < 1:
            raise ConfigError(f"n_particles must be a positive integer, got {self.n_particles!r}")
        if not isinstance(self.bins, int) or self.bins < 10:
            raise ConfigError(f"bins must be an integer >= 10, got {self.bins!r}")
        if self.density_mode not in DENSITY_MODES:
            raise ConfigError(f"unknown density mode {self.density_mode!r}")
        if self.propagation_mode not in PROPAGATION_MODES:
            raise ConfigError(f"unknown propagation mode {self.propagation_mode!r}")
        if not (0 < self.theta_max < math.pi / 2):
            raise ConfigError(f"theta_max must lie in (0, pi/2), got {self.theta_max!r}")
        verdict = validate_slit_width(self.beam, self.geometry)
        if not verdict.passed:
            raise ConfigError(f"slit width {self.geometry.width!r} m is below the uncertainty "
                              f"bound {verdict.bound!r} m")

    def physics_digest(self) -> str:
        """Stable hash of everything except seed and particle count."""
        payload = {
            "beam": asdict(self.beam), "geometry": asdict(self.geometry),
            "field": asdict(self.field), "theta_max": self.theta_max,
            "density_mode": self.density_mode, "propagation_mode": self.propagation_mode,
            "bins": self.bins, "cdf_resolution": self.cdf_resolution,
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _cell_antiderivative(x, nodes, values, cum):
    """Exact integral of the piecewise-linear interpolant (values at nodes) from nodes[0] to x.

    Constant extension beyond the last node.
    """
    x = np.asarray(x, dtype=float)
    inside = np.clip(x, nodes[0], nodes[-1])
    j = np.clip(np.searchsorted(nodes, inside, side="right") - 1, 0, nodes.size - 2)
    h = nodes[j + 1] - nodes[j]
    dx = inside - nodes[j]
    slope = (values[j + 1] - values[j]) / h
    out = cum[j] + values[j] * dx + 0.5 * slope * dx * dx
    return out + np.where(x > nodes[-1], (x - nodes[-1]) * values[-1], 0.0)


class ScreenModel:
    """Everything about a configuration that does not depend on the seed.

    Holds the angular density, the sampling table, and the distribution of
    the detected position y_det = offset(theta) + y_eps, where y_eps is drawn
    from the two-slit uniform mixture. The convolution is computed exactly
    from the cumulative of the mapped angular distribution.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        c = config
        self.model = AngularDensityModel(c.beam, c.geometry, c.field, c.theta_max, c.density_mode)
        self.table = build_cdf(self.model, c.theta_max, c.cdf_resolution)

        thetas = np.linspace(-c.theta_max, c.theta_max, EXPECTED_GRID)
        dens = self.model.density(thetas)
        cdf = np.concatenate(([0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(thetas))))
        cdf /= cdf[-1]
        self._s = np.asarray(screen_offset(thetas, c.geometry, c.beam, c.propagation_mode))
        self._f_s = cdf
        self._g_cum = np.concatenate(([0.0], np.cumsum(0.5 * (cdf[1:] + cdf[:-1]) * np.diff(self._s))))

        g = c.geometry
        self.support = (self._s[0] + min(g.centers) - 0.5 * g.width,
                        self._s[-1] + max(g.centers) + 0.5 * g.width)
        self.edges = np.linspace(*self.support, c.bins + 1)

    # distribution of the mapped angular offset s alone
    def offset_cdf(self, s):
        return np.interp(s, self._s, self._f_s, left=0.0, right=1.0)

    def _offset_cdf_integral(self, s):
        return _cell_antiderivative(s, self._s, self._f_s, self._g_cum)

    def screen_cdf(self, y):
        """P(y_det <= y)."""
        g = self.config.geometry
        y = np.asarray(y, dtype=float)
        total = np.zeros_like(y)
        for c in g.centers:
            if g.width > 0:
                hi = self._offset_cdf_integral(y - c + 0.5 * g.width)
                lo = self._offset_cdf_integral(y - c - 0.5 * g.width)
                total += (hi - lo) / g.width
            else:
                total += self.offset_cdf(y - c)
        return 0.5 * total

    def screen_density(self, y):
        g = self.config.geometry
        y = np.asarray(y, dtype=float)
        total = np.zeros_like(y)
        for c in g.centers:
            total += (self.offset_cdf(y - c + 0.5 * g.width)
                      - self.offset_cdf(y - c - 0.5 * g.width)) / g.width
        return 0.5 * total

    def expected_counts(self, n: int, edges=None) -> np.ndarray:
        edges = self.edges if edges is None else edges
        return n * np.diff(self.screen_cdf(edges))

    def offset_of(self, theta):
        c = self.config
        return screen_offset(theta, c.geometry, c.beam, c.propagation_mode)


@dataclass
class ScreenHistogram:
    edges: np.ndarray
    counts: np.ndarray
    expected: np.ndarray

    @property
    def bin_width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])


@dataclass
class FringeMetrics:
    fringe_spacing: float | None
    peak_spacing: float | None
    peak_positions: list
    dark_fringe_positions: list
    envelope_zero_positions: list
    empirical_peaks: list = field(default_factory=list)


@dataclass
class RunSummary:
    histogram: ScreenHistogram
    metrics: FringeMetrics
    fit: ChiSquareResult
    seed: int
    config_digest: str
    n_particles: int

    @property
    def chi_square(self):
        return self.fit.statistic

    @property
    def dof(self):
        return self.fit.dof

    @property
    def verdict(self):
        return self.fit.passed

    @property
    def fringe_spacing(self):
        return self.metrics.fringe_spacing

    @property
    def envelope_zero_positions(self):
        return self.metrics.envelope_zero_positions

    def to_dict(self) -> dict:
        h, m, f = self.histogram, self.metrics, self.fit
        return {
            "provenance": {"seed": self.seed, "config_digest": self.config_digest,
                           "n_particles": self.n_particles},
            "histogram": {"edges_m": h.edges.tolist(), "counts": h.counts.astype(int).tolist(),
                          "expected": h.expected.tolist()},
            "fringe_spacing_m": m.fringe_spacing,
            "peak_spacing_m": m.peak_spacing,
            "peak_positions_m": m.peak_positions,
            "empirical_peaks_m": m.empirical_peaks,
            "dark_fringe_positions_m": m.dark_fringe_positions,
            "envelope_zero_positions_m": m.envelope_zero_positions,
            "chi_square": f.statistic,
            "dof": f.dof,
            "critical_value": f.critical,
            "verdict": None if f.passed is None else ("pass" if f.passed else "fail"),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _generate_chunk(screen: ScreenModel, seed: int, ids: np.ndarray) -> dict:
    c = screen.config
    slit, y_eps = sample_launches(c.geometry, seed, ids)
    theta = sample_thetas(screen.table, seed, ids)
    y_det, x_det, flight = propagate_arrays(slit, y_eps, theta, c.geometry, c.beam,
                                            c.propagation_mode)
    return {"particle_id": ids.astype(np.int64), "slit_index": slit.astype(np.int64),
            "y_eps": y_eps, "theta": theta, "y_det": y_det, "x_det": x_det,
            "flight_scale": flight}


def generate_events(screen: ScreenModel, seed: int, n: int, workers: int = 1) -> dict:
    """Event arrays for particles 0..n-1; identical for any ``workers``."""
    ids = np.arange(n, dtype=np.uint64)
    chunks = [ch for ch in np.array_split(ids, max(1, workers)) if ch.size]
    if workers <= 1 or len(chunks) == 1:
        parts = [_generate_chunk(screen, seed, ch) for ch in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ch: _generate_chunk(screen, seed, ch), chunks))
    return {k: np.concatenate([p[k] for p in parts]) for k in EVENT_FIELDS}


def histogram_events(screen: ScreenModel, y_det) -> ScreenHistogram:
    lo, hi = screen.support
    # launch-edge rounding can nudge a hit a few ulp past the analytic support
    counts, _ = np.histogram(np.clip(y_det, lo, hi), bins=screen.edges)
    n = len(y_det)
    return ScreenHistogram(screen.edges.copy(), counts, screen.expected_counts(n))


def _refine_extremum(x, y, i):
    """Vertex of the parabola through samples i-1, i, i+1."""
    if i <= 0 or i >= len(y) - 1:
        return float(x[i])
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0:
        return float(x[i])
    return float(x[i] + 0.5 * (y0 - y2) / denom * (x[1] - x[0]))


def _local_extrema(x, y, kind):
    inner = slice(1, -1)
    if kind == "max":
        mask = (y[inner] > y[:-2]) & (y[inner] >= y[2:])
    else:
        mask = (y[inner] < y[:-2]) & (y[inner] <= y[2:])
    idx = np.nonzero(mask)[0] + 1
    return [_refine_extremum(x, y, i) for i in idx]


def envelope_zero_offsets(screen: ScreenModel) -> list:
    """Offsets where the single-slit factor vanishes: sin(theta) = 2 k lambda0 / a, k >= 1."""
    c = screen.config
    out = []
    k = 1
    step = 2.0 * c.beam.lambda0 / c.geometry.width
    while k * step <= math.sin(c.theta_max):
        th = math.asin(k * step)
        out.extend([-float(screen.offset_of(th)), float(screen.offset_of(th))])
        k += 1
    return sorted(out)


def empirical_peak(hist: ScreenHistogram, lo: float, hi: float) -> float | None:
    """Histogram peak in [lo, hi]: vertex of a least-squares parabola through the bins.

    Falls back to the tallest bin when the fit has no maximum inside the window.
    """
    centers = hist.centers
    sel = np.nonzero((centers >= lo) & (centers <= hi))[0]
    if sel.size == 0:
        return None
    counts = hist.counts[sel].astype(float)
    tallest = float(centers[sel[np.argmax(counts)]])
    if sel.size < 3:
        return tallest
    x0 = 0.5 * (lo + hi)
    scale = 0.5 * (hi - lo)
    u = (centers[sel] - x0) / scale
    c2, c1, _ = np.polyfit(u, counts, 2)
    if c2 >= 0:
        return tallest
    vertex = x0 - 0.5 * c1 / c2 * scale
    return float(vertex) if lo <= vertex <= hi else tallest


def fringe_metrics(hist: ScreenHistogram, screen: ScreenModel) -> FringeMetrics:
    """Analytic fringe geometry on the screen plus histogram peak estimates.

    ``fringe_spacing`` is the mean gap between adjacent dark fringes inside
    the central diffraction envelope; dark fringes are exact zeros of the
    two-slit factor, so the gap is free of the envelope's pull. Bright
    maxima of the product are drawn toward the centre by the envelope and
    are reported separately as ``peak_positions`` / ``peak_spacing``.
    """
    c = screen.config
    mid = c.geometry.midpoint
    s_lo, s_hi = screen._s[0], screen._s[-1]
    s = np.linspace(s_lo, s_hi, SCAN_POINTS)
    theta = np.arcsin(np.clip(s / (c.beam.a0 * c.geometry.screen_distance), -1, 1)) \
        if c.propagation_mode == PAPER else np.arctan(s / c.geometry.screen_distance)
    mapped = screen.model.density(theta)

    env_zeros = [z + mid for z in envelope_zero_offsets(screen)]
    first_zero = min((abs(z - mid) for z in env_zeros), default=math.inf)

    dark, spacing = [], None
    if c.geometry.separation > 0:
        dark = [v + mid for v in _local_extrema(s, mapped, "min")]
        central = [v for v in dark if abs(v - mid) < first_zero]
        if len(central) >= 2:
            spacing = float(np.mean(np.diff(central)))

    y = np.linspace(*screen.support, SCAN_POINTS)
    sd = screen.screen_density(y)
    peaks = _local_extrema(y, sd, "max")
    peak_spacing = None
    if c.geometry.separation > 0:
        central_peaks = [p for p in peaks if abs(p - mid) < first_zero]
        if len(central_peaks) >= 3:
            peak_spacing = float(np.mean(np.diff(central_peaks)))
        if len(peaks) < 3:
            spacing = None

    emp = []
    if len(peaks) >= 1 and hist.counts.sum() > 0:
        tall = float(np.max(screen.screen_density(np.asarray(peaks))))
        for i, p in enumerate(peaks):
            if screen.screen_density(np.asarray([p]))[0] < PEAK_HEIGHT_FRACTION * tall:
                continue
            left = 0.5 * (p + peaks[i - 1]) if i > 0 else screen.support[0]
            right = 0.5 * (p + peaks[i + 1]) if i + 1 < len(peaks) else screen.support[1]
            # fit the bright part of the fringe (+-0.3 of the peak gap), never fewer than three bins
            half = max(0.3 * (right - left), 1.5 * hist.bin_width)
            e = empirical_peak(hist, p - half, p + half)
            if e is not None:
                emp.append([p, e])

    return FringeMetrics(spacing, peak_spacing, peaks, dark, env_zeros, emp)


def goodness_of_fit(hist: ScreenHistogram) -> ChiSquareResult:
    n = int(hist.counts.sum())
    if n < MIN_EVENTS_FOR_VERDICT:
        return ChiSquareResult(None, None, None, None, 0)
    return pearson_chi_square(hist.counts, hist.expected)


def summarize(screen: ScreenModel, events: dict, seed: int) -> RunSummary:
    hist = histogram_events(screen, events["y_det"])
    return RunSummary(hist, fringe_metrics(hist, screen), goodness_of_fit(hist), seed,
                      screen.config.physics_digest(), len(events["y_det"]))


def run(config: RunConfig, workers: int = 1, screen: ScreenModel | None = None):
    """Generate ``config.n_particles`` events and their :class:`RunSummary`."""
    screen = ScreenModel(config) if screen is None else screen
    events = generate_events(screen, config.seed, config.n_particles, workers)
    return events, summarize(screen, events, config.seed)


def screen_extent(config: RunConfig) -> float:
    """Analytic width of the mapped angular range on the screen, 2 |offset(theta_max)|."""
    return 2.0 * abs(float(screen_offset(config.theta_max, config.geometry, config.beam,
                                         config.propagation_mode)))
