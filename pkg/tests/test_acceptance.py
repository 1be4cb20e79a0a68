"""Acceptance criteria, one test (or group) per criterion; each prints a PASS/FAIL line."""

import math
import time

import numpy as np
import pytest
from scipy import integrate

from pfslit.cli import main
from pfslit.config import bundled_config, bundled_config_text
from pfslit.core import (H, SlitGeometry, min_slit_width,
                         pf_total_momentum, solve_particle_momentum, validate_slit_width)
from pfslit.experiment import generate_events, run, screen_extent, summarize
from pfslit.wavefield import (APPROXIMATE, EXACT, AngularDensityModel, FieldParams, alpha,
                              psi_y_closed, psi_y_quadrature, sinc_sq, solve_fixed_point)

from conftest import ELECTRON, PAPER_SETUPS, beam_of, geometry_of, model_of

SEEDS = range(100)


# 1 -------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["electron", "neon"])
def test_c1_single_slit_limit(name, report):
    p = PAPER_SETUPS[name]
    start = time.perf_counter()
    m = model_of(p, separation=0.0)
    t = np.linspace(-m.theta_max, m.theta_max, 1001)
    dens = m.density(t)
    elapsed = time.perf_counter() - start

    shape = lambda th: sinc_sq(alpha(m.beam.p0 * np.sin(th), m.geometry))
    norm, _ = integrate.quad(shape, -m.theta_max, m.theta_max, epsabs=0, epsrel=1e-13, limit=500)
    ref = shape(t) / norm
    err = float(np.max(np.abs(dens - ref)) / ref.max())
    ok = err <= 1e-10 and elapsed < 1.0
    report(f"C1 single-slit limit ({name})", ok, f"max rel err {err:.2e}, {elapsed:.3f} s")
    assert ok


# 2 -------------------------------------------------------------------------

def test_c2_closed_form_vs_quadrature(report):
    geo, field, mass = geometry_of(ELECTRON), FieldParams(5e-5 * ELECTRON["lambda0"]), ELECTRON["mass"]
    p0 = beam_of(ELECTRON).p0
    p_grid = np.linspace(-p0 * math.sin(ELECTRON["theta_max"]), p0 * math.sin(ELECTRON["theta_max"]),
                         101)
    y, t = 1.3e-6, 1e-6
    start = time.perf_counter()
    closed = np.array([abs(psi_y_closed(y, t, p, geo, field)) ** 2 for p in p_grid])
    quad = np.array([abs(psi_y_quadrature(y, t, p, geo, field, mass)) ** 2 for p in p_grid])
    elapsed = time.perf_counter() - start
    k = quad[50] / closed[50]
    err = float(np.max(np.abs(quad - k * closed)) / np.max(k * closed))
    ok = err <= 1e-8 and elapsed < 60
    report("C2 closed form vs quadrature (electron)", ok,
           f"max rel err {err:.2e} after one global constant, {elapsed:.2f} s")
    assert ok


# 3 -------------------------------------------------------------------------

@pytest.mark.parametrize("mode", [APPROXIMATE, EXACT])
def test_c3_energy_conservation(mode, report):
    rng = np.random.default_rng(2024)
    beam, geo = beam_of(ELECTRON), geometry_of(ELECTRON)
    n = 10 ** 4
    theta = rng.uniform(-ELECTRON["theta_max"], ELECTRON["theta_max"], n)
    c_f = ELECTRON["lambda0"] * 10.0 ** rng.uniform(-8, -1, n)
    start = time.perf_counter()
    if mode == EXACT:
        p_particle = np.empty(n)
        for i in range(n):
            p_particle[i], _ = solve_fixed_point(theta[i], beam, geo, c_f[i])
    else:
        p_particle = np.full(n, beam.p0)
    model = AngularDensityModel(beam, geo, FieldParams(1.0), ELECTRON["theta_max"])
    shape = np.array([model.shape(th) if mode == APPROXIMATE else
                      _shape_at(th, p, geo) for th, p in zip(theta, p_particle)])
    chi_sq = 4 * c_f ** 2 * shape
    p_p = solve_particle_momentum(beam, chi_sq)
    p_total = pf_total_momentum(p_p, chi_sq)
    elapsed = time.perf_counter() - start
    err = float(np.max(np.abs(p_total - H / beam.lambda0) / (H / beam.lambda0)))
    ok = err <= 1e-10 and elapsed < 5
    report(f"C3 energy conservation ({mode})", ok, f"max rel err {err:.2e}, {elapsed:.2f} s")
    assert ok


def _shape_at(theta, p_particle, geo):
    from pfslit.wavefield import phi
    p_py = p_particle * math.sin(theta)
    return sinc_sq(alpha(p_py, geo)) * math.cos(0.5 * phi(p_py, geo)) ** 2


# 4 -------------------------------------------------------------------------

def _carrier_spacing(name):
    p = PAPER_SETUPS[name]
    return 2 * p["a0"] * p["screen"] * p["lambda0"] / p["separation"]


@pytest.mark.parametrize("name", ["electron", "neon"])
def test_c4_fringe_spacing(name, screens, report):
    sc = screens[name]
    start = time.perf_counter()
    _, summary = run(sc.config, screen=sc)
    elapsed = time.perf_counter() - start
    expected = _carrier_spacing(name)
    got = summary.fringe_spacing
    rel = abs(got - expected) / expected
    ok = rel < 5e-3 and elapsed < 10
    report(f"C4 fringe spacing ({name})", ok,
           f"{got:.6e} m vs 2A0*L*lambda0/d = {expected:.6e} m (rel {rel:.1e}), run {elapsed:.2f} s")
    assert ok


@pytest.mark.xfail(strict=True, reason="2A0*L*lambda0/d evaluates to 17.5 um for the electron "
                                       "setup, not the quoted 1.75 um")
def test_c4_electron_spacing_literal_value(screens, report):
    _, summary = run(screens["electron"].config, screen=screens["electron"])
    ok = abs(summary.fringe_spacing - 1.75e-6) / 1.75e-6 < 5e-3
    report("C4 electron spacing equals literal 1.75 um (expected-fail)", ok,
           f"measured {summary.fringe_spacing:.4e} m")
    assert ok


@pytest.mark.xfail(strict=True, reason="the sinc^2 envelope pulls product maxima inward, so bright "
                                       "peaks are not spaced at the carrier period within 0.5%")
def test_c4_bright_peak_spacing(screens, report):
    sc = screens["electron"]
    _, summary = run(sc.config, screen=sc)
    expected = _carrier_spacing("electron")
    mid = sc.config.geometry.midpoint
    first_zero = min(abs(z - mid) for z in summary.envelope_zero_positions)
    peaks = np.array([q for q in summary.metrics.peak_positions if abs(q - mid) < first_zero])
    gaps = np.diff(peaks)
    worst = float(np.max(np.abs(gaps - expected)) / expected)
    ok = worst < 5e-3
    report("C4 bright-maximum spacing at carrier period (expected-fail)", ok,
           f"worst adjacent-peak deviation {worst:.2%} inside the central envelope")
    assert ok


@pytest.mark.parametrize("name", ["electron", "neon"])
def test_c4_envelope_zeros(name, screens, report):
    p = PAPER_SETUPS[name]
    sc = screens[name]
    zeros = sc.config.geometry.midpoint + np.array(
        [s * p["a0"] * p["screen"] * 2 * k * p["lambda0"] / p["width"]
         for k in range(1, 100) for s in (-1, 1)
         if 2 * k * p["lambda0"] / p["width"] <= math.sin(p["theta_max"])])
    _, summary = run(sc.config, screen=sc)
    got = np.array(summary.envelope_zero_positions)
    same = got.size == zeros.size and np.allclose(np.sort(got), np.sort(zeros), rtol=1e-12)
    # the density itself must vanish there
    theta = np.arcsin(np.clip((zeros - sc.config.geometry.midpoint) / (p["a0"] * p["screen"]), -1, 1))
    vanish = bool(np.all(sc.model.density(theta) < 1e-20 * sc.model.peak_density)) if zeros.size \
        else True
    ok = same and vanish
    report(f"C4 envelope zeros ({name})", ok,
           f"{zeros.size} zeros at sin(theta) = +-2k*lambda0/a inside theta_max"
           + ("" if zeros.size else " (none: first zero lies beyond theta_max)"))
    assert ok


def _peak_misses(summary):
    half = 0.5 * summary.histogram.bin_width
    return [(a, e) for a, e in summary.metrics.empirical_peaks if abs(a - e) > half], \
        len(summary.metrics.empirical_peaks)


@pytest.mark.parametrize("name", ["electron", "neon"])
def test_c4_empirical_peaks_bundled_seed(name, screens, report):
    sc = screens[name]
    _, summary = run(sc.config, screen=sc)
    misses, total = _peak_misses(summary)
    ok = total > 0 and not misses
    report(f"C4 empirical peaks within half a bin ({name}, seed {sc.config.seed})", ok,
           f"{total - len(misses)}/{total} peaks")
    assert ok


@pytest.mark.slow
@pytest.mark.parametrize("name", ["electron", "neon"])
def test_c4_empirical_peaks_over_seeds(name, screens, report):
    sc = screens[name]
    hit = total = 0
    for seed in SEEDS:
        events = generate_events(sc, seed, sc.config.n_particles)
        misses, n = _peak_misses(summarize(sc, events, seed))
        hit += n - len(misses)
        total += n
    ok = hit >= 0.98 * total
    report(f"C4 empirical peaks over 100 seeds ({name})", ok,
           f"{hit}/{total} peaks within half a bin")
    assert ok


# 5 -------------------------------------------------------------------------

@pytest.mark.slow
@pytest.mark.parametrize("name", ["electron", "neon"])
def test_c5_chi_square_reproduction(name, screens, report):
    sc = screens[name]
    passes = 0
    for seed in SEEDS:
        events = generate_events(sc, seed, 5000)
        passes += bool(summarize(sc, events, seed).verdict)
    ok = passes >= 98
    report(f"C5 chi-square at 0.01 ({name})", ok, f"{passes}/100 seeds pass")
    assert ok


# 6 -------------------------------------------------------------------------

def test_c6_neon_screen_extent(report):
    extent = screen_extent(bundled_config("neon"))
    rel = abs(extent - 3.2e-3) / 3.2e-3
    ok = abs(extent - 3.55e-3) < 0.01e-3 and rel <= 0.20
    report("C6 neon screen extent", ok, f"{extent * 1e3:.3f} mm vs about 3.2 mm ({rel:.1%})")
    assert ok


@pytest.mark.xfail(strict=True, reason="2*A0*L*sin(theta_max) is 0.44 mm for the electron setup; "
                                       "the quoted 0.16 mm cannot be recovered")
def test_c6_electron_screen_extent(report):
    extent = screen_extent(bundled_config("electron"))
    assert extent == pytest.approx(4.398e-4, rel=1e-3)
    ok = abs(extent - 0.16e-3) / 0.16e-3 <= 0.20
    report("C6 electron screen extent vs 0.16 mm (expected-fail)", ok,
           f"derived {extent * 1e3:.3f} mm")
    assert ok


# 7 -------------------------------------------------------------------------

def test_c7_uncertainty_bound(report):
    results = []
    for name in ("electron", "neon"):
        cfg = bundled_config(name)
        results.append(validate_slit_width(cfg.beam, cfg.geometry).passed)
        narrow = SlitGeometry.symmetric(cfg.beam.lambda0 / 10, 1e-6, 1.0)
        results.append(not validate_slit_width(cfg.beam, narrow).passed)
        bound = 3 * cfg.beam.lambda0 / (2 * math.pi)
        assert bound == min_slit_width(cfg.beam.lambda0)
        at = SlitGeometry.symmetric(bound, 1e-6, 1.0)
        below = SlitGeometry.symmetric(float(np.nextafter(bound, 0)), 1e-6, 1.0)
        results.append(validate_slit_width(cfg.beam, at).passed)
        results.append(not validate_slit_width(cfg.beam, below).passed)
    ok = all(results)
    report("C7 slit-width bound", ok, "bundled pass, lambda0/10 fails, flip at 3*lambda0/(2pi) "
           "within 1 ulp")
    assert ok


# 8 -------------------------------------------------------------------------

def test_c8_cli_byte_identical(tmp_path, report):
    cfg = tmp_path / "neon.json"
    cfg.write_text(bundled_config_text("neon"))
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        assert main(["simulate", "--config", str(cfg), "--seed", "7", "--out-dir", str(d)]) == 0
    names = ["events.csv", "summary.json", "histogram.svg", "density.svg", "impacts.svg"]
    same = [(dirs[0] / n).read_bytes() == (dirs[1] / n).read_bytes() for n in names]
    ok = all(same)
    report("C8 byte-identical CLI outputs", ok, f"{sum(same)}/{len(names)} files identical")
    assert ok


def test_c8_worker_counts(screens, report):
    sc = screens["electron"]
    texts = [run(sc.config, workers=w, screen=sc)[1].to_json() for w in (1, 2, 8)]
    ok = texts[0] == texts[1] == texts[2]
    report("C8 workers 1/2/8 give identical summary", ok, f"{len(texts[0])} bytes each")
    assert ok


# 9 -------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["electron", "neon"])
def test_c9_exact_vs_approximate(name, report):
    cfg = bundled_config(name)
    approx = AngularDensityModel(cfg.beam, cfg.geometry, cfg.field, cfg.theta_max, APPROXIMATE)
    exact = AngularDensityModel(cfg.beam, cfg.geometry, cfg.field, cfg.theta_max, EXACT)
    t = np.linspace(-cfg.theta_max, cfg.theta_max, 20001)
    gap = float(np.max(np.abs(exact.density(t) - approx.density(t))) / approx.peak_density)
    _, iterations = solve_fixed_point(t, cfg.beam, cfg.geometry, cfg.field.c_f)
    ok = gap < 1e-5 and iterations <= 10
    report(f"C9 exact vs approximate density ({name})", ok,
           f"sup-norm rel gap {gap:.2e}, fixed point in {iterations} iterations")
    assert ok
