"""Command-line entry point: ``pfslit simulate|density|analyze``."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import svg
from .config import load_config
from .experiment import ConfigError, RunConfig, ScreenModel, run, summarize
from .quadrature import QuadratureError
from .sampler import SLOT_DISPLAY, uniforms
from .wavefield import DENSITY_MODES, AngularDensityModel, FixedPointError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

CSV_HEADER = ("particle_id", "slit_index", "y_eps_m", "theta_rad", "y_det_m", "x_det_m")
_CSV_SOURCE = ("particle_id", "slit_index", "y_eps", "theta", "y_det", "x_det")


class EventFileError(ValueError):
    pass


def _g17(v: float) -> str:
    return format(float(v), ".17g")


def write_events_csv(path: Path, events: dict, config: RunConfig) -> None:
    n = len(events["particle_id"])
    with open(path, "w", newline="") as fh:
        fh.write(f"# config_digest={config.physics_digest()}\n")
        fh.write(f"# seed={config.seed}\n")
        fh.write(f"# n_particles={n}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        cols = [events[k] for k in _CSV_SOURCE]
        for i in range(n):
            w.writerow([int(cols[0][i]), int(cols[1][i])] + [_g17(c[i]) for c in cols[2:]])


def read_events_csv(path: Path) -> tuple[dict, dict]:
    """Parse an events file; returns ``(meta, columns)``. Raises :class:`EventFileError`."""
    meta = {}
    rows = []
    try:
        with open(path, newline="") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise EventFileError(str(exc)) from None
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
        else:
            body.append(line)
    reader = csv.reader(body)
    header = next(reader, None)
    if tuple(header or ()) != CSV_HEADER:
        raise EventFileError(f"unexpected header {header!r}")
    for lineno, row in enumerate(reader, 2):
        if len(row) != len(CSV_HEADER):
            raise EventFileError(f"row {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        try:
            rows.append((int(row[0]), int(row[1]), *map(float, row[2:])))
        except ValueError as exc:
            raise EventFileError(f"row {lineno}: {exc}") from None
    for key in ("config_digest", "seed", "n_particles"):
        if key not in meta:
            raise EventFileError(f"missing '# {key}=' header line")
    try:
        meta["seed"] = int(meta["seed"])
        meta["n_particles"] = int(meta["n_particles"])
    except ValueError:
        raise EventFileError("malformed seed or n_particles header") from None
    if len(rows) != meta["n_particles"]:
        raise EventFileError(f"expected {meta['n_particles']} rows, found {len(rows)} (truncated?)")
    cols = {k: np.array([r[i] for r in rows]) for i, k in enumerate(_CSV_SOURCE)}
    return meta, cols


def _panels(out_dir: Path, screen: ScreenModel, events: dict, summary) -> None:
    c = screen.config
    h = summary.histogram
    (out_dir / "histogram.svg").write_text(svg.histogram_svg(
        h.edges, h.counts, h.expected,
        title=f"Cross section of the pattern, {c.n_particles} particles"))
    theta = np.linspace(-c.theta_max, c.theta_max, 2001)
    (out_dir / "density.svg").write_text(svg.curve_svg(
        theta, screen.model.density(theta), title="Angular distribution |psi(theta)|^2"))
    # transverse coordinate is display jitter only; physically z is fixed at z0
    jitter = uniforms(c.seed, events["particle_id"].astype(np.uint64), SLOT_DISPLAY)
    (out_dir / "impacts.svg").write_text(svg.scatter_svg(
        events["y_det"], jitter, screen.support, (0.0, 1.0),
        title="Impacts on the detecting screen"))


def cmd_simulate(args) -> int:
    config = load_config(args.config, seed=args.seed, particles=args.particles)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    screen = ScreenModel(config)
    events, summary = run(config, workers=args.workers, screen=screen)
    write_events_csv(out_dir / "events.csv", events, config)
    (out_dir / "summary.json").write_text(summary.to_json())
    _panels(out_dir, screen, events, summary)
    return EXIT_OK


def cmd_density(args) -> int:
    config = load_config(args.config)
    if args.points < 2:
        raise ConfigError("--points must be >= 2")
    mode = args.mode or config.density_mode
    model = AngularDensityModel(config.beam, config.geometry, config.field, config.theta_max, mode)
    theta = np.linspace(-config.theta_max, config.theta_max, args.points)
    dens = model.density(theta)
    lines = ["theta_rad,density_per_rad"] + [f"{_g17(t)},{_g17(d)}" for t, d in zip(theta, dens)]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        meta, cols = read_events_csv(Path(args.events))
    except EventFileError as exc:
        raise ConfigError(f"{args.events}: {exc}") from None
    config = load_config(args.config, seed=meta["seed"], particles=max(1, meta["n_particles"]))
    if meta["config_digest"] != config.physics_digest():
        raise ConfigError(f"events were produced with config digest {meta['config_digest']}, "
                          f"but {args.config} has digest {config.physics_digest()}")
    screen = ScreenModel(config)
    text = summarize(screen, cols, meta["seed"]).to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pfslit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate events, summary and figure panels")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--particles", type=int)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("density", help="tabulate the normalized angular density")
    p.add_argument("--config", required=True)
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--mode", choices=DENSITY_MODES)
    p.add_argument("--out")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("analyze", help="recompute the run summary from an events file")
    p.add_argument("--events", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"pfslit: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FixedPointError, QuadratureError, ArithmeticError) as exc:
        print(f"pfslit: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
