"""Command-line entry point: ``gibcfm {simulate,contaminate,invert,oracle-circle,pipeline}``.

Exit codes: 0 success, 1 runtime failure, 2 configuration error.
"""

import argparse
import hashlib
import json
import logging
import os
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import config as cfgmod
from .data import NoiseSpec, contaminate, read_farfield, write_farfield
from .errors import ConfigError, GibcError
from .factorization import run_inversion
from .forward import circle_series_oracle, solve_forward
from .layers import points_per_wavelength
from .geometry import CurveGrid
from .report import write_csv, write_pgm

logger = logging.getLogger("gibcfm")

THREADS_ENV = "GIBCFM_THREADS"


def _threads(args):
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _load_config(args):
    cfg = cfgmod.load(args.config) if getattr(args, "config", None) else cfgmod.resolve()
    over = {}
    if getattr(args, "k", None) is not None:
        over["k"] = args.k
    if getattr(args, "mu", None) is not None:
        over["impedance"] = {"mu": {"re": args.mu, "im": 0.0}}
    noise = {}
    if getattr(args, "eta", None) is not None:
        noise["eta"] = args.eta
    if getattr(args, "seed", None) is not None:
        noise["seed"] = args.seed
    if noise:
        over["noise"] = noise
    return cfgmod.resolve(cfgmod._merge(cfg, over)) if over else cfg


def _simulate(cfg):
    sc = cfgmod.scattering_config(cfg)
    U = solve_forward(sc)
    grid = CurveGrid.build(sc.curve, sc.m)
    ppw = points_per_wavelength(grid, sc.k)
    print(f"simulate: k={sc.k:g} n={sc.n} m={sc.m} points/wavelength={ppw:.1f} "
          f"cond_1={U.meta['condition_1norm']:.3e} min_pivot_ratio={U.meta['min_pivot_ratio']:.3e}")
    return U


def cmd_simulate(args):
    cfg = _load_config(args)
    U = _simulate(cfg)
    write_farfield(U, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_contaminate(args):
    U = read_farfield(args.input)
    noisy = contaminate(U, NoiseSpec(args.eta, args.seed))
    write_farfield(noisy, args.out)
    print(f"contaminate: eta={args.eta:g} seed={args.seed} -> {args.out}")
    return 0


def _invert(U, cfg, threads, delta=None, csv_path=None, pgm_path=None, k=None):
    imap = run_inversion(
        U, grid=cfgmod.grid_spec(cfg), k=k,
        delta=cfgmod.delta_value(cfg) if delta is None else delta,
        thetas=cfgmod.theta_set(cfg), imag_abs=cfg["inversion"]["imag_abs"],
        threads=threads)
    if csv_path:
        write_csv(imap, csv_path)
    if pgm_path:
        write_pgm(imap, pgm_path)
    m = imap.meta
    print(f"invert: delta={imap.delta:.6e} lambda_1={m['lambda_1']:.6e} "
          f"morozov fallbacks below={m['morozov_below_interval']} above={m['morozov_above_interval']}")
    return imap


def cmd_invert(args):
    cfg = _load_config(args)
    U = read_farfield(args.input)
    if args.theta_set:
        cfg["inversion"]["theta_set"] = args.theta_set
    if args.paper_form:
        cfg["inversion"]["imag_abs"] = False
    # the data header is authoritative unless a wavenumber was stated explicitly
    k = args.k if args.k is not None else (cfg["k"] if args.config else None)
    _invert(U, cfg, _threads(args), delta=args.delta, csv_path=args.csv, pgm_path=args.pgm, k=k)
    return 0


def cmd_oracle_circle(args):
    U = circle_series_oracle(args.R, args.k, complex(args.mu, args.mu_im),
                             complex(args.lam, args.lam_im), args.n, args.modes)
    write_farfield(U, args.out)
    print(f"oracle-circle: R={args.R:g} k={args.k:g} modes={U.meta['modes']} -> {args.out}")
    return 0


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def cmd_pipeline(args):
    cfg = _load_config(args)
    out = Path(args.out or cfg["output"]["dir"])
    out.mkdir(parents=True, exist_ok=True)
    names = cfg["output"]
    paths = {key: out / names[key] for key in ("farfield", "farfield_noisy", "csv", "pgm", "manifest")}
    U = _simulate(cfg)
    write_farfield(U, paths["farfield"])
    noise = NoiseSpec(cfg["noise"]["eta"], cfg["noise"]["seed"])
    noisy = contaminate(read_farfield(paths["farfield"]), noise)
    write_farfield(noisy, paths["farfield_noisy"])
    imap = _invert(read_farfield(paths["farfield_noisy"]), cfg, _threads(args),
                   csv_path=paths["csv"], pgm_path=paths["pgm"], k=cfg["k"])
    manifest = {
        "config": cfg,
        "config_sha256": cfgmod.config_hash(cfg),
        "seeds": {"noise": noise.seed},
        "versions": {"gibcfm": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
        "forward": {"m": U.meta["m"], "condition_1norm": U.meta["condition_1norm"]},
        "inversion": {key: imap.meta[key] for key in
                      ("delta", "eta", "lambda_1", "eigenvalues_clamped",
                       "morozov_below_interval", "morozov_above_interval")},
        "artifacts": {key: {"path": p.name, "sha256": _sha256(p)}
                      for key, p in paths.items() if key != "manifest"},
    }
    paths["manifest"].write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"pipeline: artifacts in {out}")
    return 0


def _theta_arg(text):
    if text in ("paper", "alt"):
        return text
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("theta set must be 'paper', 'alt' or comma-separated angles")


def _delta_arg(text):
    if text == "auto":
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("delta must be 'auto' or a positive number") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("delta must be positive")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gibcfm",
        description="GIBC scattering simulation and factorization-method reconstruction.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def overrides(p):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--k", type=float, help="override wavenumber")
        p.add_argument("--mu", type=float, help="override (real, constant) mu")

    p = sub.add_parser("simulate", help="compute a far-field matrix")
    overrides(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("contaminate", help="add multiplicative uniform noise")
    p.add_argument("input")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_contaminate)

    p = sub.add_parser("invert", help="indicator map from a far-field file")
    p.add_argument("input")
    p.add_argument("--config")
    p.add_argument("--k", type=float, help="expected wavenumber (checked against the data)")
    p.add_argument("--csv", required=True)
    p.add_argument("--pgm")
    p.add_argument("--delta", type=_delta_arg)
    p.add_argument("--theta-set", type=_theta_arg)
    p.add_argument("--paper-form", action="store_true",
                   help="use |Re F| + Im F instead of |Re F| + |Im F|")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("oracle-circle", help="far-field matrix of a disk from the mode series")
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--k", type=float, default=2.0)
    p.add_argument("--mu", type=float, default=0.1)
    p.add_argument("--mu-im", type=float, default=0.0)
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--lam-im", type=float, default=0.0)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--modes", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_oracle_circle)

    p = sub.add_parser("pipeline", help="simulate, contaminate and invert in one go")
    overrides(p)
    p.add_argument("--eta", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", help="output directory (default from config)")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (GibcError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
