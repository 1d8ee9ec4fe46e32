"""Command-line front end: ``bandpert {theory,solve,simulate,burgers,validate}``.

Every command writes plot-ready CSV files and a ``metadata.json`` sidecar to
``--out``.  Parameters come from command-line flags, then the ``run`` section
of ``--config``, then built-in defaults.  Exit codes: 0 success, 1 usage
error, 2 numerical failure, 3 hypothesis-validation failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import io
from .burgers import burgers_residual, semicircle_flow, semigroup_table
from .cauchy import ConvergenceError, InvariantError, SolverConfig, stieltjes_invert
from .correction import HypothesisError, F_values, correction_F
from .eigen import EigenSolverError
from .hilbert import PvQuadratureConfig
from .matrix_sim import replicate_average, run_replicates, sample_perturbed
from .model import (ModelError, ModelSpec, semicircle_model, triangular_goe_model,
                    uniform_band_model, validate_hypotheses)

log = logging.getLogger("bandpert")

EXAMPLES = ("uniform-band", "triangular-goe", "semicircle")
EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_HYPOTHESIS = 0, 1, 2, 3

# command parameters that may also come from the config file's "run" section
RUN_KEYS = {
    "theory": {"grid_points", "exclusion_eta", "nodes"},
    "solve": {"eps", "smoothing_eta", "grid_points", "s_min", "s_max", "tol", "nodes", "max_iter"},
    "simulate": {"n", "eps", "replicates", "grid_points", "eigensolver", "seed"},
    "burgers": {"c", "t_grid", "ds", "semigroup", "t", "smoothing_eta"},
    "validate": {"samples"},
}
DEFAULTS = {
    "grid_points": None, "exclusion_eta": None, "nodes": None, "eps": None, "smoothing_eta": None,
    "s_min": None, "s_max": None, "tol": 1e-12, "max_iter": 20000, "n": None, "replicates": 20, "eigensolver": "lapack",
    "c": None, "t_grid": "0:0.2:0.05", "ds": 0.02, "semigroup": False, "t": None, "samples": 1000,
    "seed": 0,
}


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("model")
    g.add_argument("--example", choices=EXAMPLES, help="built-in model")
    g.add_argument("--ell", type=float, help="band width for uniform-band (default 0.2)")
    g.add_argument("--semicircle-c", type=float, help="variance of the semicircle example (default 1)")
    g.add_argument("--config", type=Path, help="JSON file with a model and an optional 'run' section")
    g.add_argument("--resolution", type=int, help="table resolution of f and tau")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default ./out)")
    p.add_argument("--seed", type=int, help="64-bit seed (default 0)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads (default: available CPUs)")
    p.add_argument("-v", "--verbose", action="store_true", help="log solver diagnostics to stderr")


def build_parser() -> Parser:
    parser = Parser(prog="bandpert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    p = sub.add_parser("theory", help="tabulate the first-order correction F")
    _common(p)
    p.add_argument("--grid-points", type=int, help="points of the uniform grid (default 401)")
    p.add_argument("--exclusion-eta", type=float, help="principal-value window half-width")
    p.add_argument("--nodes", type=int, help="quadrature nodes per unit length")

    p = sub.add_parser("solve", help="density of the perturbed law from the self-consistent equation")
    _common(p)
    p.add_argument("--eps", type=float, help="perturbation size (default 0)")
    p.add_argument("--smoothing-eta", type=float, help="inversion height (default 1e-3 x support width)")
    p.add_argument("--grid-points", type=int, help="points of the s grid (default 401)")
    p.add_argument("--s-min", type=float)
    p.add_argument("--s-max", type=float)
    p.add_argument("--tol", type=float, help="solver tolerance (default 1e-12)")
    p.add_argument("--nodes", type=int, help="minimum x-grid size of the solver")
    p.add_argument("--max-iter", type=int, help="iteration cap per point (default 20000)")

    p = sub.add_parser("simulate", help="Monte Carlo eigenvalues and the scaled CDF shift")
    _common(p)
    p.add_argument("--n", type=int, help="matrix size")
    p.add_argument("--eps", type=float, help="perturbation size")
    p.add_argument("--replicates", type=int, help="number of replicates (default 20)")
    p.add_argument("--grid-points", type=int, help="points of the shift grid (default 481)")
    p.add_argument("--eigensolver", choices=("lapack", "householder-ql"))

    p = sub.add_parser("burgers", help="Burgers residual of the semicircle flow, or the semigroup check")
    _common(p)
    p.add_argument("--c", type=float, help="initial semicircle variance (required)")
    p.add_argument("--t-grid", help="time grid a:b:step, endpoints included (default 0:0.2:0.05)")
    p.add_argument("--ds", type=float, help="spacing of the s grid (default 0.02)")
    p.add_argument("--semigroup", action="store_true", default=None,
                   help="compare the solver with the semicircle of variance c + t instead")
    p.add_argument("--t", type=float, help="time for --semigroup")
    p.add_argument("--smoothing-eta", type=float, help="inversion height for --semigroup (default 1e-3)")

    p = sub.add_parser("validate", help="check the model hypotheses")
    _common(p)
    p.add_argument("--samples", type=int, help="sample count of the Hoelder check (default 1000)")
    return parser


# --------------------------------------------------------------------------- config resolution


def _settings(args) -> tuple[dict, dict]:
    """Merge flags, the config file's run section and defaults; return (settings, model config)."""
    data = io.load_config(args.config) if args.config else {}
    run = dict(data.pop("run", {}) or {})
    allowed = RUN_KEYS[args.command] | {"ell", "semicircle_c", "example", "seed"}
    unknown = set(run) - allowed
    if unknown:
        raise io.ConfigError(f"unknown keys in run section for {args.command}: {sorted(unknown)}")
    merged = dict(DEFAULTS)
    merged.update(run)
    for key, value in vars(args).items():
        if value is not None:
            merged[key] = value
    return merged, data


def _model(settings: dict, model_cfg: dict, resolution) -> ModelSpec:
    example = settings.get("example")
    if example is None and model_cfg:
        return io.model_from_config(model_cfg, name=str(settings.get("config") or "config"))
    if example is None and settings.get("semicircle_c") is not None:
        example = "semicircle"
    if example is None:
        raise UsageError("choose a model with --example, --semicircle-c or --config")
    kw = {} if resolution is None else {"resolution": resolution}
    if example == "uniform-band":
        ell = settings.get("ell")
        ell = 0.2 if ell is None else ell
        if not 0.0 < ell <= 1.0:
            raise UsageError(f"--ell must lie in (0, 1], got {ell}")
        return uniform_band_model(ell, **kw)
    if example == "triangular-goe":
        return triangular_goe_model(**kw)
    c = settings.get("semicircle_c")
    c = 1.0 if c is None else c
    if not c > 0:
        raise UsageError(f"--semicircle-c must be positive, got {c}")
    return semicircle_model(c, **kw)


def _positive(settings: dict, *names, integer=False, allow_zero=False):
    for name in names:
        v = settings.get(name)
        if v is None:
            continue
        bad = (v < 0) if allow_zero else (v <= 0)
        if bad or (integer and int(v) != v):
            kind = "a nonnegative" if allow_zero else "a positive"
            raise UsageError(f"--{name.replace('_', '-')} must be {kind}{' integer' if integer else ''}, got {v}")


def parse_t_grid(text: str) -> np.ndarray:
    try:
        a, b, step = (float(x) for x in str(text).split(":"))
    except ValueError:
        raise UsageError(f"--t-grid expects a:b:step, got {text!r}") from None
    if not step > 0 or b <= a or a < 0:
        raise UsageError(f"--t-grid needs 0 <= a < b and step > 0, got {text!r}")
    k = int(round((b - a) / step))
    if abs(a + k * step - b) > 1e-9 * max(1.0, b):
        raise UsageError(f"--t-grid: (b - a) is not a multiple of step in {text!r}")
    if k < 2:
        raise UsageError("--t-grid needs at least three times")
    return a + step * np.arange(k + 1)


def _meta(settings, model: ModelSpec | None, command: str, **extra) -> dict:
    out = {"command": command, "version": __version__}
    if model is not None:
        out["model"] = model.name
        out["model_hash"] = model.digest()
    out.update(extra)
    return out


# --------------------------------------------------------------------------- commands


def cmd_theory(settings, model: ModelSpec, out: Path) -> int:
    _positive(settings, "grid_points", "nodes", integer=True)
    _positive(settings, "exclusion_eta")
    points = int(settings["grid_points"] or 401)
    if points < 3:
        raise UsageError("--grid-points must be at least 3")
    a, b = model.support
    delta = 0.02 * model.width
    grid = np.linspace(a - delta, b + delta, points)
    cfg = PvQuadratureConfig.for_width(model.width)
    if settings["exclusion_eta"] or settings["nodes"]:
        cfg = PvQuadratureConfig(exclusion_eta=settings["exclusion_eta"] or cfg.exclusion_eta,
                                 nodes=settings["nodes"] or cfg.nodes)
    table = correction_F(model, grid, cfg)
    io.write_correction(out / "correction.csv", table)
    io.write_metadata(out / "metadata.json", **_meta(settings, model, "theory", grid_points=points,
                                                       exclusion_eta=cfg.exclusion_eta, nodes=cfg.nodes))
    log.info("wrote %s", out / "correction.csv")
    return EXIT_OK


def cmd_solve(settings, model: ModelSpec, out: Path) -> int:
    eps = settings["eps"] if settings["eps"] is not None else 0.0
    _positive(settings, "eps", allow_zero=True)
    _positive(settings, "smoothing_eta", "tol")
    _positive(settings, "grid_points", "nodes", "max_iter", integer=True)
    eta = settings["smoothing_eta"] or 1e-3 * model.width
    points = int(settings["grid_points"] or 401)
    a, b = model.support
    spread = 2.0 * np.sqrt(eps * model.profile.bound) + 0.1 * model.width
    lo = settings["s_min"] if settings["s_min"] is not None else a - spread
    hi = settings["s_max"] if settings["s_max"] is not None else b + spread
    if not hi > lo or points < 2:
        raise UsageError("s grid is empty: need s_max > s_min and at least 2 points")
    kw = {"tol": settings["tol"], "max_iter": int(settings["max_iter"])}
    if settings["nodes"]:
        kw["nodes"] = int(settings["nodes"])
    table = stieltjes_invert(model, eps, np.linspace(lo, hi, points), eta, SolverConfig(**kw))
    log.info("solve: mass %.6f, max iterations %d", table.mass(), int(table.iterations.max()))
    io.write_density(out / "density.csv", table)
    io.write_metadata(out / "metadata.json", **_meta(settings, model, "solve", eps=eps, smoothing_eta=eta,
                                                       grid_points=points, s_min=lo, s_max=hi))
    return EXIT_OK


def cmd_simulate(settings, model: ModelSpec, out: Path) -> int:
    if settings["n"] is None or settings["eps"] is None:
        raise UsageError("simulate needs --n and --eps")
    _positive(settings, "n", "replicates", "grid_points", "threads", integer=True)
    _positive(settings, "eps")
    _positive(settings, "seed", integer=True, allow_zero=True)
    n, eps, seed = int(settings["n"]), float(settings["eps"]), int(settings["seed"])
    if seed >= 1 << 64:
        raise UsageError("--seed must fit in 64 bits")
    reps = int(settings["replicates"])
    points = int(settings["grid_points"] or 481)
    samples = run_replicates(n, eps, model, seed, reps, threads=int(settings["threads"]),
                             eigensolver=settings["eigensolver"])
    baseline = sample_perturbed(n, 0.0, model, seed)
    a, b = model.support
    grid = np.linspace(a, b, points)
    table = replicate_average(samples, baseline, grid)
    io.write_eigenvalues(out / "eigenvalues.csv", samples)
    io.write_shift(out / "shift.csv", table, F_values(model, grid))
    io.write_metadata(out / "metadata.json", **_meta(settings, model, "simulate", n=n, eps=eps, seed=seed,
                                                       replicates=reps, eigensolver=settings["eigensolver"],
                                                       diagonal_variance="2 sigma^2 (GOE)"))
    return EXIT_OK


def cmd_burgers(settings, out: Path) -> int:
    if settings["c"] is None:
        raise UsageError("burgers needs --c")
    _positive(settings, "c", "ds", "smoothing_eta")
    c = float(settings["c"])
    if settings["semigroup"]:
        if settings["t"] is None:
            raise UsageError("--semigroup needs --t")
        _positive(settings, "t")
        eta = settings["smoothing_eta"] or 1e-3
        s, solved, exact = semigroup_table(c, float(settings["t"]), eta)
        io.write_semigroup(out / "semigroup.csv", s, solved, exact)
        err = float(np.max(np.abs(solved - exact)))
        io.write_metadata(out / "metadata.json", **_meta(settings, None, "burgers-semigroup", c=c,
                                                           t=float(settings["t"]), smoothing_eta=eta,
                                                           sup_error=err))
        print(f"semigroup sup error: {err:.6g}")
        return EXIT_OK
    times = parse_t_grid(settings["t_grid"])
    ds = float(settings["ds"])
    r = 2.0 * np.sqrt(c + times[-1])
    m = int(np.ceil(r / ds)) + 2
    s = ds * np.arange(-m, m + 1)
    table = burgers_residual(semicircle_flow(c, times, s))
    io.write_residual(out / "residual.csv", table)
    worst = table.max_interior()
    io.write_metadata(out / "metadata.json", **_meta(settings, None, "burgers", c=c, t_grid=settings["t_grid"],
                                                       ds=ds, max_interior_residual=worst))
    print(f"max interior residual: {worst:.6g}")
    return EXIT_OK


def cmd_validate(settings, model: ModelSpec, out: Path) -> int:
    _positive(settings, "samples", integer=True)
    report = validate_hypotheses(model, int(settings["samples"]))
    for line in report.lines():
        print(line)
    io.write_metadata(out / "validation.json", **_meta(settings, model, "validate"), report=report.to_dict())
    return EXIT_OK if report.passed else EXIT_HYPOTHESIS


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        settings, model_cfg = _settings(args)
        _positive(settings, "threads", integer=True)
        if settings.get("resolution") is not None and settings["resolution"] < 2:
            raise UsageError("--resolution must be at least 2")
        out = Path(settings["out"])
        if args.command == "burgers":
            return cmd_burgers(settings, out)
        model = _model(settings, model_cfg, settings.get("resolution"))
        handler = {"theory": cmd_theory, "solve": cmd_solve, "simulate": cmd_simulate,
                   "validate": cmd_validate}[args.command]
        return handler(settings, model, out)
    except (UsageError, io.ConfigError, ModelError) as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except HypothesisError as exc:
        print(f"hypothesis check failed: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except ConvergenceError as exc:
        print(f"solver failed: z={exc.z} residual={exc.residual:.3e} iterations={exc.iterations}",
              file=sys.stderr)
        return EXIT_NUMERIC
    except (InvariantError, EigenSolverError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
