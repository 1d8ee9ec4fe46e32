"""CSV tables, JSON metadata sidecars and model configuration files.

Floats are written with ``repr`` (shortest string that round-trips), so a
table read back with the functions below reproduces the written values bit
for bit and reruns produce identical bytes.

Model configuration (JSON), nested or with dotted keys::

    {
      "density": {"kind": "uniform", "params": {}},
      "profile": {"kind": "band", "params": {"width": 0.2}},
      "kernel": {"alpha": 1.0, "eta0": 0.05},
      "resolution": 4096
    }

``kernel.C`` (Hoelder constant) is optional; it is estimated by sampling when
absent.  ``kernel.eta0`` defaults to 5% of the support width.

Density kinds and their params: ``uniform`` and ``triangular`` (none),
``semicircle`` (``variance``), ``tabulated`` (``grid``, ``values``).
Profile kinds: ``constant`` (``value``), ``band`` (``width``), ``tabulated``
(``table``, a square list of lists on a uniform grid of ``[0, 1]``).
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .model import (DEFAULT_RESOLUTION, LimitDensity, ModelError, ModelSpec, VarianceProfile,
                    build_model)

CORRECTION_HEADER = ("s", "F", "dF", "flag")
DENSITY_HEADER = ("s", "density", "cdf")
EIGENVALUE_HEADER = ("replicate_id", "index", "lambda")
SHIFT_HEADER = ("s", "shift_mean", "shift_stderr", "F_theory")
RESIDUAL_HEADER = ("s", "t", "residual")
SEMIGROUP_HEADER = ("s", "solver_density", "closed_form", "abs_error")

MODEL_KEYS = {"density.kind", "density.params", "profile.kind", "profile.params",
              "kernel.alpha", "kernel.eta0", "kernel.C", "resolution"}


class ConfigError(ValueError):
    """Malformed or unknown configuration entries."""


def _fmt(x) -> str:
    if isinstance(x, (str, np.str_)):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row has {len(row)} fields, header has {len(header)}")
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path, header=None, text_columns=()) -> dict[str, np.ndarray]:
    """Columns of a CSV file keyed by header name; numeric unless listed in ``text_columns``."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    found = tuple(rows[0])
    if header is not None and found != tuple(header):
        raise ValueError(f"{path}: header {found} does not match {tuple(header)}")
    cols = list(zip(*rows[1:])) if len(rows) > 1 else [()] * len(found)
    out = {}
    for name, col in zip(found, cols):
        out[name] = np.array(col, dtype=str) if name in text_columns else np.array(col, dtype=float)
    return out


# --------------------------------------------------------------------------- tables


def write_correction(path, table) -> Path:
    return write_csv(path, CORRECTION_HEADER, zip(table.grid, table.F, table.dF, table.flags))


def read_correction(path):
    from .correction import CorrectionTable
    c = read_csv(path, CORRECTION_HEADER, text_columns=("flag",))
    return CorrectionTable(c["s"], c["F"], c["dF"], c["flag"])


def write_density(path, table) -> Path:
    return write_csv(path, DENSITY_HEADER, zip(table.s, table.density, table.cdf))


def read_density(path, smoothing_eta: float = float("nan")):
    from .cauchy import DensityTable
    c = read_csv(path, DENSITY_HEADER)
    return DensityTable(c["s"], c["density"], c["cdf"], smoothing_eta)


def write_eigenvalues(path, samples) -> Path:
    def rows():
        for smp in samples:
            for i, lam in enumerate(smp.eigenvalues):
                yield smp.replicate_id, i, lam
    return write_csv(path, EIGENVALUE_HEADER, rows())


def read_eigenvalues(path) -> dict[int, np.ndarray]:
    """Eigenvalues per replicate id, in index order."""
    c = read_csv(path, EIGENVALUE_HEADER)
    out = {}
    for r in np.unique(c["replicate_id"]).astype(int):
        sel = c["replicate_id"] == r
        order = np.argsort(c["index"][sel], kind="stable")
        out[int(r)] = c["lambda"][sel][order]
    return out


def write_shift(path, table, F_theory) -> Path:
    return write_csv(path, SHIFT_HEADER, zip(table.s, table.mean, table.stderr, F_theory))


def read_shift(path) -> dict[str, np.ndarray]:
    return read_csv(path, SHIFT_HEADER)


def write_residual(path, table) -> Path:
    return write_csv(path, RESIDUAL_HEADER, table.rows())


def read_residual(path) -> dict[str, np.ndarray]:
    return read_csv(path, RESIDUAL_HEADER)


def write_semigroup(path, s, solved, exact) -> Path:
    return write_csv(path, SEMIGROUP_HEADER, zip(s, solved, exact, np.abs(np.asarray(solved) - exact)))


def read_semigroup(path) -> dict[str, np.ndarray]:
    return read_csv(path, SEMIGROUP_HEADER)


def write_metadata(path, **fields) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(fields, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def read_metadata(path) -> dict:
    return json.loads(Path(path).read_text())


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# --------------------------------------------------------------------------- config


def flatten(data: dict, prefix: str = "", stop=("params",)) -> dict:
    """Dotted view of a nested mapping; ``params`` values are kept whole."""
    out = {}
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict) and name.rsplit(".", 1)[-1] not in stop:
            out.update(flatten(value, name + ".", stop))
        else:
            if name in out:
                raise ConfigError(f"duplicate key {name!r}")
            out[name] = value
    return out


def _density(kind: str, params: dict) -> LimitDensity:
    allowed = {"uniform": set(), "triangular": set(), "semicircle": {"variance"},
               "tabulated": {"grid", "values"}}
    if kind not in allowed:
        raise ConfigError(f"unknown density kind {kind!r}")
    extra = set(params) - allowed[kind]
    if extra:
        raise ConfigError(f"unknown density params for {kind}: {sorted(extra)}")
    if kind == "uniform":
        return LimitDensity.uniform()
    if kind == "triangular":
        return LimitDensity.triangular()
    if kind == "semicircle":
        return LimitDensity.semicircle(float(params.get("variance", 1.0)))
    if not {"grid", "values"} <= set(params):
        raise ConfigError("tabulated density needs 'grid' and 'values'")
    return LimitDensity.tabulated(params["grid"], params["values"])


def _profile(kind: str, params: dict) -> VarianceProfile:
    allowed = {"constant": {"value"}, "band": {"width"}, "tabulated": {"table"}}
    if kind not in allowed:
        raise ConfigError(f"unknown profile kind {kind!r}")
    extra = set(params) - allowed[kind]
    if extra:
        raise ConfigError(f"unknown profile params for {kind}: {sorted(extra)}")
    if kind == "constant":
        return VarianceProfile.constant(float(params.get("value", 1.0)))
    if kind == "band":
        if "width" not in params:
            raise ConfigError("band profile needs 'width'")
        return VarianceProfile.band(float(params["width"]))
    if "table" not in params:
        raise ConfigError("tabulated profile needs 'table'")
    return VarianceProfile.tabulated(params["table"])


def model_from_config(data: dict, name: str = "config") -> ModelSpec:
    """Build a model from a (nested or dotted) mapping; unknown keys raise :class:`ConfigError`."""
    flat = flatten(data)
    unknown = set(flat) - MODEL_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    for key in ("density.kind", "profile.kind"):
        if key not in flat:
            raise ConfigError(f"missing required key {key!r}")
    dparams = flat.get("density.params") or {}
    pparams = flat.get("profile.params") or {}
    if not isinstance(dparams, dict) or not isinstance(pparams, dict):
        raise ConfigError("params entries must be objects")
    resolution = flat.get("resolution", DEFAULT_RESOLUTION)
    if not isinstance(resolution, int) or resolution < 2:
        raise ConfigError("resolution must be an integer >= 2")
    try:
        rho = _density(flat["density.kind"], dparams)
        profile = _profile(flat["profile.kind"], pparams)
        C = flat.get("kernel.C")
        return build_model(rho, profile, resolution, alpha=float(flat.get("kernel.alpha", 1.0)),
                           eta0=flat.get("kernel.eta0"), C=None if C is None else float(C), name=name)
    except ModelError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    return data
