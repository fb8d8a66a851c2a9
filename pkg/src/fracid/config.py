"""Run configuration: the YAML schema and its conversion to library objects.

Every section and key is optional; omitted values take the defaults below.
Unknown keys are rejected so that typos fail loudly.  Time functions are
written as lists of ``[coefficient, exponent]`` pairs.

.. code-block:: yaml

    model:
      example: 1          # built-in benchmark 1 or 2; excludes the fields below
      nu: 0.2             # leading order of the built-in benchmark
      gamma: 0.5          # kernel exponent of benchmark 2
      unknown_rho: true   # benchmark 1: treat the second coefficient as unknown
      # explicit model instead of a benchmark:
      type: I
      terms:
        - {order: lead, coefficient: [[0.5, 0]]}
        - {order: second, coefficient: unknown, sign: -1}
      psi0: 0.0333333333
      gbar: [[1.0, 0]]
      a0: []
      b0: []
      kernel: null
      boundary: []
      d: 0
      truth: null         # exact psi for ``simulate`` with an explicit model
    recon: {...}          # ReconConfig fields, grids as nested mappings
    noise: {kind: ftn, delta: 0.04, sign: plus}
    sampling: {tau: 1.0e-4, count: 21}
    simulate: {source: analytic, nx: 64, nt: 512, horizon: null}  # null: last sampling time
    io: {plot_points: 400}
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Any

import yaml

from .fraccore import PowerSeries
from .identify import ReconConfig
from .model import UNKNOWN_CONSTANT, UNKNOWN_LEAD, UNKNOWN_SECOND, FDOType, ModelSpec, OperatorSpec, Term
from .problems import NoiseKind, NoiseSpec, default_times, example1_truth, example2_truth
from .regularize import RegularizationGrid

__all__ = ["ConfigError", "RunConfig", "DEFAULTS", "load_config", "parse_config"]


class ConfigError(ValueError):
    """Invalid configuration file."""


_GRID_KEYS = {"sigma_start", "sigma_ratio", "sigma_count", "tbar_start", "tbar_ratio", "tbar_count"}

DEFAULTS: dict[str, Any] = {
    "model": {
        "example": None,
        "nu": None,
        "gamma": 0.5,
        "unknown_rho": True,
        "type": "I",
        "terms": None,
        "psi0": None,
        "gbar": None,
        "a0": [],
        "b0": [],
        "kernel": None,
        "boundary": [],
        "d": 0,
        "truth": None,
    },
    "recon": {
        "n_powers": 3,
        "size": 9,
        "betas": None,
        "weight_exponent": 0.99,
        "step1": {
            "sigma_start": 0.5,
            "sigma_ratio": 0.5,
            "sigma_count": 60,
            "tbar_start": None,
            "tbar_ratio": 0.5,
            "tbar_count": 100,
        },
        "step2": {
            "sigma_start": 1.0,
            "sigma_ratio": 0.5,
            "sigma_count": 60,
            "tbar_start": None,
            "tbar_ratio": 0.5,
            "tbar_count": 10,
        },
        "lam": 0.5,
        "t0": None,
        "strategy": "both",
        "refine_halfwidth": 0.05,
        "extrapolation_limit": 0.5,
    },
    "noise": {"kind": "ftn", "delta": 0.04, "sign": "plus"},
    "sampling": {"tau": 1e-4, "count": 21},
    "simulate": {"source": "analytic", "nx": 64, "nt": 512, "horizon": None},
    "io": {"plot_points": 400},
}


def _merge(defaults: dict, given: dict, path: str) -> dict:
    if not isinstance(given, dict):
        raise ConfigError(f"{path or 'top level'}: expected a mapping, got {type(given).__name__}")
    out = copy.deepcopy(defaults)
    for key, value in given.items():
        where = f"{path}.{key}" if path else str(key)
        if key not in defaults:
            raise ConfigError(f"unknown key {where!r}")
        if isinstance(defaults[key], dict) and value is not None:
            out[key] = _merge(defaults[key], value, where)
        else:
            out[key] = value
    return out


def _series(pairs, where: str) -> PowerSeries:
    if pairs is None:
        return PowerSeries()
    if isinstance(pairs, (int, float)):
        return PowerSeries.constant(float(pairs))
    try:
        return PowerSeries((float(c), float(p)) for c, p in pairs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: expected a list of [coefficient, exponent] pairs ({exc})") from exc


def _term(entry: dict, k: int) -> Term:
    where = f"model.terms[{k}]"
    if not isinstance(entry, dict) or set(entry) - {"order", "coefficient", "sign"}:
        raise ConfigError(f"{where}: expected keys order, coefficient, sign")
    order = entry.get("order")
    order = {"lead": UNKNOWN_LEAD, "second": UNKNOWN_SECOND}.get(order, order)
    coef = entry.get("coefficient")
    coef = UNKNOWN_CONSTANT if coef == "unknown" else _series(coef, f"{where}.coefficient")
    try:
        return Term(order, coef, float(entry.get("sign", 1.0)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration; ``raw`` holds the merged mapping for echoing."""

    raw: dict

    @property
    def model_section(self) -> dict:
        return self.raw["model"]

    @property
    def example(self) -> int | None:
        return self.raw["model"]["example"]

    def model(self) -> ModelSpec:
        return self.truth_and_model()[1]

    def truth(self) -> PowerSeries | None:
        return self.truth_and_model()[0]

    def truth_and_model(self) -> tuple[PowerSeries | None, ModelSpec]:
        m = self.raw["model"]
        if m["example"] is not None:
            nu = m["nu"]
            if m["example"] == 1:
                return example1_truth(nu, unknown_rho=bool(m["unknown_rho"]))
            return example2_truth(nu, gamma=m["gamma"])
        try:
            terms = tuple(_term(e, k) for k, e in enumerate(m["terms"]))
            op = OperatorSpec(FDOType(str(m["type"])), terms)
            model = ModelSpec(
                operator=op,
                psi0=float(m["psi0"]),
                gbar=_series(m["gbar"], "model.gbar"),
                a0=_series(m["a0"], "model.a0"),
                b0=_series(m["b0"], "model.b0"),
                kernel=None if m["kernel"] is None else _series(m["kernel"], "model.kernel"),
                boundary=_series(m["boundary"], "model.boundary"),
                d=int(m["d"]),
            )
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"model: {exc}") from exc
        truth = None if m["truth"] is None else _series(m["truth"], "model.truth")
        return truth, model

    def recon(self, times=None) -> ReconConfig:
        """Reconstruction settings; grids without ``tbar_start`` are anchored
        at the second-to-last of ``times`` (default: the sampling times)."""
        r = self.raw["recon"]
        times = self.sampling_times() if times is None else times
        try:
            grids = []
            for name in ("step1", "step2"):
                g = dict(r[name])
                if g["tbar_start"] is None:
                    g["tbar_start"] = float(times[-2])
                grids.append(RegularizationGrid(**g))
            return ReconConfig(
                n_powers=int(r["n_powers"]),
                size=int(r["size"]),
                betas=None if r["betas"] is None else tuple(r["betas"]),
                weight_exponent=float(r["weight_exponent"]),
                step1_grid=grids[0],
                step2_grid=grids[1],
                lam=float(r["lam"]),
                t0=None if r["t0"] is None else float(r["t0"]),
                strategy=str(r["strategy"]),
                refine_halfwidth=float(r["refine_halfwidth"]),
                extrapolation_limit=(
                    None if r["extrapolation_limit"] is None else float(r["extrapolation_limit"])
                ),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"recon: {exc}") from exc

    def noise(self) -> NoiseSpec:
        n = self.raw["noise"]
        nu = self.raw["model"]["nu"] or 0.5
        try:
            return NoiseSpec(NoiseKind(n["kind"]), float(n["delta"]), nu, n["sign"])
        except ValueError as exc:
            raise ConfigError(f"noise: {exc}") from exc

    def sampling_times(self):
        s = self.raw["sampling"]
        return default_times(float(s["tau"]), int(s["count"]))

    def dump(self) -> str:
        return yaml.safe_dump(self.raw, sort_keys=False, default_flow_style=None)


def _validate(raw: dict, require_model: bool) -> None:
    m = raw["model"]
    if not require_model and m["example"] is None and m["terms"] is None:
        pass
    elif m["example"] is not None:
        if m["example"] not in (1, 2):
            raise ConfigError("model.example must be 1 or 2")
        if m["nu"] is None or not 0.0 < float(m["nu"]) < 1.0:
            raise ConfigError("model.nu must be given in (0, 1) for a built-in example")
        explicit = [k for k in ("terms", "psi0", "gbar", "truth") if m[k] is not None]
        if explicit:
            raise ConfigError(f"model.example excludes explicit fields {explicit}")
    elif m["terms"] is None or m["psi0"] is None or m["gbar"] is None:
        raise ConfigError("model needs either example or terms, psi0 and gbar")
    for name in ("step1", "step2"):
        if set(raw["recon"][name]) != _GRID_KEYS:
            raise ConfigError(f"recon.{name} must define {sorted(_GRID_KEYS)}")
    if raw["simulate"]["source"] not in ("analytic", "direct"):
        raise ConfigError("simulate.source must be 'analytic' or 'direct'")
    if int(raw["io"]["plot_points"]) < 2:
        raise ConfigError("io.plot_points must be at least 2")


def parse_config(data: dict | None, require_model: bool = True) -> RunConfig:
    """Merge ``data`` over the defaults and validate the result.

    With ``require_model=False`` the model section may be left empty (the
    experiment harness supplies the built-in benchmarks itself).
    """
    raw = _merge(DEFAULTS, data or {}, "")
    _validate(raw, require_model)
    cfg = RunConfig(raw)
    # build once so that malformed entries fail here rather than mid-run
    if raw["model"]["example"] is not None or raw["model"]["terms"] is not None:
        cfg.truth_and_model()
    cfg.recon()
    cfg.noise()
    return cfg


def load_config(path, require_model: bool = True) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    return parse_config(data, require_model)
