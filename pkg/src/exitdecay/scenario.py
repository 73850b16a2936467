"""Scenario files: one JSON document describing a full exit problem.

A scenario bundles the horizon, per-component kernels, the deterministic
shift, the exit event, the amplitude model with its scale source(s), and
optional optimizer/simulation settings.  Loading re-validates every module
invariant; error messages name the offending field.

Schema sketch::

    {
      "horizon": 1.0,
      "kernels": [{"family": "fbm", "alpha": 1.0}, ...],
      "shift": {"kind": "zero"}
             | {"kind": "constant", "values": [..p..]}
             | {"kind": "affine", "intercept": [..p..], "slope": [..p..]}
             | {"kind": "table", "times": [...], "values": [[..p rows..]]},
      "exit": {"kind": "halfspace", "xi": [..p..], "x": 1.0}
            | {"kind": "quadrant", "levels": [..p..]},
      "model": {"mode": "shared",   "scale":  SOURCE}
             | {"mode": "hadamard", "scales": [SOURCE, ...p...]},
      "optimizer":  {"scan_points": 512, "time_tol": 1e-10},          # optional
      "simulation": {"grid_points": 512, "gammas": [1, 2, 4, 8],
                     "samples": 100000, "seed": 0, "batch": 8192}     # optional
    }

    SOURCE := {"kind": "weibull", "d": ..., "theta": ...}
            | {"kind": "ggbm", "beta": ..., "rho": ...}
            | {"kind": "fixed", "a": ...}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .decay import (
    DecayResult,
    ExitHalfspace,
    ExitQuadrant,
    OptimizerConfig,
    decay_halfspace_equal,
    decay_halfspace_indep,
    decay_quadrant_equal,
    decay_quadrant_indep,
)
from .errors import ValidationError
from .kernels import KernelSpec, TimeGrid
from .montecarlo import FixedScale, LbetaScale, ScaleSource, SimConfig, WeibullScale
from .rates import PerturbationModel
from .scalelaw import GgbmParams, ScaleLaw
from .shift import Shift


@dataclass(frozen=True)
class SimSettings:
    grid_points: int = 512
    gammas: tuple[float, ...] = (1.0, 2.0, 4.0, 8.0)
    samples: int = 100_000
    seed: int = 0
    batch: int = 8192


@dataclass(eq=False)
class Scenario:
    horizon: float
    kernels: tuple[KernelSpec, ...]
    shift: Shift
    exit: ExitHalfspace | ExitQuadrant
    mode: str  # 'shared' | 'hadamard'
    sources: tuple[ScaleSource, ...]
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    simulation: SimSettings = field(default_factory=SimSettings)

    @property
    def p(self) -> int:
        return len(self.kernels)

    @property
    def geometry(self) -> str:
        return "halfspace" if isinstance(self.exit, ExitHalfspace) else "quadrant"

    def laws(self) -> tuple[ScaleLaw, ...]:
        """Resolved (d, theta) law per scale source; fixed sources have none."""
        out = []
        for i, src in enumerate(self.sources):
            if isinstance(src, FixedScale):
                raise ValidationError(
                    f"model scale {i}: a fixed amplitude has no rate law; "
                    "only 'simulate' accepts it"
                )
            out.append(src.law)
        return tuple(out)

    def perturbation_model(self) -> PerturbationModel:
        laws = self.laws()
        if self.mode == "shared":
            return PerturbationModel.shared(laws[0])
        return PerturbationModel.hadamard(laws)

    def perturbation_model_for_simulation(self) -> PerturbationModel:
        """Like perturbation_model, but fixed amplitudes (no rate law) are allowed."""
        if any(isinstance(s, FixedScale) for s in self.sources):
            return PerturbationModel.coupling_only(self.mode)
        return self.perturbation_model()

    def compute_decay(self) -> DecayResult:
        """Dispatch to the matching closed-form decay operation."""
        laws = self.laws()
        if self.geometry == "halfspace":
            if self.mode == "shared":
                return decay_halfspace_equal(self.exit, self.kernels, laws[0], self.optimizer)
            if any(law != laws[0] for law in laws):
                raise ValidationError(
                    "model.scales: the independent-amplitude halfspace rate requires "
                    "one common (d, theta) law across components"
                )
            return decay_halfspace_indep(self.exit, self.kernels, laws[0], self.optimizer)
        if self.mode == "shared":
            return decay_quadrant_equal(self.exit, self.kernels, laws[0], self.optimizer)
        return decay_quadrant_indep(self.exit, self.kernels, laws, self.optimizer)

    def sim_config(self, grid_points=None, gammas=None, samples=None, seed=None, batch=None):
        s = self.simulation
        grid = TimeGrid.uniform(self.horizon, grid_points or s.grid_points)
        sources = self.sources if self.mode == "hadamard" else self.sources[0]
        return SimConfig(
            grid=grid,
            gammas=tuple(gammas) if gammas is not None else s.gammas,
            samples=samples if samples is not None else s.samples,
            seed=seed if seed is not None else s.seed,
            scale=sources,
            batch=batch if batch is not None else s.batch,
        )


def _require(doc: dict, key: str, path: str):
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: expected an object")
    if key not in doc:
        raise ValidationError(f"{path}.{key}: missing required field")
    return doc[key]


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _vector(value, path: str, length: int | None = None) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ValidationError(f"{path}: expected a nonempty array of numbers")
    out = [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]
    if length is not None and len(out) != length:
        raise ValidationError(f"{path}: expected {length} entries, got {len(out)}")
    return out


def _build(path: str, ctor, *args, **kwargs):
    """Run a validating constructor, prefixing its message with the field path."""
    try:
        return ctor(*args, **kwargs)
    except ValidationError as err:
        raise ValidationError(f"{path}: {err}") from None


def _parse_source(doc, path: str) -> ScaleSource:
    kind = _require(doc, "kind", path)
    if kind == "weibull":
        law = _build(
            path, ScaleLaw, d=_number(_require(doc, "d", path), f"{path}.d"),
            theta=_number(_require(doc, "theta", path), f"{path}.theta"),
        )
        return WeibullScale(law)
    if kind == "ggbm":
        params = _build(
            path, GgbmParams, beta=_number(_require(doc, "beta", path), f"{path}.beta"),
            rho=_number(doc.get("rho", 1.0), f"{path}.rho"),
        )
        return LbetaScale(params)
    if kind == "fixed":
        return _build(path, FixedScale, _number(_require(doc, "a", path), f"{path}.a"))
    raise ValidationError(f"{path}.kind: unknown scale kind {kind!r}")


def _parse_shift(doc, p: int, T: float) -> Shift:
    kind = _require(doc, "kind", "shift")
    if kind == "zero":
        return Shift.zero(p, T)
    if kind == "constant":
        values = _vector(_require(doc, "values", "shift"), "shift.values", p)
        return _build("shift", Shift.constant, values, T)
    if kind == "affine":
        intercept = _vector(_require(doc, "intercept", "shift"), "shift.intercept", p)
        slope = _vector(_require(doc, "slope", "shift"), "shift.slope", p)
        return _build("shift", Shift.affine, intercept, slope, T)
    if kind == "table":
        times = _vector(_require(doc, "times", "shift"), "shift.times")
        rows = _require(doc, "values", "shift")
        if not isinstance(rows, list) or len(rows) != p:
            raise ValidationError(f"shift.values: expected {p} rows of samples")
        values = [_vector(row, f"shift.values[{i}]", len(times)) for i, row in enumerate(rows)]
        return _build("shift", Shift.from_table, times, values)
    raise ValidationError(f"shift.kind: unknown shift kind {kind!r}")


def parse_scenario(doc: dict) -> Scenario:
    horizon = _number(_require(doc, "horizon", "scenario"), "horizon")
    if horizon <= 0.0:
        raise ValidationError(f"horizon: must be positive, got {horizon}")
    kernel_docs = _require(doc, "kernels", "scenario")
    if not isinstance(kernel_docs, list) or not kernel_docs:
        raise ValidationError("kernels: expected a nonempty array")
    kernels = tuple(
        _build(
            f"kernels[{i}]", KernelSpec,
            alpha=_number(_require(k, "alpha", f"kernels[{i}]"), f"kernels[{i}].alpha"),
            family=k.get("family", "fbm"),
        )
        for i, k in enumerate(kernel_docs)
    )
    p = len(kernels)
    shift = _parse_shift(doc.get("shift", {"kind": "zero"}), p, horizon)

    exit_doc = _require(doc, "exit", "scenario")
    exit_kind = _require(exit_doc, "kind", "exit")
    if exit_kind == "halfspace":
        exit_spec = _build(
            "exit", ExitHalfspace,
            xi=_vector(_require(exit_doc, "xi", "exit"), "exit.xi", p),
            x=_number(_require(exit_doc, "x", "exit"), "exit.x"),
            shift=shift,
        )
    elif exit_kind == "quadrant":
        exit_spec = _build(
            "exit", ExitQuadrant,
            levels=_vector(_require(exit_doc, "levels", "exit"), "exit.levels", p),
            shift=shift,
        )
    else:
        raise ValidationError(f"exit.kind: unknown exit kind {exit_kind!r}")

    model_doc = _require(doc, "model", "scenario")
    mode = _require(model_doc, "mode", "model")
    if mode == "shared":
        sources = (_parse_source(_require(model_doc, "scale", "model"), "model.scale"),)
    elif mode == "hadamard":
        source_docs = _require(model_doc, "scales", "model")
        if not isinstance(source_docs, list) or len(source_docs) != p:
            raise ValidationError(f"model.scales: expected {p} scale sources")
        sources = tuple(
            _parse_source(s, f"model.scales[{i}]") for i, s in enumerate(source_docs)
        )
    else:
        raise ValidationError(f"model.mode: expected 'shared' or 'hadamard', got {mode!r}")

    opt_doc = doc.get("optimizer", {})
    optimizer = _build(
        "optimizer", OptimizerConfig,
        scan_points=int(opt_doc.get("scan_points", 512)),
        time_tol=_number(opt_doc.get("time_tol", 1e-10), "optimizer.time_tol"),
    )
    sim_doc = doc.get("simulation", {})
    simulation = SimSettings(
        grid_points=int(sim_doc.get("grid_points", 512)),
        gammas=tuple(_vector(sim_doc.get("gammas", [1.0, 2.0, 4.0, 8.0]), "simulation.gammas")),
        samples=int(sim_doc.get("samples", 100_000)),
        seed=int(sim_doc.get("seed", 0)),
        batch=int(sim_doc.get("batch", 8192)),
    )
    return Scenario(
        horizon=horizon,
        kernels=kernels,
        shift=shift,
        exit=exit_spec,
        mode=mode,
        sources=sources,
        optimizer=optimizer,
        simulation=simulation,
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise ValidationError(f"scenario file not found: {path}") from None
    except json.JSONDecodeError as err:
        raise ValidationError(f"scenario file {path} is not valid JSON: {err}") from None
    if not isinstance(doc, dict):
        raise ValidationError(f"scenario file {path} must contain a JSON object")
    return parse_scenario(doc)
