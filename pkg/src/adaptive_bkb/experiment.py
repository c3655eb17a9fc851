"""Experiment orchestration: configs, seeded repetitions, summaries."""
from dataclasses import dataclass, field, fields, asdict
import json
import logging
import math
from pathlib import Path
import time
from typing import Optional

import numpy as np

from . import baselines
from .external import external_objective
from .kernels import KernelSpec
from .objectives import NoiseModel, registry_lookup
from .optimizer import AdaBKB
from .partition import Domain
from .posterior import EXACT, SKETCHED, ConfidenceParams
from .trace import RunTrace, TraceRecorder

log = logging.getLogger(__name__)

ALGORITHMS = ("adabkb", "adagp-exact", "gpucb", "bkb", "random-bkb")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    algorithm: str = "adabkb"
    objective: Optional[str] = None
    external_cmd: Optional[str] = None
    bounds: Optional[list] = None
    budget: int = 100
    reps: int = 1
    seed: int = 0
    lengthscale: object = None
    lam: float = 0.01
    noise_sigma: float = 0.01
    F: float = 1.0
    delta: float = 1e-5
    epsilon: float = 0.5
    beta_lambda_exponent: int = 2
    N: Optional[int] = None
    h_max: Optional[int] = None
    qbar: Optional[float] = None
    grid_points_per_dim: Optional[int] = None
    grid_cap: int = baselines.DEFAULT_GRID_CAP
    random_grid_size: Optional[int] = None
    time_threshold_secs: Optional[float] = None
    continue_after_stop: bool = False
    check_leaf_bound: bool = True
    external_timeout: float = 30.0
    assume_zero_optimum: bool = False
    out: Optional[str] = None

    @classmethod
    def from_mapping(cls, data):
        known = {f.name for f in fields(cls)}
        # accept the CLI spelling for lambda
        data = {("lam" if k == "lambda" else k).replace("-", "_"): v for k, v in data.items()}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path):
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a flat JSON object")
        return cls.from_mapping(data)

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {', '.join(ALGORITHMS)}")
        if (self.objective is None) == (self.external_cmd is None):
            raise ConfigError("give exactly one of objective or external_cmd")
        if self.external_cmd is not None and not self.bounds:
            raise ConfigError("external objectives need bounds")
        if self.objective is not None:
            try:
                registry_lookup(self.objective)
            except KeyError as exc:
                raise ConfigError(str(exc.args[0])) from exc
        for name in ("budget", "reps"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if self.N is not None and self.N < 2:
            raise ConfigError("N must be at least 2")
        if self.time_threshold_secs is not None and self.time_threshold_secs < 0:
            raise ConfigError("time_threshold_secs must be non-negative")
        try:
            self.confidence()
            NoiseModel("gaussian", self.noise_sigma)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not self.lam > 0:
            raise ConfigError("lambda must be positive")
        return self

    def confidence(self):
        return ConfidenceParams(delta=self.delta, epsilon=self.epsilon, F=self.F,
                                lambda_exponent=self.beta_lambda_exponent)

    def to_dict(self):
        return asdict(self)


class NoisyProblem:
    """Adds noise and flips sign so the optimizer always maximizes."""

    def __init__(self, objective, noise, rng):
        self.objective = objective
        self.noise = noise
        self.rng = rng
        self.last_f = None

    def __call__(self, x):
        f = self.objective(x)
        self.last_f = f
        y = f + self.noise.sample(self.rng)
        return -y if self.objective.minimize else y

    def to_native(self, y_internal):
        return -y_internal if self.objective.minimize else y_internal


def resolve_objective(cfg):
    if cfg.objective is not None:
        return registry_lookup(cfg.objective)
    lo, hi = zip(*cfg.bounds)
    return external_objective(cfg.external_cmd, Domain(lo, hi), cfg.external_timeout,
                              assume_zero_optimum=cfg.assume_zero_optimum)


def resolve_kernel(cfg, objective):
    ls = cfg.lengthscale
    if ls is None:
        ls = objective.defaults.lengthscale if objective.defaults else 1.0
    if np.ndim(ls) == 0:
        return KernelSpec.isotropic(float(ls))
    return KernelSpec.ard(tuple(float(v) for v in ls))


def _defaults(cfg, objective):
    d = objective.defaults
    N = cfg.N if cfg.N is not None else (d.N if d else 3)
    h_max = cfg.h_max if cfg.h_max is not None else (d.h_max if d else None)
    return N, h_max


def build_optimizer(cfg, objective, seed, model_rng, grid_seed):
    kernel = resolve_kernel(cfg, objective)
    common = dict(lam=cfg.lam, params=cfg.confidence(), qbar=cfg.qbar, rng=model_rng)
    N, h_max = _defaults(cfg, objective)
    if cfg.algorithm in ("adabkb", "adagp-exact"):
        mode = SKETCHED if cfg.algorithm == "adabkb" else EXACT
        return AdaBKB(objective.domain, kernel, cfg.budget, N=N, h_max=h_max, mode=mode,
                      continue_after_stop=cfg.continue_after_stop,
                      check_leaf_bound=cfg.check_leaf_bound, **common)
    if cfg.algorithm == "random-bkb":
        count = cfg.random_grid_size or _pilot_distinct_points(cfg, seed)
        grid = baselines.build_random_grid(objective.domain, count, grid_seed)
        mode = SKETCHED
    else:
        ppd = cfg.grid_points_per_dim or baselines.default_points_per_dim(objective.dim)
        grid = baselines.build_cartesian_grid(objective.domain, ppd, cfg.grid_cap)
        mode = EXACT if cfg.algorithm == "gpucb" else SKETCHED
    return baselines.GridUCB(grid, kernel, cfg.budget, mode=mode, **common)


def _pilot_distinct_points(cfg, seed):
    """Distinct points an Ada-BKB run with the same settings evaluates."""
    pilot = RunConfig(**{**cfg.to_dict(), "algorithm": "adabkb", "reps": 1, "out": None})
    trace = run_single(pilot, seed)
    if trace.failed:
        raise RuntimeError(f"pilot Ada-BKB run failed: {trace.failed}")
    return max(1, len({tuple(r["x"]) for r in trace.records}))


def run_single(cfg, seed, objective=None):
    """One seeded repetition; failures are captured in the returned trace."""
    owns = objective is None
    model_ss, noise_ss, grid_ss = np.random.SeedSequence(seed).spawn(3)
    name = cfg.objective or "external"
    trace = RunTrace(cfg.algorithm, name, seed)
    try:
        if objective is None:
            objective = resolve_objective(cfg)
        trace.optimum = objective.known_optimum
        trace.optimum_assumed = objective.optimum_assumed
        problem = NoisyProblem(objective, NoiseModel("gaussian", cfg.noise_sigma),
                               np.random.default_rng(noise_ss))
        opt = build_optimizer(cfg, objective, seed, np.random.default_rng(model_ss),
                              np.random.default_rng(grid_ss))
        recorder = TraceRecorder(trace, problem)
        start = time.perf_counter()
        recorder.restart_clock()
        trace.truncated = opt.run(problem, recorder, cfg.time_threshold_secs)
        trace.total_time = time.perf_counter() - start
        trace.stop_reason = opt.stop_reason
        trace.early_stop_step = opt.early_stop_step
        trace.max_leaf_size = opt.max_leaf_size
    except Exception as exc:  # one bad repetition must not sink its siblings
        log.exception("repetition with seed %s failed", seed)
        trace.failed = f"{type(exc).__name__}: {exc}"
    finally:
        close = getattr(getattr(objective, "evaluate", None), "close", None)
        if owns and close is not None:
            close()
    return trace


def _mean_ci(values):
    values = np.asarray(values, dtype=float)
    mean = float(values.mean())
    if values.size < 2:
        return mean, None
    return mean, float(1.96 * values.std(ddof=1) / math.sqrt(values.size))


def summarize(traces):
    """Per-step mean and 95% normal-approximation CI across repetitions."""
    ok = [tr for tr in traces if not tr.failed and tr.records]
    steps = []
    horizon = max((len(tr) for tr in ok), default=0)
    for t in range(1, horizon + 1):
        rows = [tr.records[t - 1] for tr in ok if len(tr) >= t]
        entry = {"t": t, "n_runs": len(rows)}
        for key in ("avg_regret", "wall_clock", "best_f", "leaf_size", "inducing_size", "d_eff"):
            vals = [r[key] for r in rows if r[key] is not None]
            if vals:
                mean, half = _mean_ci(vals)
                entry[f"{key}_mean"] = mean
                entry[f"{key}_ci"] = half
        steps.append(entry)
    early = [tr.early_stop_step for tr in ok if tr.early_stop_step is not None]
    return {
        "runs": [tr.meta() for tr in traces],
        "steps": steps,
        "mean_total_time": float(np.mean([tr.total_time for tr in ok])) if ok else None,
        "mean_early_stop_step": float(np.mean(early)) if early else None,
    }


def run_experiment(cfg, objective=None):
    """Run ``cfg.reps`` repetitions with seeds ``seed, seed+1, ...``.

    Writes one JSONL (and CSV) trace per repetition plus ``summary.json``
    when ``cfg.out`` is set.  Returns ``(summary, traces)``.
    """
    cfg.validate()
    traces = [run_single(cfg, cfg.seed + r, objective) for r in range(cfg.reps)]
    summary = summarize(traces)
    summary["config"] = cfg.to_dict()
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        for tr in traces:
            stem = f"{tr.algorithm}_{tr.objective}_seed{tr.seed}"
            tr.to_jsonl(out / f"{stem}.jsonl")
            tr.to_csv(out / f"{stem}.csv")
        (out / "summary.json").write_text(json.dumps(summary, indent=2), encoding="utf-8")
    return summary, traces
