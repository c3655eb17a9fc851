"""Per-evaluation run traces and their JSONL / CSV serialization."""
from dataclasses import dataclass, field
import csv
import json
import time
from typing import Optional

TIMING_FIELDS = ("wall_clock",)
CSV_FIELDS = ("t", "y", "f", "regret", "cum_regret", "avg_regret", "best_f", "wall_clock",
              "leaf_size", "inducing_size", "d_eff")


@dataclass
class RunTrace:
    algorithm: str
    objective: str
    seed: Optional[int]
    records: list = field(default_factory=list)
    optimum: Optional[float] = None
    optimum_assumed: bool = False
    truncated: bool = False
    failed: Optional[str] = None
    stop_reason: Optional[str] = None
    early_stop_step: Optional[int] = None
    max_leaf_size: Optional[int] = None
    total_time: float = 0.0

    def __len__(self):
        return len(self.records)

    def column(self, name):
        return [r[name] for r in self.records]

    def meta(self):
        return {
            "algorithm": self.algorithm, "objective": self.objective, "seed": self.seed,
            "evaluations": len(self.records), "optimum": self.optimum,
            "optimum_assumed": self.optimum_assumed, "truncated": self.truncated,
            "failed": self.failed, "stop_reason": self.stop_reason,
            "early_stop_step": self.early_stop_step, "max_leaf_size": self.max_leaf_size,
            "total_time": self.total_time,
        }

    def to_jsonl(self, path, timing=True):
        with open(path, "w", encoding="utf-8") as fh:
            for line in self.jsonl_lines(timing):
                fh.write(line + "\n")

    def jsonl_lines(self, timing=True):
        for r in self.records:
            rec = r if timing else {k: v for k, v in r.items() if k not in TIMING_FIELDS}
            yield json.dumps(rec, allow_nan=False)

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, extrasaction="ignore")
            w.writeheader()
            w.writerows(self.records)

    @classmethod
    def read_jsonl(cls, path, **meta):
        with open(path, encoding="utf-8") as fh:
            records = [json.loads(line) for line in fh if line.strip()]
        return cls(records=records, **meta)


class TraceRecorder:
    """Callback turning optimizer evaluations into trace records.

    ``problem`` supplies the noiseless value of the last query and the
    objective's orientation; the optimizer itself only ever sees noisy values.
    """

    def __init__(self, trace, problem):
        self.trace = trace
        self.problem = problem
        self._start = time.perf_counter()
        self._cum = 0.0
        self._best = None

    def restart_clock(self):
        self._start = time.perf_counter()

    def __call__(self, optimizer, x, y_internal):
        obj = self.problem.objective
        y = self.problem.to_native(y_internal)
        f = self.problem.last_f
        regret = obj.regret(f)
        if regret is not None:
            self._cum += regret
        better = (lambda a, b: a < b) if obj.minimize else (lambda a, b: a > b)
        if self._best is None or better(f, self._best):
            self._best = f
        t = len(self.trace.records) + 1
        leaf = len(optimizer.leaves) if hasattr(optimizer, "leaves") else optimizer.leaf_size
        self.trace.records.append({
            "t": t,
            "x": [float(v) for v in x],
            "y": y,
            "f": f,
            "regret": regret,
            "cum_regret": self._cum if regret is not None else None,
            "avg_regret": self._cum / t if regret is not None else None,
            "best_f": self._best,
            "wall_clock": time.perf_counter() - self._start,
            "leaf_size": leaf,
            "inducing_size": optimizer.model.inducing_size,
            "d_eff": optimizer.effective_dimension,
        })
