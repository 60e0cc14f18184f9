"""Per-run trace series shared by all optimizers."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .rewards import METRIC_NAMES


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class RunTrace:
    """(step, total reward, per-metric rewards) series plus run metadata."""

    steps: np.ndarray            # (n,) int
    total: np.ndarray            # (n,) float
    metrics: np.ndarray          # (n, 8) float, columns in METRIC_NAMES order
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.steps = np.asarray(self.steps, dtype=np.int64)
        self.total = np.asarray(self.total, dtype=np.float64)
        self.metrics = np.asarray(self.metrics, dtype=np.float64)
        if len(self.steps) != len(self.total) or len(self.steps) != len(self.metrics):
            raise ValueError("trace columns must have equal length")
        if len(self.steps) > 1 and not np.all(np.diff(self.steps) > 0):
            raise ValueError("trace steps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.steps)

    def metric(self, name: str) -> np.ndarray:
        return self.metrics[:, METRIC_NAMES.index(name)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("step,total," + ",".join(METRIC_NAMES) + "\n")
        for i in range(len(self.steps)):
            row = [str(int(self.steps[i])), _fmt(self.total[i])]
            row.extend(_fmt(v) for v in self.metrics[i])
            buf.write(",".join(row) + "\n")
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())


class TraceRecorder:
    """Append-only collector used inside optimizer loops."""

    def __init__(self, metadata: dict | None = None):
        self._steps: list[int] = []
        self._total: list[float] = []
        self._metrics: list[tuple[float, ...]] = []
        self.metadata = dict(metadata or {})

    def add(self, step: int, total: float, metrics: tuple[float, ...]) -> None:
        self._steps.append(int(step))
        self._total.append(float(total))
        self._metrics.append(tuple(metrics))

    def build(self) -> RunTrace:
        n = len(self._steps)
        metrics = np.array(self._metrics, dtype=np.float64) if n else np.zeros((0, len(METRIC_NAMES)))
        return RunTrace(
            steps=np.array(self._steps, dtype=np.int64),
            total=np.array(self._total, dtype=np.float64),
            metrics=metrics,
            metadata=self.metadata,
        )
