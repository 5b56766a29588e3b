"""Differentially private release of aggregate counts.

Laplace mechanism only: each count is perturbed by independent noise with
scale sensitivity / epsilon. Runs are seeded so a release is reproducible
from (counts, spec, seed).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InvalidBudget


@dataclass(frozen=True)
class DpReleaseSpec:
    epsilon: float
    sensitivity: float
    mechanism: str = "laplace"

    def validate(self) -> None:
        if self.epsilon <= 0:
            raise InvalidBudget(f"epsilon must be positive, got {self.epsilon}")
        if self.sensitivity <= 0:
            raise InvalidBudget(f"sensitivity must be positive, got {self.sensitivity}")
        if self.mechanism != "laplace":
            raise InvalidBudget(f"unsupported mechanism: {self.mechanism!r}")

    @property
    def scale(self) -> float:
        return self.sensitivity / self.epsilon


def dp_release(true_counts: Sequence[float], spec: DpReleaseSpec, randomness_seed: int) -> list[float]:
    """Return the noisy counts. Zero-mean noise, scale b = sensitivity/epsilon."""
    spec.validate()
    counts = np.asarray(list(true_counts), dtype=float)
    rng = np.random.default_rng(randomness_seed)
    noise = rng.laplace(loc=0.0, scale=spec.scale, size=counts.shape)
    return [float(v) for v in counts + noise]
