"""
Monte Carlo sampling configuration.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SampleConfig:
    """
    Sample count and seed of a Monte Carlo oracle task.

    Streams come from numpy's counter-based Philox generator keyed by
    SeedSequence(seed, spawn_key=(task_index,)), so every task owns an
    independent stream and identical seeds reproduce identical estimates.
    """

    N: int
    seed: int
    task_index: int = 0

    def validate(self) -> bool:
        if self.N < 1:
            raise ValueError("Sample count must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("Seed must be a 64-bit unsigned integer")
        if self.task_index < 0:
            raise ValueError("Task index must be nonnegative")
        return True

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.task_index,))
        return np.random.Generator(np.random.Philox(sequence))

    def for_task(self, task_index: int) -> "SampleConfig":
        return SampleConfig(self.N, self.seed, task_index)
