"""Record and split containers for generated sample collections."""

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError


@dataclass
class LabeledSample:
    """One size-N sample with its generating model id and parameter."""

    model_id: int
    theta: float
    values: np.ndarray

    def matrix(self) -> np.ndarray:
        return reshape_sample(self.values)


@dataclass
class Split:
    """Column-oriented record block: one row per labeled sample.

    n counts stored floats per record (channels * sample_size); record_ids
    carry generation bookkeeping for split-disjointness checks and are not
    serialized.
    """

    n: int
    model_ids: np.ndarray
    thetas: np.ndarray
    values: np.ndarray
    record_ids: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.values.shape != (len(self.model_ids), self.n):
            raise ShapeError(
                f"values shape {self.values.shape} != ({len(self.model_ids)}, {self.n})"
            )

    def __len__(self) -> int:
        return len(self.model_ids)

    def record(self, i: int) -> LabeledSample:
        return LabeledSample(int(self.model_ids[i]), float(self.thetas[i]), self.values[i])


def matrix_side(n: int) -> int:
    """Side length of the square holding n values; error when not square."""
    side = math.isqrt(int(n))
    if side * side != n:
        raise ShapeError(f"sample size {n} is not a perfect square")
    return side


def reshape_sample(values) -> np.ndarray:
    """Row-major square matrix over the raw draw order."""
    values = np.asarray(values)
    side = matrix_side(values.shape[-1])
    return values.reshape(values.shape[:-1] + (side, side))
