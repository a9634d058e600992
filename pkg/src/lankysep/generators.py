"""Instance families for experiments.

Every generator is a small frozen dataclass whose ``build()`` returns a
normalized :class:`~lankysep.metric.MetricInput`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .metric import MetricInput, euclidean, load_and_normalize, matrix, unit_ball

__all__ = [
    "Grid",
    "Uniform",
    "CantorDust",
    "ExpSpreadLine",
    "UbgUniform",
    "MatrixFile",
    "GENERATORS",
    "generator_from_dict",
    "generator_to_dict",
    "cantor_points",
    "exp_spread_positions",
]


def _positive(**kw):
    for k, v in kw.items():
        if not v > 0:
            raise ValueError(f"{k} must be positive, got {v}")


@dataclass(frozen=True)
class Grid:
    """``k**d`` integer lattice points."""

    k: int
    d: int = 2

    def __post_init__(self):
        _positive(k=self.k, d=self.d)

    def build(self) -> MetricInput:
        pts = np.array(list(itertools.product(range(self.k), repeat=self.d)), dtype=float)
        return load_and_normalize(euclidean(pts))


@dataclass(frozen=True)
class Uniform:
    n: int
    d: int = 2
    seed: int = 0

    def __post_init__(self):
        _positive(n=self.n, d=self.d)

    def build(self) -> MetricInput:
        pts = np.random.default_rng(self.seed).random((self.n, self.d))
        return load_and_normalize(euclidean(pts))


def cantor_points(depth: int, d: int) -> np.ndarray:
    """Lattice points in ``[0, 2**depth)**d`` whose coordinates have no common set bit.

    Each refinement keeps ``2**d - 1`` of the ``2**d`` sub-cubes, so net
    counts grow like ``(R/r) ** log2(2**d - 1)``: ``log2 3`` in the plane.
    """
    side = 1 << depth
    grids = np.meshgrid(*([np.arange(side)] * d), indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=1)
    common = np.bitwise_and.reduce(coords, axis=1)
    return coords[common == 0].astype(float)


@dataclass(frozen=True)
class CantorDust:
    depth: int
    d: int = 2

    def __post_init__(self):
        _positive(depth=self.depth)
        if self.d < 2:
            raise ValueError("CantorDust needs d >= 2")

    @property
    def exponent(self) -> float:
        return math.log2(2**self.d - 1)

    def build(self) -> MetricInput:
        return load_and_normalize(euclidean(cantor_points(self.depth, self.d)))


def exp_spread_positions(n: int, base: float) -> np.ndarray:
    """``0, 1, 1+b, 1+b+b**2, ...``: consecutive gaps grow geometrically."""
    gaps = base ** np.arange(n - 1, dtype=float)
    return np.concatenate([[0.0], np.cumsum(gaps)])


@dataclass(frozen=True)
class ExpSpreadLine:
    """Points on a line with exponentially growing gaps, given as a distance matrix."""

    n: int
    base: float = 3.0

    def __post_init__(self):
        _positive(n=self.n)
        if not self.base > 2:
            raise ValueError(f"base must exceed 2, got {self.base}")

    def build(self) -> MetricInput:
        x = exp_spread_positions(self.n, self.base)
        return load_and_normalize(matrix(np.abs(x[:, None] - x[None, :])))


@dataclass(frozen=True)
class UbgUniform:
    """Uniform points in a box sized so the expected degree stays moderate; edges up to ``2 mu``."""

    n: int
    d: int = 2
    mu: float = 1.0
    seed: int = 0

    def __post_init__(self):
        _positive(n=self.n, d=self.d, mu=self.mu)

    def build(self) -> MetricInput:
        side = (self.n / 4.0) ** (1.0 / self.d) * 2.0 * self.mu
        pts = np.random.default_rng(self.seed).random((self.n, self.d)) * side
        return load_and_normalize(unit_ball(pts, self.mu))


@dataclass(frozen=True)
class MatrixFile:
    path: str

    def build(self) -> MetricInput:
        from .io import read_metric

        return load_and_normalize(read_metric(Path(self.path)))


GENERATORS = {
    "Grid": Grid,
    "Uniform": Uniform,
    "CantorDust": CantorDust,
    "ExpSpreadLine": ExpSpreadLine,
    "UbgUniform": UbgUniform,
    "MatrixFile": MatrixFile,
}


def generator_from_dict(spec: dict):
    """``{"type": "Grid", "k": 4, "d": 2}`` -> ``Grid(4, 2)``."""
    spec = dict(spec)
    kind = spec.pop("type", None)
    if kind not in GENERATORS:
        raise ValueError(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}")
    return GENERATORS[kind](**spec)


def generator_to_dict(gen) -> dict:
    return {"type": type(gen).__name__, **asdict(gen)}
