"""Benchmark objective functions with known optima, addressable by name."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import OutOfBoundsError
from .problem import ProblemSpec, ValidatedProblem, validate_problem


@dataclass(frozen=True)
class BenchmarkFunction:
    name: str
    n: int
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    evaluator: Callable[[np.ndarray], float]
    optimum_value: float
    optimizers: tuple[tuple[float, ...], ...]

    def problem(self) -> ValidatedProblem:
        return validate_problem(
            ProblemSpec(n=self.n, lower=list(self.lower), upper=list(self.upper))
        )


def _camel6(x: np.ndarray) -> float:
    x1, x2 = float(x[0]), float(x[1])
    return (
        (4.0 - 2.1 * x1**2 + x1**4 / 3.0) * x1**2
        + x1 * x2
        + (-4.0 + 4.0 * x2**2) * x2**2
    )


def _ackley(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    return float(
        -20.0 * math.exp(-0.2 * math.sqrt(float(np.sum(x * x)) / n))
        - math.exp(float(np.sum(np.cos(2.0 * math.pi * x))) / n)
        + 20.0
        + math.e
    )


def _rosenbrock(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


CAMEL6_MIN = -1.0316284534898774
CAMEL6_ARGMIN = (0.08984201368301331, -0.7126564032704135)

BENCHMARKS: dict[str, BenchmarkFunction] = {
    "camel6": BenchmarkFunction(
        name="camel6",
        n=2,
        lower=(-2.0, -1.0),
        upper=(2.0, 1.0),
        evaluator=_camel6,
        optimum_value=CAMEL6_MIN,
        optimizers=(
            CAMEL6_ARGMIN,
            (-CAMEL6_ARGMIN[0], -CAMEL6_ARGMIN[1]),
        ),
    ),
    "ackley2": BenchmarkFunction(
        name="ackley2",
        n=2,
        lower=(-5.0, -5.0),
        upper=(5.0, 5.0),
        evaluator=_ackley,
        optimum_value=0.0,
        optimizers=((0.0, 0.0),),
    ),
    "rosenbrock8": BenchmarkFunction(
        name="rosenbrock8",
        n=8,
        lower=(-30.0,) * 8,
        upper=(30.0,) * 8,
        evaluator=_rosenbrock,
        optimum_value=0.0,
        optimizers=((1.0,) * 8,),
    ),
}


def get_benchmark(name: str) -> BenchmarkFunction:
    try:
        return BENCHMARKS[name]
    except KeyError:
        raise KeyError(
            f"unknown benchmark {name!r}; available: {sorted(BENCHMARKS)}"
        ) from None


def eval_benchmark(fn: BenchmarkFunction, x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    lower = np.asarray(fn.lower)
    upper = np.asarray(fn.upper)
    if x.shape[0] != fn.n or np.any(x < lower - 1e-9) or np.any(x > upper + 1e-9):
        raise OutOfBoundsError(f"point {x} outside the {fn.name} box")
    return fn.evaluator(x)
