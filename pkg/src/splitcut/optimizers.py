"""Derivative-free maximizers with explicit per-iteration stepping.

The split-iteration engine swaps the objective between backends from one
iteration to the next, so these optimizers expose a ``step(objective)``
method instead of a closed run loop: every objective evaluation triggered
by one step call belongs to that step. Both maximize; internally they walk
downhill on the negated objective.
"""
from __future__ import annotations

import numpy as np


class Spsa:
    """Simultaneous perturbation stochastic approximation.

    Gain schedules a_k = a / (A + k + 1)^alpha and c_k = c / (k + 1)^gamma
    with a Rademacher perturbation; exactly two objective evaluations per
    step. Noise-robust, so it is the default for shot-sampled objectives.
    """

    def __init__(
        self,
        x0,
        rng: np.random.Generator,
        a: float = 0.4,
        c: float = 0.1,
        A: float = 5.0,
        alpha: float = 0.602,
        gamma: float = 0.101,
    ):
        self.x = np.asarray(x0, dtype=float).copy()
        self.rng = rng
        self.a, self.c, self.A, self.alpha, self.gamma = a, c, A, alpha, gamma
        self.k = 0

    def step(self, objective) -> list[tuple[np.ndarray, float]]:
        ak = self.a / (self.A + self.k + 1) ** self.alpha
        ck = self.c / (self.k + 1) ** self.gamma
        delta = self.rng.integers(0, 2, size=self.x.shape) * 2 - 1
        x_plus = self.x + ck * delta
        x_minus = self.x - ck * delta
        f_plus = float(objective(x_plus))
        f_minus = float(objective(x_minus))
        grad = (f_plus - f_minus) / (2.0 * ck) * delta
        self.x = self.x + ak * grad
        self.k += 1
        return [(x_plus, f_plus), (x_minus, f_minus)]


class NelderMead:
    """Classic simplex search (reflection/expansion/contraction/shrink).

    The initial simplex is evaluated lazily on the first step, so those
    evaluations land on iteration 0's objective. Intended for ideal
    backends; simplex values measured on earlier iterations' objectives are
    reused as-is.
    """

    def __init__(self, x0, step: float = 0.3):
        self.x0 = np.asarray(x0, dtype=float).copy()
        self.step_size = step
        self.simplex: list[np.ndarray] | None = None
        self.values: list[float] | None = None

    @property
    def x(self) -> np.ndarray:
        if self.simplex is None:
            return self.x0
        best = int(np.argmax(self.values))
        return self.simplex[best]

    def _init_simplex(self, objective) -> list[tuple[np.ndarray, float]]:
        dim = len(self.x0)
        points = [self.x0.copy()]
        for i in range(dim):
            p = self.x0.copy()
            p[i] += self.step_size
            points.append(p)
        self.simplex = points
        self.values = [float(objective(p)) for p in points]
        return list(zip(points, self.values))

    def step_simplex(self, objective) -> list[tuple[np.ndarray, float]]:
        evals: list[tuple[np.ndarray, float]] = []

        def f(x) -> float:
            v = float(objective(x))
            evals.append((x, v))
            return v

        order = np.argsort(self.values)  # ascending: worst first under maximization
        worst, second_worst, best = order[0], order[1], order[-1]
        centroid = np.mean([self.simplex[i] for i in order[1:]], axis=0)
        reflected = centroid + (centroid - self.simplex[worst])
        f_r = f(reflected)
        if f_r > self.values[best]:
            expanded = centroid + 2.0 * (centroid - self.simplex[worst])
            f_e = f(expanded)
            if f_e > f_r:
                self.simplex[worst], self.values[worst] = expanded, f_e
            else:
                self.simplex[worst], self.values[worst] = reflected, f_r
        elif f_r > self.values[second_worst]:
            self.simplex[worst], self.values[worst] = reflected, f_r
        else:
            contracted = centroid + 0.5 * (self.simplex[worst] - centroid)
            f_c = f(contracted)
            if f_c > self.values[worst]:
                self.simplex[worst], self.values[worst] = contracted, f_c
            else:
                best_point = self.simplex[best].copy()
                for i in range(len(self.simplex)):
                    if i == best:
                        continue
                    shrunk = best_point + 0.5 * (self.simplex[i] - best_point)
                    self.simplex[i] = shrunk
                    self.values[i] = f(shrunk)
        return evals

    def step(self, objective) -> list[tuple[np.ndarray, float]]:
        if self.simplex is None:
            return self._init_simplex(objective)
        return self.step_simplex(objective)
