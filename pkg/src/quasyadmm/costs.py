"""Local cost functions, their proximal x-updates, and a centralized optimum oracle.

Two cost families are provided: strictly convex quadratics (the experiment
workhorse) and a weighted absolute value (convex, non-differentiable) whose
x-update is the soft-threshold map.
"""

from __future__ import annotations

from typing import Protocol, Sequence

import numpy as np


class UnsupportedCostMixError(ValueError):
    """No centralized solver for this combination of cost functions."""


class CostFunction(Protocol):
    """Convex local cost: evaluation, subgradient, and penalized argmin."""

    dim: int

    def eval(self, x) -> float: ...

    def subgradient(self, x) -> np.ndarray: ...

    def x_update(self, z, lam, rho: float) -> np.ndarray: ...


class QuadraticCost:
    """f(x) = 0.5 x'Px + q'x + r with P symmetric positive definite.

    Positive definiteness is checked at construction by Cholesky
    factorization.
    """

    def __init__(self, P, q, r: float = 0.0):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        q = np.atleast_1d(np.asarray(q, dtype=float))
        if P.shape[0] != P.shape[1] or P.shape[0] != q.shape[0]:
            raise ValueError(f"inconsistent shapes P{P.shape}, q{q.shape}")
        if not np.allclose(P, P.T, rtol=1e-12, atol=1e-12):
            raise ValueError("P must be symmetric")
        try:
            np.linalg.cholesky(P)
        except np.linalg.LinAlgError:
            raise ValueError("P must be positive definite") from None
        self.P = P
        self.q = q
        self.r = float(r)
        self.dim = q.shape[0]

    def eval(self, x) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return float(0.5 * x @ self.P @ x + self.q @ x + self.r)

    def subgradient(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self.P @ x + self.q

    def x_update(self, z, lam, rho: float) -> np.ndarray:
        return quadratic_x_update(self, z, lam, rho)


class AbsCost:
    """f(x) = weight * |x| for scalar x (convex, non-differentiable at 0)."""

    dim = 1

    def __init__(self, weight: float):
        if weight < 0:
            raise ValueError(f"weight must be nonnegative, got {weight}")
        self.weight = float(weight)

    def eval(self, x) -> float:
        return self.weight * abs(float(np.asarray(x).reshape(())))

    def subgradient(self, x) -> np.ndarray:
        # At 0 the subdifferential is [-w, w]; 0 is a valid selection.
        v = float(np.asarray(x).reshape(()))
        return np.array([self.weight * np.sign(v)])

    def x_update(self, z, lam, rho: float) -> np.ndarray:
        v = float(np.asarray(z).reshape(()))
        l = float(np.asarray(lam).reshape(()))
        return np.array([abs_x_update(self.weight, v, l, rho)])


def quadratic_x_update(cost: QuadraticCost, z, lam, rho: float) -> np.ndarray:
    """Unique minimizer of f(x) + lam'x + (rho/2)||x - z||^2.

    Stationarity gives (P + rho I) x = rho z - lam - q, solved by direct
    factorization; the system is positive definite for every rho > 0.
    """
    assert rho > 0, "penalty parameter must be positive"
    z = np.atleast_1d(np.asarray(z, dtype=float))
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    A = cost.P + rho * np.eye(cost.dim)
    return np.linalg.solve(A, rho * z - lam - cost.q)


def abs_x_update(weight: float, z: float, lam: float, rho: float) -> float:
    """Minimizer of weight|x| + lam*x + (rho/2)(x - z)^2: soft threshold.

    Shrinks v = z - lam/rho toward zero by weight/rho, clamping to zero
    inside the threshold.
    """
    assert rho > 0, "penalty parameter must be positive"
    v = z - lam / rho
    t = weight / rho
    if v > t:
        return v - t
    if v < -t:
        return v + t
    return 0.0


def centralized_optimum(costs: Sequence[CostFunction]) -> np.ndarray:
    """Minimizer of the sum of the local costs.

    All-quadratic instances solve (sum P) x = -(sum q) in closed form.
    Scalar mixtures with absolute-value terms find the zero crossing of the
    monotone subdifferential, honoring the kink at 0.
    """
    if not costs:
        raise ValueError("need at least one cost function")
    if all(isinstance(c, QuadraticCost) for c in costs):
        P = sum(c.P for c in costs)
        q = sum(c.q for c in costs)
        return np.linalg.solve(P, -q)
    if all(isinstance(c, (QuadraticCost, AbsCost)) for c in costs):
        if any(c.dim != 1 for c in costs):
            raise UnsupportedCostMixError(
                "absolute-value mixtures are solvable only for scalar problems"
            )
        a = sum(float(c.P[0, 0]) for c in costs if isinstance(c, QuadraticCost))
        b = sum(float(c.q[0]) for c in costs if isinstance(c, QuadraticCost))
        w = sum(c.weight for c in costs if isinstance(c, AbsCost))
        # Subdifferential of the total is a*x + b + w*sign(x), with [-w, w] at 0.
        if abs(b) <= w:
            return np.array([0.0])
        if a <= 0:
            raise UnsupportedCostMixError("mixture has no curvature away from 0")
        if b > w:
            return np.array([(w - b) / a])
        return np.array([(-w - b) / a])
    raise UnsupportedCostMixError(
        f"cannot solve mixture of {sorted({type(c).__name__ for c in costs})}"
    )


def random_quadratic(p: int, seed: int) -> QuadraticCost:
    """Random instance: P the square of a symmetric U[-1,1] matrix, q = -A b.

    With A symmetric and b uniform, f(x) = 0.5||Ax - b||^2 up to the stored
    constant r = ||b||^2/2.  A^2 is only guaranteed semidefinite, so P gets a
    1e-6 ridge whenever factorization would fail.
    """
    if p < 1:
        raise ValueError(f"dimension must be >= 1, got {p}")
    rng = np.random.default_rng(seed)
    G = rng.uniform(-1.0, 1.0, size=(p, p))
    A = 0.5 * (G + G.T)
    b = rng.uniform(-1.0, 1.0, size=p)
    P = A @ A
    q = -A.T @ b
    r = 0.5 * float(b @ b)
    try:
        np.linalg.cholesky(P)
    except np.linalg.LinAlgError:
        P = P + 1e-6 * np.eye(p)
    return QuadraticCost(P, q, r)
