import numpy as np
import pytest

from oracles import gradient_descent_argmin, grid_argmin_abs
from quasyadmm.costs import (
    AbsCost,
    QuadraticCost,
    UnsupportedCostMixError,
    abs_x_update,
    centralized_optimum,
    quadratic_x_update,
    random_quadratic,
)


def test_scalar_stationarity_example():
    cost = QuadraticCost([[2.0]], [-4.0])
    x = quadratic_x_update(cost, z=np.zeros(1), lam=np.zeros(1), rho=1.0)
    assert x == pytest.approx(4.0 / 3.0, abs=1e-14)


def test_terms_cancel_returns_unconstrained_minimizer():
    # stationarity grad f(x_hat) + lam + rho (x_hat - z) = 0 with
    # grad f(x_hat) = 0 forces lam = rho (z - x_hat)
    cost = random_quadratic(4, seed=11)
    x_hat = np.linalg.solve(cost.P, -cost.q)
    rng = np.random.default_rng(0)
    z = rng.normal(size=4)
    lam = 1.7 * (z - x_hat)
    x = quadratic_x_update(cost, z, lam, rho=1.7)
    assert np.allclose(x, x_hat, atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_quadratic_update_matches_descent_oracle(seed):
    cost = random_quadratic(5, seed=seed)
    rng = np.random.default_rng(seed + 500)
    z = rng.uniform(-2, 2, size=5)
    lam = rng.uniform(-2, 2, size=5)
    rho = float(rng.uniform(0.5, 3.0))
    closed = quadratic_x_update(cost, z, lam, rho)
    iterative = gradient_descent_argmin(cost.P, cost.q, z, lam, rho)
    assert np.linalg.norm(closed - iterative) <= 1e-8


def test_stationarity_residual_tiny():
    for seed in range(5):
        cost = random_quadratic(6, seed=seed)
        rng = np.random.default_rng(seed)
        z = rng.uniform(-3, 3, size=6)
        lam = rng.uniform(-3, 3, size=6)
        rho = 1.3
        x = quadratic_x_update(cost, z, lam, rho)
        residual = (cost.P + rho * np.eye(6)) @ x - (rho * z - lam - cost.q)
        scale = max(1.0, np.linalg.norm(rho * z - lam - cost.q))
        assert np.linalg.norm(residual) <= 1e-10 * scale


def test_abs_update_examples():
    assert abs_x_update(1.0, z=2.0, lam=0.0, rho=1.0) == pytest.approx(1.0)
    assert abs_x_update(1.0, z=0.5, lam=0.0, rho=1.0) == 0.0


@pytest.mark.parametrize("seed", range(10))
def test_abs_update_matches_grid_oracle(seed):
    rng = np.random.default_rng(seed + 40)
    weight = float(rng.uniform(0.0, 2.0))
    z = float(rng.uniform(-3, 3))
    lam = float(rng.uniform(-2, 2))
    rho = float(rng.uniform(0.5, 2.5))
    assert abs_x_update(weight, z, lam, rho) == pytest.approx(
        grid_argmin_abs(weight, z, lam, rho), abs=1e-6
    )


def test_x_update_is_global_minimizer_under_perturbation():
    rng = np.random.default_rng(7)
    cost = random_quadratic(3, seed=9)
    z = rng.uniform(-1, 1, size=3)
    lam = rng.uniform(-1, 1, size=3)
    rho = 0.9

    def objective(x):
        return cost.eval(x) + float(lam @ x) + (rho / 2.0) * float(np.sum((x - z) ** 2))

    x = cost.x_update(z, lam, rho)
    base = objective(x)
    scales = rng.uniform(1e-6, 10.0, size=10_000)
    directions = rng.normal(size=(10_000, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    values = [objective(x + s * d) for s, d in zip(scales, directions)]
    assert base <= min(values) + 1e-12

    acost = AbsCost(1.4)
    xa = float(acost.x_update(np.array([0.8]), np.array([-0.3]), rho)[0])
    base_a = acost.eval(xa) + -0.3 * xa + (rho / 2.0) * (xa - 0.8) ** 2
    for step in rng.uniform(-5, 5, size=10_000):
        trial = xa + step
        val = acost.eval(trial) + -0.3 * trial + (rho / 2.0) * (trial - 0.8) ** 2
        assert base_a <= val + 1e-12


def test_centralized_midpoint_of_two_quadratics():
    f1 = QuadraticCost([[1.0]], [-1.0])  # 0.5 (x-1)^2 - 0.5
    f2 = QuadraticCost([[1.0]], [-3.0])  # 0.5 (x-3)^2 - 4.5
    assert centralized_optimum([f1, f2]) == pytest.approx(2.0)


def test_centralized_single_quadratic():
    cost = random_quadratic(4, seed=3)
    x = centralized_optimum([cost])
    assert np.allclose(x, np.linalg.solve(cost.P, -cost.q), atol=1e-12)


def test_centralized_stationarity_hundred_scalars():
    costs = [random_quadratic(1, seed=s) for s in range(100)]
    x_star = centralized_optimum(costs)
    total = sum(c.subgradient(x_star) for c in costs)
    assert np.linalg.norm(total) <= 1e-9


def test_centralized_mixture_sign_interval():
    # quadratic pull toward 2 with a strong enough kink at 0 keeps x* = 0
    quad = QuadraticCost([[1.0]], [-2.0])
    mix = [quad, AbsCost(3.0)]
    x_star = centralized_optimum(mix)
    assert x_star == pytest.approx(0.0)
    # subdifferential containment: quad gradient at 0 is -2, within [-3, 3]
    assert abs(float(quad.subgradient(x_star)[0])) <= 3.0

    # weak kink: optimum moves to where a*x + b + w*sign(x) = 0
    mix2 = [quad, AbsCost(0.5)]
    x2 = float(centralized_optimum(mix2)[0])
    assert x2 == pytest.approx(1.5)
    assert quad.subgradient(x2)[0] + 0.5 * np.sign(x2) == pytest.approx(0.0, abs=1e-12)


def test_centralized_mixture_rejects_vectors():
    with pytest.raises(UnsupportedCostMixError):
        centralized_optimum([random_quadratic(2, seed=0), AbsCost(1.0)])


def test_random_quadratic_is_half_squared_residual():
    # construction gives f(x) = 0.5 ||Ax - b||^2 with r = ||b||^2/2, so the
    # minimum value is nonnegative
    for seed in range(10):
        cost = random_quadratic(3, seed=seed)
        x_hat = np.linalg.solve(cost.P, -cost.q)
        assert cost.eval(x_hat) >= -1e-12


def test_random_quadratic_deterministic():
    a = random_quadratic(4, seed=21)
    b = random_quadratic(4, seed=21)
    assert np.array_equal(a.P, b.P) and np.array_equal(a.q, b.q) and a.r == b.r


@pytest.mark.parametrize("seed", range(20))
def test_random_quadratic_eigenvalues_nonnegative(seed):
    cost = random_quadratic(5, seed=seed)
    assert np.linalg.eigvalsh(cost.P).min() >= -1e-12


def test_quadratic_cost_validation():
    with pytest.raises(ValueError, match="symmetric"):
        QuadraticCost([[1.0, 0.5], [0.0, 1.0]], [0.0, 0.0])
    with pytest.raises(ValueError, match="positive definite"):
        QuadraticCost([[0.0]], [1.0])
    with pytest.raises(ValueError, match="shapes"):
        QuadraticCost([[1.0]], [1.0, 2.0])
    with pytest.raises(ValueError):
        AbsCost(-1.0)


def test_eval_matches_quadratic_form():
    cost = QuadraticCost([[2.0, 0.0], [0.0, 4.0]], [1.0, -1.0], r=0.25)
    assert cost.eval([1.0, 1.0]) == pytest.approx(0.5 * 6 + 0.0 + 0.25)
