"""Differentiable operations on the Poincare ball model of hyperbolic space.

Points are float64 numpy vectors with Euclidean norm strictly below 1;
after every constructing operation the norm is clamped to <= 1 - EPS_BALL.
Tangent vectors are plain float64 vectors of the same dimension. All
functions are pure and safe to call from multiple threads.

The ball carries the conformal metric g_x = lambda_x^2 * I with
lambda_x = 2 / (1 - ||x||^2), which fixes curvature -1.
"""

from __future__ import annotations

import numpy as np

# Radial clamp: constructed points satisfy ||x|| <= 1 - EPS_BALL.
EPS_BALL = 1e-5
# Threshold below which norms are treated as exactly zero (analytic limits).
EPS_DIV = 1e-12

MAX_NORM = 1.0 - EPS_BALL


def project_to_ball(p: np.ndarray) -> np.ndarray:
    """Retract an arbitrary finite vector onto the closed ball of radius 1 - EPS_BALL.

    Points already inside are returned unchanged; anything else is rescaled
    radially. Non-finite input is rejected.
    """
    p = np.asarray(p, dtype=np.float64)
    if not np.all(np.isfinite(p)):
        raise ValueError("point has non-finite components")
    norm = np.linalg.norm(p)
    if norm <= MAX_NORM:
        return p
    return p * (MAX_NORM / norm)


def conformal_factor(x: np.ndarray) -> float:
    """lambda_x = 2 / (1 - ||x||^2); always >= 2 inside the ball."""
    sq = float(np.dot(x, x))
    return 2.0 / (1.0 - sq)


def mobius_add(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Mobius addition x (+) y, re-projected into the ball.

    x (+) y = ((1 + 2<x,y> + ||y||^2) x + (1 - ||x||^2) y)
              / (1 + 2<x,y> + ||x||^2 ||y||^2)
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    xy = float(np.dot(x, y))
    x2 = float(np.dot(x, x))
    y2 = float(np.dot(y, y))
    num = (1.0 + 2.0 * xy + y2) * x + (1.0 - x2) * y
    den = 1.0 + 2.0 * xy + x2 * y2
    return project_to_ball(num / den)


def exp_map(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Exponential map at x: x (+) tanh(lambda_x ||v|| / 2) * v / ||v||.

    The zero-vector limit returns x itself.
    """
    v = np.asarray(v, dtype=np.float64)
    norm_v = float(np.linalg.norm(v))
    if norm_v < EPS_DIV:
        return np.array(x, dtype=np.float64, copy=True)
    t = np.tanh(0.5 * conformal_factor(x) * norm_v)
    return mobius_add(x, (t / norm_v) * v)


def log_map(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Logarithmic map at x, inverse of exp_map: returns a tangent vector at x.

    log_x(y) = (2 / lambda_x) * artanh(||-x (+) y||) * (-x (+) y) / ||-x (+) y||
    with the y = x limit defined as the zero vector.
    """
    x = np.asarray(x, dtype=np.float64)
    w = mobius_add(-x, y)
    norm_w = float(np.linalg.norm(w))
    if norm_w < EPS_DIV:
        return np.zeros_like(x)
    # artanh argument stays below 1 because mobius_add clamps into the ball.
    scale = (2.0 / conformal_factor(x)) * np.arctanh(min(norm_w, MAX_NORM)) / norm_w
    return scale * w


def distance(x: np.ndarray, y: np.ndarray) -> float:
    """Geodesic distance: arcosh(1 + 2 ||x - y||^2 / ((1 - ||x||^2)(1 - ||y||^2))).

    The arcosh argument is clamped to >= 1 so cancellation near x == y
    yields 0 instead of NaN.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    diff = x - y
    a = float(np.dot(diff, diff))
    b = 1.0 - float(np.dot(x, x))
    c = 1.0 - float(np.dot(y, y))
    arg = 1.0 + 2.0 * a / (b * c)
    return float(np.arccosh(max(arg, 1.0)))


def distance_grad(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Euclidean partial derivatives (dd/dx, dd/dy) of `distance`.

    At x == y (within EPS_DIV) the distance is not differentiable; the zero
    subgradient is returned for both arguments.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    diff = x - y
    a = float(np.dot(diff, diff))
    b = 1.0 - float(np.dot(x, x))
    c = 1.0 - float(np.dot(y, y))
    arg = 1.0 + 2.0 * a / (b * c)
    # d/du arcosh(u) = 1 / sqrt(u^2 - 1)
    root = np.sqrt(max(arg * arg - 1.0, 0.0))
    if root < EPS_DIV:
        return np.zeros_like(x), np.zeros_like(y)
    common = 4.0 / (b * c * root)
    gx = common * (diff + (a / b) * x)
    gy = common * (-diff + (a / c) * y)
    return gx, gy


def distance_from_origin(r: float) -> float:
    """Closed form d(0, x) = 2 artanh(||x||) for a point at radius r."""
    return 2.0 * float(np.arctanh(r))


def exp_map_origin(v: np.ndarray) -> np.ndarray:
    """exp_0(v) = tanh(||v||) * v / ||v||; cheaper special case used by the loss head."""
    v = np.asarray(v, dtype=np.float64)
    r = float(np.linalg.norm(v))
    if r < EPS_DIV:
        return np.zeros_like(v)
    p = (np.tanh(r) / r) * v
    return project_to_ball(p)


def exp_map_origin_vjp(v: np.ndarray, grad_out: np.ndarray) -> np.ndarray:
    """Vector-Jacobian product of exp_map_origin: maps d/dp into d/dv.

    With s(r) = tanh(r)/r the Jacobian is s(r) I + (s'(r)/r) v v^T. The
    r -> 0 limit is the identity. The radial clamp in exp_map_origin only
    activates for tanh(r) > 1 - EPS_BALL (r > ~6), where the smooth part
    of the Jacobian is already ~1e-10; the clamp is treated as identity.
    """
    v = np.asarray(v, dtype=np.float64)
    grad_out = np.asarray(grad_out, dtype=np.float64)
    r = float(np.linalg.norm(v))
    if r < EPS_DIV:
        return grad_out.copy()
    t = np.tanh(r)
    s = t / r
    # s'(r) = (sech^2(r) * r - tanh(r)) / r^2
    ds = ((1.0 - t * t) * r - t) / (r * r)
    return s * grad_out + (ds / r) * float(np.dot(v, grad_out)) * v


def random_ball_point(rng: np.random.Generator, dim: int, max_radius: float) -> np.ndarray:
    """Uniform sample from the ball of the given radius (polar construction)."""
    direction = rng.standard_normal(dim)
    norm = np.linalg.norm(direction)
    if norm < EPS_DIV:
        return np.zeros(dim)
    radius = max_radius * rng.uniform() ** (1.0 / dim)
    return project_to_ball(direction * (radius / norm))
