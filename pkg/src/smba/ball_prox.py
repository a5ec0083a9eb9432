"""Single-ball proximal subproblem solved by one-dimensional root finding.

Each outer iteration majorizes the smoothed constraint by a quadratic whose
zero-sublevel set is a Euclidean ball.  The subproblem

    min  P1(x) + <q, x - x_k> + (L_f / 2) ||x - x_k||^2
    s.t. ||x - center|| <= radius

is solved through its Lagrangian: for a fixed multiplier the minimizer is a
single prox evaluation, and the multiplier is pinned down by driving the
distance-to-center residual to zero.  Safeguarded bisection is the default
(the residual is only piecewise smooth when P1 is an l1 term); an exact
piecewise linear-quadratic solve for the l1 case sits behind a flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleStartError, NumericError
from .problems import L1Regularizer

BRACKET_CAP = 200
PHI_TOL = 1e-12
WIDTH_TOL = 1e-14


@dataclass(frozen=True)
class BallConstraint:
    """Feasible ball of one subproblem.

    ``curvature`` is the quadratic weight L_g / mu of the majorant that the
    ball came from; the constraint function is
    ``(curvature / 2) (||x - center||^2 - radius^2)``.
    """

    center: np.ndarray
    radius: float
    curvature: float

    def __post_init__(self):
        if not (self.radius > 0):
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        if not (self.curvature > 0):
            raise ValueError("curvature weight must be positive")

    def constraint_value(self, x) -> float:
        d = float(np.linalg.norm(np.asarray(x, dtype=float) - self.center))
        return 0.5 * self.curvature * (d * d - self.radius**2)


@dataclass(frozen=True)
class SubproblemResult:
    x: np.ndarray
    lam: float
    stationarity_residual: float
    complementarity: float
    iterations_rootfind: int


def build_ball(x_k, grad_gmu, gmu_val, L_g, mu) -> BallConstraint:
    """Ball of the quadratic majorant of the smoothed constraint at x_k.

    Requires strict feasibility ``gmu_val < 0``, which makes the radius real
    and positive.
    """
    if not (gmu_val < 0.0):
        raise InfeasibleStartError(
            f"smoothed constraint value must be negative to build the ball, got {gmu_val}"
        )
    if L_g <= 0 or mu <= 0:
        raise ValueError("L_g and mu must be positive")
    x_k = np.asarray(x_k, dtype=float)
    grad_gmu = np.asarray(grad_gmu, dtype=float)
    scale = mu / L_g
    center = x_k - scale * grad_gmu
    radius = scale * math.sqrt(
        float(np.dot(grad_gmu, grad_gmu)) - 2.0 * (L_g / mu) * gmu_val
    )
    return BallConstraint(center=center, radius=radius, curvature=L_g / mu)


def prox_path_point(p1, x_k, q, L_f, ball: BallConstraint, lam: float) -> np.ndarray:
    """Unique minimizer of the subproblem Lagrangian at multiplier ``lam``."""
    if lam < 0:
        raise ValueError("multiplier must be nonnegative")
    x_k = np.asarray(x_k, dtype=float)
    q = np.asarray(q, dtype=float)
    t = L_f + lam * ball.curvature
    z = (L_f * x_k - q + lam * ball.curvature * ball.center) / t
    return p1.prox(z, 1.0 / t)


def _stationarity_residual(p1, x, x_k, q, L_f, ball, lam):
    u = q + L_f * (x - x_k) + lam * ball.curvature * (x - ball.center)
    return p1.subdiff_distance(x, u)


def solve_ball_prox(p1, x_k, q, L_f, ball: BallConstraint, exact_l1=False) -> SubproblemResult:
    """Solve the ball-constrained prox subproblem, returning (x, lambda).

    The reported multiplier is the one of the quadratic constraint
    ``(curvature/2)(||x - center||^2 - radius^2) <= 0``; the returned point
    is always on the feasible side of the ball.
    """
    if not (ball.radius > 0):
        raise ValueError("ball radius must be positive")
    x_k = np.asarray(x_k, dtype=float)
    q = np.asarray(q, dtype=float)

    def phi(lam):
        x = prox_path_point(p1, x_k, q, L_f, ball, lam)
        return float(np.linalg.norm(x - ball.center)) - ball.radius, x

    evals = 1
    phi0, x0 = phi(0.0)
    if phi0 <= 0.0:
        return _finish(p1, x0, 0.0, x_k, q, L_f, ball, evals)

    if exact_l1 and isinstance(p1, L1Regularizer):
        lam, evals_exact = _solve_l1_exact(p1, x_k, q, L_f, ball)
        x = prox_path_point(p1, x_k, q, L_f, ball, lam)
        return _finish(p1, x, lam, x_k, q, L_f, ball, evals + evals_exact)

    # bracket the root by doubling, then bisect; phi is continuous and
    # nonincreasing in the multiplier
    lo, hi = 0.0, 1.0
    phi_hi, x_hi = phi(hi)
    evals += 1
    doublings = 0
    while phi_hi > 0.0:
        doublings += 1
        if doublings > BRACKET_CAP:
            raise NumericError(
                "multiplier bracketing failed: phi(%.3e) = %.3e after %d doublings "
                "(radius %.3e, curvature %.3e)"
                % (hi, phi_hi, BRACKET_CAP, ball.radius, ball.curvature)
            )
        lo, hi = hi, 2.0 * hi
        phi_hi, x_hi = phi(hi)
        evals += 1

    # bisect, always keeping the feasible (phi <= 0) end as the candidate;
    # besides the distance residual, drive the complementarity product
    # lam * g(x) to zero on the constraint-value scale (the radius-relative
    # tolerance alone is too loose when the ball is huge)
    phi_tol = PHI_TOL * (1.0 + ball.radius)

    def comp_residual(lam, phi_val):
        dist = ball.radius + phi_val
        return abs(lam * 0.5 * ball.curvature * (dist * dist - ball.radius**2))

    while (
        abs(phi_hi) > phi_tol or comp_residual(hi, phi_hi) > 1e-9 * (1.0 + hi)
    ) and (hi - lo) > WIDTH_TOL * (1.0 + hi):
        mid = 0.5 * (lo + hi)
        phi_mid, x_mid = phi(mid)
        evals += 1
        if phi_mid <= 0.0:
            hi, x_hi, phi_hi = mid, x_mid, phi_mid
        else:
            lo = mid

    return _finish(p1, x_hi, hi, x_k, q, L_f, ball, evals)


def _finish(p1, x, lam, x_k, q, L_f, ball, evals):
    dist = float(np.linalg.norm(x - ball.center))
    return SubproblemResult(
        x=x,
        lam=lam,
        stationarity_residual=_stationarity_residual(p1, x, x_k, q, L_f, ball, lam),
        complementarity=lam * (dist - ball.radius),
        iterations_rootfind=evals,
    )


def _solve_l1_exact(p1: L1Regularizer, x_k, q, L_f, ball: BallConstraint):
    """Exact multiplier for the l1 subproblem via piecewise linear-quadratic roots.

    In the rescaled multiplier ``nu = lam * curvature`` the prox path is
    piecewise rational with breakpoints where coordinates enter or leave the
    soft-threshold dead zone; on each piece the distance equation reduces to
    one quadratic.
    """
    a = L_f * x_k - q
    w_hat = ball.center
    w = p1.weights
    Lf = float(L_f)
    R = ball.radius

    # breakpoints: a_i + nu * w_hat_i = +/- w_i
    pts = []
    for ai, ci, wi in zip(a, w_hat, w):
        if ci != 0.0:
            for target in (wi, -wi):
                nu = (target - ai) / ci
                if nu > 0.0 and math.isfinite(nu):
                    pts.append(nu)
    knots = [0.0] + sorted(set(pts)) + [math.inf]

    def residual_sq_coeffs(nu_probe):
        # numerator of x(nu) - center is affine per coordinate on the piece
        s = a + nu_probe * w_hat
        alpha = np.where(
            s > w, a - w - Lf * w_hat, np.where(s < -w, a + w - Lf * w_hat, -Lf * w_hat)
        )
        beta = np.where(np.abs(s) <= w, -w_hat, 0.0)
        A = float(np.dot(beta, beta)) - R * R
        B = 2.0 * float(np.dot(alpha, beta)) - 2.0 * R * R * Lf
        C = float(np.dot(alpha, alpha)) - R * R * Lf * Lf
        return A, B, C

    def F(nu):
        if math.isinf(nu):
            return -math.inf
        x = prox_path_point(p1, x_k, q, Lf, ball, nu / ball.curvature)
        d = float(np.linalg.norm(x - ball.center))
        return (d * d - R * R) * (Lf + nu) ** 2

    evals = 0
    for left, right in zip(knots[:-1], knots[1:]):
        evals += 1
        if F(left) <= 0.0:
            # root attained at the left knot itself
            return left / ball.curvature, evals
        probe = left + 1.0 if math.isinf(right) else 0.5 * (left + right)
        A, B, C = residual_sq_coeffs(probe)
        roots = _quadratic_roots(A, B, C)
        slack = 1e-12 * (1.0 + left)
        for nu in roots:
            if left - slack <= nu and (math.isinf(right) or nu <= right + slack):
                return max(nu, left) / ball.curvature, evals
    raise NumericError("exact l1 multiplier search exhausted all pieces")


def _quadratic_roots(A, B, C):
    if A == 0.0:
        if B == 0.0:
            return []
        return [-C / B]
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    # numerically stable pairing
    if B >= 0:
        r1 = (-B - sq) / (2.0 * A)
    else:
        r1 = (-B + sq) / (2.0 * A)
    r2 = C / (A * r1) if r1 != 0.0 else (-B / A - r1)
    return sorted([r1, r2])
