"""Support functions of compact polar-cone bases and their smooth majorants.

Three cone families are provided.  For each one the membership test
``y in K`` is equivalent to ``support_value(y) <= 0``:

* nonpositive orthant: base is the probability simplex, support value is
  ``max_i y_i``, smoothed by a temperature log-sum-exp;
* negative-semidefinite matrices: base is the unit-trace spectraplex,
  support value is the maximum eigenvalue, smoothed by log-sum-exp over
  the spectrum;
* second-order cone (p = 2): support value is ``||y[:m]|| - y[m]``,
  smoothed by the hyperbolic perturbation ``sqrt(||y[:m]||^2 + mu^2)``.

Each smoothed kernel h_mu majorizes the support value with a uniform gap
``alpha3 * mu`` and carries a gradient-Lipschitz certificate
``alpha1 + alpha2 / mu``.  An additive shift ``alpha4 * mu`` makes the
family strictly decreasing in mu, which the solver relies on to keep
iterates strictly feasible while mu shrinks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import MuUnderflowWarning, NumericError, UnsupportedFamilyError

MU_FLOOR = 1e-12
SYMMETRY_TOL = 1e-10
DEFAULT_SHIFT = 1e-5


def _clamp_mu(mu: float) -> float:
    """Validate mu > 0 and clamp below the floor (Lipschitz constants blow up otherwise)."""
    mu = float(mu)
    if not math.isfinite(mu) or mu <= 0.0:
        raise ValueError(f"smoothing parameter must be positive, got {mu}")
    if mu < MU_FLOOR:
        warnings.warn(
            f"smoothing parameter {mu:.3e} clamped to {MU_FLOOR:.0e}",
            MuUnderflowWarning,
            stacklevel=3,
        )
        return MU_FLOOR
    return mu


def stable_logsumexp(v, mu):
    """Temperature log-sum-exp with its softmax weights.

    Returns ``(max(v) + mu * log(sum_i exp((v_i - max(v)) / mu)), w)`` where
    ``w`` is the corresponding softmax.  The max shift keeps every exponent
    nonpositive, so the evaluation cannot overflow even for mu near 1e-12.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("expected a non-empty 1-D vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite entries in log-sum-exp input")
    mu = _clamp_mu(mu)
    top = float(np.max(v))
    expo = np.exp((v - top) / mu)
    total = float(np.sum(expo))
    value = top + mu * math.log(total)
    return value, expo / total


def l1_smoothing_value(y, mu):
    """Smooth majorant of the l1 norm: ``sum_i sqrt(y_i^2 + mu^2)``.

    Standalone kernel with certificate (0, 1, m); it is not attached to any
    cone family here because none of the supported bases has an l1-norm
    support function.
    """
    y = np.asarray(y, dtype=float)
    mu = _clamp_mu(mu)
    return float(np.sum(np.sqrt(y * y + mu * mu)))


def l1_smoothing_gradient(y, mu):
    y = np.asarray(y, dtype=float)
    mu = _clamp_mu(mu)
    return y / np.sqrt(y * y + mu * mu)


@dataclass(frozen=True)
class SmoothingCert:
    """Certificate of a majorizing smoothing family.

    ``alpha3`` is the reported gap slope and already includes the additive
    shift slope ``alpha4``; ``base_norm_bound`` is sup of the norm over the
    base set.
    """

    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    base_norm_bound: float

    def __post_init__(self):
        if self.alpha1 < 0 or self.alpha4 < 0:
            raise ValueError("alpha1 and alpha4 must be nonnegative")
        if self.alpha2 <= 0 or self.alpha3 <= 0 or self.base_norm_bound <= 0:
            raise ValueError("alpha2, alpha3 and base_norm_bound must be positive")

    def gradient_lipschitz(self, mu: float) -> float:
        return self.alpha1 + self.alpha2 / _clamp_mu(mu)


class ConeBaseOracle:
    """Common interface of the per-family kernels.

    Subclasses fix a compact base B of the polar cone and provide the
    support value, the smoothed value/gradient, and small residual helpers
    used by tests and diagnostics.
    """

    family: str
    cert: SmoothingCert

    def support_value(self, y) -> float:
        raise NotImplementedError

    def msa_value(self, y, mu) -> float:
        return self.msa_value_and_gradient(y, mu)[0]

    def msa_gradient(self, y, mu):
        return self.msa_value_and_gradient(y, mu)[1]

    def msa_value_and_gradient(self, y, mu):
        """Value and gradient from one pass (one eigendecomposition for matrices)."""
        raise NotImplementedError

    def base_residual(self, u) -> float:
        """How far u is from the base set B (0 means membership)."""
        raise NotImplementedError

    def polar_residual(self, v) -> float:
        """How far v is from the polar cone (0 means membership)."""
        raise NotImplementedError

    def zero_element(self):
        raise NotImplementedError


class NonposOrthant(ConeBaseOracle):
    """Orthant constraint ``y <= 0``; base is the probability simplex."""

    family = "nonpos_orthant"

    def __init__(self, m: int, alpha4: float = DEFAULT_SHIFT):
        if m < 1:
            raise ValueError("orthant dimension must be >= 1")
        self.m = int(m)
        self.cert = SmoothingCert(0.0, 1.0, math.log(m) + alpha4, alpha4, 1.0)

    def _check(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.m,):
            raise ValueError(f"expected shape ({self.m},), got {y.shape}")
        if not np.all(np.isfinite(y)):
            raise ValueError("non-finite entries in cone argument")
        return y

    def support_value(self, y):
        return float(np.max(self._check(y)))

    def msa_value_and_gradient(self, y, mu):
        y = self._check(y)
        value, weights = stable_logsumexp(y, mu)
        return value + self.cert.alpha4 * float(mu), weights

    def base_residual(self, u):
        u = np.asarray(u, dtype=float)
        return max(abs(float(np.sum(u)) - 1.0), max(0.0, -float(np.min(u))))

    def polar_residual(self, v):
        v = np.asarray(v, dtype=float)
        return max(0.0, -float(np.min(v)))

    def zero_element(self):
        return np.zeros(self.m)


class NegSemidef(ConeBaseOracle):
    """Matrix constraint ``y`` negative semidefinite; base is the spectraplex."""

    family = "neg_semidef"

    def __init__(self, m: int, alpha4: float = DEFAULT_SHIFT):
        if m < 1:
            raise ValueError("matrix order must be >= 1")
        self.m = int(m)
        self.cert = SmoothingCert(0.0, 1.0, math.log(m) + alpha4, alpha4, 1.0)

    def _check(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.m, self.m):
            raise ValueError(f"expected shape ({self.m}, {self.m}), got {y.shape}")
        if not np.all(np.isfinite(y)):
            raise ValueError("non-finite entries in cone argument")
        skew = np.linalg.norm(y - y.T)
        if skew > SYMMETRY_TOL * (1.0 + np.linalg.norm(y)):
            raise ValueError(f"matrix asymmetry {skew:.3e} exceeds tolerance")
        return 0.5 * (y + y.T)

    def _eigh(self, y):
        try:
            return np.linalg.eigh(y)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
            raise NumericError("symmetric eigendecomposition failed") from exc

    def support_value(self, y):
        vals = self._eigh(self._check(y))[0]
        return float(vals[-1])

    def msa_value_and_gradient(self, y, mu):
        vals, vecs = self._eigh(self._check(y))
        # descending order; softmax weights below machine epsilon are harmless
        vals, vecs = vals[::-1], vecs[:, ::-1]
        value, weights = stable_logsumexp(vals, mu)
        grad = (vecs * weights) @ vecs.T
        grad = 0.5 * (grad + grad.T)
        return value + self.cert.alpha4 * float(mu), grad

    def base_residual(self, u):
        u = np.asarray(u, dtype=float)
        u = 0.5 * (u + u.T)
        vals = self._eigh(u)[0]
        return max(abs(float(np.trace(u)) - 1.0), max(0.0, -float(vals[0])))

    def polar_residual(self, v):
        v = np.asarray(v, dtype=float)
        vals = self._eigh(0.5 * (v + v.T))[0]
        return max(0.0, -float(vals[0]))

    def zero_element(self):
        return np.zeros((self.m, self.m))


class PCone(ConeBaseOracle):
    """Norm cone ``||y[:m]||_p <= y[m]``; only p = 2 carries a smoothing."""

    family = "p_cone"

    def __init__(self, m: int, p: float = 2.0, alpha4: float = DEFAULT_SHIFT):
        if m < 1:
            raise ValueError("block dimension must be >= 1")
        if p != 2:
            raise UnsupportedFamilyError(
                f"p-cone smoothing is only available for p = 2, got p = {p}"
            )
        self.m = int(m)
        self.p = float(p)
        self.cert = SmoothingCert(0.0, 1.0, 1.0 + alpha4, alpha4, math.sqrt(2.0))

    def _check(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.m + 1,):
            raise ValueError(f"expected shape ({self.m + 1},), got {y.shape}")
        if not np.all(np.isfinite(y)):
            raise ValueError("non-finite entries in cone argument")
        return y

    def support_value(self, y):
        y = self._check(y)
        return float(np.linalg.norm(y[:-1]) - y[-1])

    def msa_value_and_gradient(self, y, mu):
        y = self._check(y)
        mu = _clamp_mu(mu)
        root = math.sqrt(float(np.dot(y[:-1], y[:-1])) + mu * mu)
        value = root - y[-1] + self.cert.alpha4 * mu
        grad = np.empty_like(y)
        grad[:-1] = y[:-1] / root
        grad[-1] = -1.0
        return value, grad

    def base_residual(self, u):
        u = np.asarray(u, dtype=float)
        return max(max(0.0, float(np.linalg.norm(u[:-1])) - 1.0), abs(float(u[-1]) + 1.0))

    def polar_residual(self, v):
        v = np.asarray(v, dtype=float)
        return max(0.0, float(np.linalg.norm(v[:-1]) + v[-1]))

    def zero_element(self):
        return np.zeros(self.m + 1)
