"""Random l1-regularized NSDP instances and their on-disk format.

The instance family is

    min  sum_i (d_i x_i^4 / 4 + c_i |x_i|^3 / 3) + x'Qx / 2 + b'x + w ||x||_1
    s.t. -A_0 - sum_i x_i A_i  negative semidefinite,

with Q and every A_i positive semidefinite and A_0 positive definite
(eigenvalues in [10, 100]), so the origin is always strictly feasible.

All randomness comes from one Philox counter-based generator keyed by the
seed, with a fixed draw order and a sign-fixed QR so orthogonal factors are
unique; identical (n, m, seed) therefore regenerate identical instances on
any platform with IEEE-754 doubles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .cones import DEFAULT_SHIFT, NegSemidef
from .problems import DCProblem, L1Regularizer, ZeroConcave, poly_quartic_objective, psd_affine_map

SPARSE_DENSITY = 0.2


@dataclass(frozen=True)
class NsdpInstance:
    n: int
    m: int
    seed: int
    Q: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    A: np.ndarray  # stack of n + 1 symmetric PSD matrices, A[0] positive definite
    l1_weight: float = 1.0

    def to_dict(self) -> dict:
        return {
            "family": "nsdp",
            "n": self.n,
            "m": self.m,
            "seed": self.seed,
            "Q": self.Q.tolist(),
            "b": self.b.tolist(),
            "c": self.c.tolist(),
            "d": self.d.tolist(),
            "A": self.A.tolist(),
            "l1_weight": self.l1_weight,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NsdpInstance":
        if d.get("family") != "nsdp":
            raise ValueError(f"unsupported problem family {d.get('family')!r}")
        n, m = int(d["n"]), int(d["m"])
        Q = np.asarray(d["Q"], dtype=float)
        b = np.asarray(d["b"], dtype=float)
        c = np.asarray(d["c"], dtype=float)
        dd = np.asarray(d["d"], dtype=float)
        A = np.asarray(d["A"], dtype=float)
        if Q.shape != (n, n) or b.shape != (n,) or c.shape != (n,) or dd.shape != (n,):
            raise ValueError("inconsistent NSDP field shapes")
        if A.shape != (n + 1, m, m):
            raise ValueError(f"expected {(n + 1, m, m)} constraint stack, got {A.shape}")
        return cls(n=n, m=m, seed=int(d.get("seed", -1)), Q=Q, b=b, c=c, d=dd, A=A,
                   l1_weight=float(d.get("l1_weight", 1.0)))


def _orthogonal(rng, k):
    # sign-fixed QR: forcing diag(R) > 0 makes the factor unique
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def _sparse_positive(rng, k):
    mask = rng.random(k) < SPARSE_DENSITY
    vals = rng.uniform(0.0, 100.0, k)
    return np.where(mask, vals, 0.0)


def _sym(a):
    return 0.5 * (a + a.T)


def generate_nsdp(n: int, m: int, seed: int, l1_weight: float = 1.0) -> NsdpInstance:
    """Deterministic random instance; draw order is part of the contract."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=int(seed)))

    U = _orthogonal(rng, n)
    a = _sparse_positive(rng, n)
    c = _sparse_positive(rng, n)
    d = _sparse_positive(rng, n)
    b_bar = rng.normal(10.0, 1.0, n)

    A = np.empty((n + 1, m, m))
    U0 = _orthogonal(rng, m)
    a0 = rng.uniform(10.0, 100.0, m)
    A[0] = _sym((U0 * a0) @ U0.T)
    for i in range(1, n + 1):
        Ui = _orthogonal(rng, m)
        ai = _sparse_positive(rng, m)
        A[i] = _sym((Ui * ai) @ Ui.T)

    Q = _sym((U * a) @ U.T)
    a_support = (a != 0.0).astype(float)
    b = U @ (a_support * b_bar)

    return NsdpInstance(n=n, m=m, seed=int(seed), Q=Q, b=b, c=c, d=d, A=A,
                        l1_weight=float(l1_weight))


def nsdp_problem(inst: NsdpInstance, alpha4: float = DEFAULT_SHIFT) -> DCProblem:
    """First-order oracles of the instance; the adjoint of the constraint map
    is n trace inner products with the A_i."""
    return DCProblem(
        f=poly_quartic_objective(inst.Q, inst.b, inst.c, inst.d),
        p1=L1Regularizer(np.full(inst.n, inst.l1_weight)),
        p2=ZeroConcave(),
        g=psd_affine_map(inst.A),
        cone=NegSemidef(inst.m, alpha4=alpha4),
        dim=inst.n,
        name=f"nsdp(n={inst.n},m={inst.m},seed={inst.seed})",
    )


def save_instance(inst: NsdpInstance, path) -> None:
    with open(path, "w") as fh:
        json.dump(inst.to_dict(), fh)
        fh.write("\n")


def load_instance(path) -> NsdpInstance:
    with open(path) as fh:
        return NsdpInstance.from_dict(json.load(fh))
