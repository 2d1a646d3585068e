"""Isaacs Hamiltonians over finite action grids.

For the generator L(t, x, u, v; grad, hess) = <b, grad> + 0.5 tr(sigma sigma^T hess)
the two one-sided Hamiltonians are

    lower:  max_u min_v L   (v sees u),
    upper:  min_v max_u L   (u sees v),

and the priority-weighted Hamiltonian is p(t, x) * lower + (1 - p) * upper.
Lower <= upper always (exchanging max and min), so the weighted one is
sandwiched between them.  The action grids are finite, which turns each
evaluation into a small matrix game handled by :mod:`isaacslab.static_game`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import ProblemError, ProblemSpec
from .static_game import LocalGameMatrix, lower_value, mix, upper_value

__all__ = [
    "DifferentialState",
    "generator",
    "local_matrix",
    "hamiltonian_lower",
    "hamiltonian_upper",
    "hamiltonian_mixed",
    "generator_tensor",
    "hamiltonian_batch",
]

_SYM_TOL = 1e-12


@dataclass(frozen=True)
class DifferentialState:
    """Point (t, x) together with candidate derivatives (grad, hess).

    ``hess`` must be symmetric to within 1e-12; it stands for a second
    derivative, and the trace term silently symmetrizes otherwise.
    """

    t: float
    x: np.ndarray
    grad: np.ndarray
    hess: np.ndarray

    def __post_init__(self) -> None:
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        grad = np.atleast_1d(np.asarray(self.grad, dtype=float))
        hess = np.atleast_2d(np.asarray(self.hess, dtype=float))
        d = x.shape[0]
        if grad.shape != (d,) or hess.shape != (d, d):
            raise ProblemError(
                f"grad must have shape ({d},) and hess ({d}, {d}); "
                f"got {grad.shape} and {hess.shape}"
            )
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(grad)) and np.all(np.isfinite(hess))):
            raise ProblemError("state, grad and hess must be finite")
        if np.max(np.abs(hess - hess.T), initial=0.0) > _SYM_TOL:
            raise ProblemError("hess must be symmetric to within 1e-12")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "grad", grad)
        object.__setattr__(self, "hess", hess)


def generator_tensor(
    spec: ProblemSpec,
    t: float,
    X: np.ndarray,
    grads: np.ndarray,
    hesses: np.ndarray,
) -> np.ndarray:
    """Generator values for every action pair at a batch of states.

    X: (n, d), grads: (n, d), hesses: (n, d, d).  Returns (n, ku, kv);
    entry [i, a, b] is L at state i under u-action a and v-action b.
    """
    X = np.asarray(X, dtype=float)
    grads = np.asarray(grads, dtype=float)
    hesses = np.asarray(hesses, dtype=float)
    n = X.shape[0]
    ku, kv = spec.actions_u.size, spec.actions_v.size
    out = np.empty((n, ku, kv))
    for a in range(ku):
        U = np.broadcast_to(spec.actions_u.array[a], (n, spec.actions_u.dim))
        for b in range(kv):
            V = np.broadcast_to(spec.actions_v.array[b], (n, spec.actions_v.dim))
            bvec = spec.drift(t, X, U, V)
            sig = spec.diffusion(t, X, U, V)
            # 0.5 * tr(sigma sigma^T hess) = 0.5 * sum_{i,j} (sigma sigma^T)_{ij} hess_{ij}
            a2 = np.einsum("nik,njk->nij", sig, sig)
            out[:, a, b] = np.einsum("ni,ni->n", bvec, grads) + 0.5 * np.einsum(
                "nij,nij->n", a2, hesses
            )
    return out


def generator(spec: ProblemSpec, state: DifferentialState, u, v) -> float:
    """<b, grad> + 0.5 tr(sigma sigma^T hess) at one point and action pair."""
    spec._check_time(state.t)
    iu = spec.actions_u.index_of(u)
    iv = spec.actions_v.index_of(v)
    tens = generator_tensor(
        spec, state.t, state.x[None, :], state.grad[None, :], state.hess[None, :, :]
    )
    return float(tens[0, iu, iv])


def local_matrix(spec: ProblemSpec, state: DifferentialState) -> LocalGameMatrix:
    """The generator as a matrix game over the two action grids."""
    spec._check_time(state.t)
    tens = generator_tensor(
        spec, state.t, state.x[None, :], state.grad[None, :], state.hess[None, :, :]
    )
    return LocalGameMatrix(tens[0])


def hamiltonian_lower(spec: ProblemSpec, state: DifferentialState) -> float:
    """max_u min_v of the generator: the side where v sees u."""
    value, _, _ = lower_value(local_matrix(spec, state))
    return value


def hamiltonian_upper(spec: ProblemSpec, state: DifferentialState) -> float:
    """min_v max_u of the generator: the side where u sees v."""
    value, _, _ = upper_value(local_matrix(spec, state))
    return value


def hamiltonian_mixed(spec: ProblemSpec, state: DifferentialState) -> float:
    """Priority-weighted Hamiltonian p(t,x) * lower + (1 - p(t,x)) * upper.

    Degenerate priorities reproduce the one-sided values bitwise.
    """
    p = spec.priority.scalar(state.t, state.x)
    return mix(p, hamiltonian_lower(spec, state), hamiltonian_upper(spec, state))


def hamiltonian_batch(
    spec: ProblemSpec,
    t: float,
    X: np.ndarray,
    grads: np.ndarray,
    hesses: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (lower, upper, mixed) over a batch of states.

    The mixed array uses the same exact-endpoint rule as :func:`mix`:
    where p == 1 it is the lower array entry itself, where p == 0 the
    upper entry, bitwise.
    """
    tens = generator_tensor(spec, t, X, grads, hesses)
    lower = tens.min(axis=2).max(axis=1)
    upper = tens.max(axis=1).min(axis=1)
    p = spec.priority_values(t, np.asarray(X, dtype=float))
    blend = p * lower + (1.0 - p) * upper
    mixed = np.where(p == 1.0, lower, np.where(p == 0.0, upper, blend))
    return lower, upper, mixed
