"""Problem descriptions for finite-action stochastic differential games.

A problem bundles controlled dynamics dX = b(t, X, u, v) dt + sigma(t, X, u, v) dW,
a terminal payoff g(X_T) that u maximizes and v minimizes, finite action
grids for both players, and a priority function p(t, x) in [0, 1] giving
the probability that v moves second (sees u) in each short round.

Coefficients, payoffs and priorities come from small named families so
that a problem is fully determined by (family name, parameter vector)
triples; that is what makes text configs and bitwise replay possible.
Every coefficient family declares a Lipschitz constant in x and a linear
growth constant, and ``validate_assumptions`` cross-checks the declared
constants against sampled evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ProblemError",
    "ActionSet",
    "CoefficientSpec",
    "PayoffSpec",
    "PrioritySpec",
    "ProblemSpec",
    "AssumptionReport",
    "eval_coefficients",
    "validate_assumptions",
    "coefficient_family_names",
    "payoff_family_names",
    "priority_family_names",
]


class ProblemError(ValueError):
    """Invalid problem data: bad family, parameters, actions, or domain."""


def _params_array(params, count: int, what: str) -> np.ndarray:
    arr = np.asarray(params, dtype=float).ravel()
    if arr.size != count:
        raise ProblemError(f"{what} expects {count} parameters, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ProblemError(f"{what} parameters must be finite")
    return arr


@dataclass(frozen=True)
class ActionSet:
    """Finite ordered list of distinct action vectors.

    Scalar actions are stored as length-1 vectors.  Order is meaningful:
    strategies refer to actions by index.
    """

    points: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ProblemError("action set must be non-empty")
        pts = []
        width = None
        for p in self.points:
            row = tuple(float(c) for c in (np.atleast_1d(np.asarray(p, dtype=float))))
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ProblemError("all actions must have the same dimension")
            if not all(np.isfinite(row)):
                raise ProblemError("action coordinates must be finite")
            pts.append(row)
        if len(set(pts)) != len(pts):
            raise ProblemError("action vectors must be distinct")
        object.__setattr__(self, "points", tuple(pts))

    @classmethod
    def from_values(cls, values) -> "ActionSet":
        return cls(tuple((float(v),) if np.isscalar(v) else tuple(v) for v in values))

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return len(self.points[0])

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    def index_of(self, action) -> int:
        """Index of an action vector, compared by exact value."""
        row = tuple(float(c) for c in np.atleast_1d(np.asarray(action, dtype=float)))
        try:
            return self.points.index(row)
        except ValueError:
            raise ProblemError(f"action {row} is not in the action set") from None


# --- coefficient families ---------------------------------------------------
#
# Batch convention: X has shape (n, d), U shape (n, ku), V shape (n, kv);
# drift returns (n, d), diffusion returns (n, d, d_prime).  Rows are
# independent samples; broadcasting a single action over n rows is the
# caller's job (np.broadcast_to, no copy).


class _ConstantCoefficients:
    """b and sigma constant in (t, x, u, v): params = [b (d), sigma rows (d*d')]"""

    name = "constant"
    state_independent = True

    @staticmethod
    def param_count(d: int, d_prime: int) -> int:
        return d + d * d_prime

    @staticmethod
    def split(params: np.ndarray, d: int, d_prime: int):
        return params[:d], params[d:].reshape(d, d_prime)

    @classmethod
    def drift(cls, params, d, d_prime, t, X, U, V):
        b, _ = cls.split(params, d, d_prime)
        return np.broadcast_to(b, (X.shape[0], d)).copy()

    @classmethod
    def diffusion(cls, params, d, d_prime, t, X, U, V):
        _, sig = cls.split(params, d, d_prime)
        return np.broadcast_to(sig, (X.shape[0], d, d_prime)).copy()

    @classmethod
    def lipschitz_bound(cls, params, d, d_prime, u_set, v_set) -> float:
        return 0.0

    @classmethod
    def growth_bound(cls, params, d, d_prime, u_set, v_set) -> float:
        b, sig = cls.split(params, d, d_prime)
        return float(np.linalg.norm(b) + np.linalg.norm(sig))


class _AffineCoefficients:
    """Diagonal-affine drift b_i = c0_i + c1_i x_i, constant sigma.

    params = [c0 (d), c1 (d), sigma rows (d*d')].
    """

    name = "affine"
    state_independent = False

    @staticmethod
    def param_count(d: int, d_prime: int) -> int:
        return 2 * d + d * d_prime

    @staticmethod
    def split(params: np.ndarray, d: int, d_prime: int):
        return params[:d], params[d : 2 * d], params[2 * d :].reshape(d, d_prime)

    @classmethod
    def drift(cls, params, d, d_prime, t, X, U, V):
        c0, c1, _ = cls.split(params, d, d_prime)
        return c0[None, :] + c1[None, :] * X

    @classmethod
    def diffusion(cls, params, d, d_prime, t, X, U, V):
        _, _, sig = cls.split(params, d, d_prime)
        return np.broadcast_to(sig, (X.shape[0], d, d_prime)).copy()

    @classmethod
    def lipschitz_bound(cls, params, d, d_prime, u_set, v_set) -> float:
        _, c1, _ = cls.split(params, d, d_prime)
        return float(np.max(np.abs(c1), initial=0.0))

    @classmethod
    def growth_bound(cls, params, d, d_prime, u_set, v_set) -> float:
        c0, c1, sig = cls.split(params, d, d_prime)
        return float(
            max(np.linalg.norm(c0) + np.linalg.norm(sig), np.max(np.abs(c1), initial=0.0))
        )


class _BilinearCoefficients:
    """Drift kappa * <u, v> in every coordinate, diagonal constant sigma.

    params = [kappa, s0]; sigma has s0 on its main diagonal.  Requires the
    two action sets to share a dimension so <u, v> is defined.
    """

    name = "bilinear"
    state_independent = True

    @staticmethod
    def param_count(d: int, d_prime: int) -> int:
        return 2

    @classmethod
    def drift(cls, params, d, d_prime, t, X, U, V):
        kappa = params[0]
        if U.shape[-1] != V.shape[-1]:
            raise ProblemError("bilinear drift needs equal action dimensions")
        prod = np.sum(U * V, axis=-1)
        return kappa * prod[:, None] * np.ones((1, d))

    @classmethod
    def diffusion(cls, params, d, d_prime, t, X, U, V):
        sig = np.zeros((d, d_prime))
        np.fill_diagonal(sig, params[1])
        return np.broadcast_to(sig, (X.shape[0], d, d_prime)).copy()

    @classmethod
    def lipschitz_bound(cls, params, d, d_prime, u_set, v_set) -> float:
        return 0.0

    @classmethod
    def growth_bound(cls, params, d, d_prime, u_set, v_set) -> float:
        prods = np.abs(u_set.array @ v_set.array.T)
        kappa, s0 = params
        return float(
            abs(kappa) * prods.max() * np.sqrt(d) + abs(s0) * np.sqrt(min(d, d_prime))
        )


_COEFFICIENT_FAMILIES = {
    f.name: f for f in (_ConstantCoefficients, _AffineCoefficients, _BilinearCoefficients)
}


def coefficient_family_names() -> tuple[str, ...]:
    return tuple(sorted(_COEFFICIENT_FAMILIES))


@dataclass(frozen=True)
class CoefficientSpec:
    """Named coefficient family instance: dynamics of the controlled state."""

    family: str
    params: tuple[float, ...]
    dim: int
    noise_dim: int

    def __post_init__(self) -> None:
        if self.family not in _COEFFICIENT_FAMILIES:
            raise ProblemError(
                f"unknown coefficient family {self.family!r}; "
                f"known: {coefficient_family_names()}"
            )
        if self.dim < 1 or self.noise_dim < 1:
            raise ProblemError("state and noise dimensions must be positive")
        fam = _COEFFICIENT_FAMILIES[self.family]
        arr = _params_array(
            self.params, fam.param_count(self.dim, self.noise_dim),
            f"coefficient family {self.family!r}",
        )
        object.__setattr__(self, "params", tuple(arr))
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "noise_dim", int(self.noise_dim))

    @property
    def _fam(self):
        return _COEFFICIENT_FAMILIES[self.family]

    @property
    def state_independent(self) -> bool:
        return self._fam.state_independent

    def drift(self, t: float, X: np.ndarray, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        return self._fam.drift(
            np.asarray(self.params), self.dim, self.noise_dim, t, X, U, V
        )

    def diffusion(self, t: float, X: np.ndarray, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        return self._fam.diffusion(
            np.asarray(self.params), self.dim, self.noise_dim, t, X, U, V
        )

    def lipschitz_bound(self, u_set: ActionSet, v_set: ActionSet) -> float:
        return self._fam.lipschitz_bound(
            np.asarray(self.params), self.dim, self.noise_dim, u_set, v_set
        )

    def growth_bound(self, u_set: ActionSet, v_set: ActionSet) -> float:
        return self._fam.growth_bound(
            np.asarray(self.params), self.dim, self.noise_dim, u_set, v_set
        )


# --- payoff families ---------------------------------------------------------


class _CosinePayoff:
    """g(x) = amplitude * cos(omega * sum_i x_i); params = [amplitude, omega]."""

    name = "cosine"

    @staticmethod
    def param_count(d: int) -> int:
        return 2

    @staticmethod
    def value(params, d, X):
        return params[0] * np.cos(params[1] * X.sum(axis=-1))

    @staticmethod
    def bound(params, d) -> float:
        return float(abs(params[0]))


class _ClippedQuadraticPayoff:
    """g(x) = min(|x|^2, cap); params = [cap >= 0].

    The clip keeps g bounded so the standing assumptions hold; choose the
    cap at least the squared domain radius and the clip never binds on
    the grid.
    """

    name = "clipped_quadratic"

    @staticmethod
    def param_count(d: int) -> int:
        return 1

    @staticmethod
    def value(params, d, X):
        if params[0] < 0:
            raise ProblemError("clipped_quadratic cap must be non-negative")
        return np.minimum(np.sum(X * X, axis=-1), params[0])

    @staticmethod
    def bound(params, d) -> float:
        return float(params[0])


class _ConstantPayoff:
    """g(x) = c; params = [c]."""

    name = "constant"

    @staticmethod
    def param_count(d: int) -> int:
        return 1

    @staticmethod
    def value(params, d, X):
        return np.full(X.shape[:-1], params[0], dtype=float)

    @staticmethod
    def bound(params, d) -> float:
        return float(abs(params[0]))


_PAYOFF_FAMILIES = {
    f.name: f for f in (_CosinePayoff, _ClippedQuadraticPayoff, _ConstantPayoff)
}


def payoff_family_names() -> tuple[str, ...]:
    return tuple(sorted(_PAYOFF_FAMILIES))


@dataclass(frozen=True)
class PayoffSpec:
    """Named terminal payoff g; continuous and bounded by ``bound``."""

    family: str
    params: tuple[float, ...]
    dim: int

    def __post_init__(self) -> None:
        if self.family not in _PAYOFF_FAMILIES:
            raise ProblemError(
                f"unknown payoff family {self.family!r}; known: {payoff_family_names()}"
            )
        fam = _PAYOFF_FAMILIES[self.family]
        arr = _params_array(
            self.params, fam.param_count(self.dim), f"payoff family {self.family!r}"
        )
        object.__setattr__(self, "params", tuple(arr))
        object.__setattr__(self, "dim", int(self.dim))

    def value(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return _PAYOFF_FAMILIES[self.family].value(np.asarray(self.params), self.dim, X)

    @property
    def bound(self) -> float:
        return _PAYOFF_FAMILIES[self.family].bound(np.asarray(self.params), self.dim)


# --- priority families --------------------------------------------------------


class _ConstantPriority:
    """p(t, x) = p0; params = [p0 in [0, 1]]."""

    name = "constant"
    time_only = True

    @staticmethod
    def param_count(d: int) -> int:
        return 1

    @staticmethod
    def value(params, d, t, X):
        return np.full(X.shape[:-1], params[0], dtype=float)


class _LinearTimePriority:
    """p(t, x) = a + b * t; params = [a, b]; range-checked at evaluation."""

    name = "linear_time"
    time_only = True

    @staticmethod
    def param_count(d: int) -> int:
        return 2

    @staticmethod
    def value(params, d, t, X):
        return np.full(X.shape[:-1], params[0] + params[1] * t, dtype=float)


class _LogisticPriority:
    """p(t, x) = 1 / (1 + exp(-(w0 + wt*t + <wx, x>))); params = [w0, wt, wx (d)].

    Values always lie strictly inside (0, 1).  Time-only when wx == 0.
    """

    name = "logistic"
    time_only = False

    @staticmethod
    def param_count(d: int) -> int:
        return 2 + d

    @staticmethod
    def value(params, d, t, X):
        z = params[0] + params[1] * t + X @ params[2:]
        # clip the exponent, not the probability: keeps values in (0, 1)
        return 1.0 / (1.0 + np.exp(-np.clip(z, -700.0, 700.0)))


_PRIORITY_FAMILIES = {
    f.name: f for f in (_ConstantPriority, _LinearTimePriority, _LogisticPriority)
}


def priority_family_names() -> tuple[str, ...]:
    return tuple(sorted(_PRIORITY_FAMILIES))


@dataclass(frozen=True)
class PrioritySpec:
    """Named priority function p(t, x): probability that v moves second."""

    family: str
    params: tuple[float, ...]
    dim: int

    def __post_init__(self) -> None:
        if self.family not in _PRIORITY_FAMILIES:
            raise ProblemError(
                f"unknown priority family {self.family!r}; known: {priority_family_names()}"
            )
        fam = _PRIORITY_FAMILIES[self.family]
        arr = _params_array(
            self.params, fam.param_count(self.dim), f"priority family {self.family!r}"
        )
        object.__setattr__(self, "params", tuple(arr))
        object.__setattr__(self, "dim", int(self.dim))
        if self.family == "constant" and not 0.0 <= arr[0] <= 1.0:
            raise ProblemError(f"constant priority must lie in [0, 1], got {arr[0]}")

    @property
    def time_only(self) -> bool:
        fam = _PRIORITY_FAMILIES[self.family]
        if self.family == "logistic":
            return bool(np.all(np.asarray(self.params)[2:] == 0.0))
        return fam.time_only

    def value(self, t: float, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = _PRIORITY_FAMILIES[self.family].value(
            np.asarray(self.params), self.dim, t, X
        )
        if out.size and (out.min() < 0.0 or out.max() > 1.0):
            raise ProblemError(
                f"priority family {self.family!r} left [0, 1] at t={t}"
            )
        return out

    def scalar(self, t: float, x=None) -> float:
        """p at a single point; x may be omitted for time-only families."""
        if x is None:
            if not self.time_only:
                raise ProblemError("state required: priority is state-dependent")
            x = np.zeros(self.dim)
        X = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, self.dim)
        return float(self.value(t, X)[0])


# --- the assembled problem -----------------------------------------------------


@dataclass(frozen=True)
class ProblemSpec:
    """Complete game description: dynamics, payoff, priority, actions, window.

    ``horizon`` is the terminal time T, ``start_time`` the initial time s
    with 0 <= s <= T, ``start_state`` the initial state x in R^d.
    """

    coefficients: CoefficientSpec
    payoff: PayoffSpec
    priority: PrioritySpec
    actions_u: ActionSet
    actions_v: ActionSet
    horizon: float
    start_time: float = 0.0
    start_state: tuple[float, ...] = field(default=(0.0,))

    def __post_init__(self) -> None:
        if not (self.horizon > 0.0 and np.isfinite(self.horizon)):
            raise ProblemError("horizon T must be positive and finite")
        if not 0.0 <= self.start_time <= self.horizon:
            raise ProblemError("start time must satisfy 0 <= s <= T")
        d = self.coefficients.dim
        if self.payoff.dim != d or self.priority.dim != d:
            raise ProblemError("payoff/priority dimension must match the state dimension")
        x0 = np.atleast_1d(np.asarray(self.start_state, dtype=float))
        if x0.shape != (d,) or not np.all(np.isfinite(x0)):
            raise ProblemError(f"start state must be a finite vector of length {d}")
        object.__setattr__(self, "start_state", tuple(float(c) for c in x0))
        object.__setattr__(self, "horizon", float(self.horizon))
        object.__setattr__(self, "start_time", float(self.start_time))
        if self.coefficients.family == "bilinear" and (
            self.actions_u.dim != self.actions_v.dim
        ):
            raise ProblemError("bilinear coefficients need equal action dimensions")

    @property
    def dim(self) -> int:
        return self.coefficients.dim

    @property
    def noise_dim(self) -> int:
        return self.coefficients.noise_dim

    @property
    def start_state_array(self) -> np.ndarray:
        return np.asarray(self.start_state, dtype=float)

    def _check_time(self, t: float) -> float:
        if not 0.0 <= t <= self.horizon:
            raise ProblemError(f"time {t} outside [0, T] with T={self.horizon}")
        return float(t)

    # batch evaluation used by the solvers; rows are independent samples
    def drift(self, t, X, U, V) -> np.ndarray:
        return self.coefficients.drift(t, X, U, V)

    def diffusion(self, t, X, U, V) -> np.ndarray:
        return self.coefficients.diffusion(t, X, U, V)

    def payoff_values(self, X) -> np.ndarray:
        return self.payoff.value(X)

    def priority_values(self, t, X) -> np.ndarray:
        return self.priority.value(t, X)


def eval_coefficients(
    spec: ProblemSpec, t: float, x, u, v
) -> tuple[np.ndarray, np.ndarray]:
    """Drift and diffusion at a single point, with domain checks.

    ``u`` and ``v`` are action vectors and must belong to the problem's
    action sets (compared by exact value); ``t`` must lie in [0, T].
    Returns (b, sigma) with shapes (d,) and (d, d_prime).
    """
    t = spec._check_time(t)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (spec.dim,):
        raise ProblemError(f"state must have shape ({spec.dim},), got {x.shape}")
    iu = spec.actions_u.index_of(u)
    iv = spec.actions_v.index_of(v)
    X = x[None, :]
    U = spec.actions_u.array[iu][None, :]
    V = spec.actions_v.array[iv][None, :]
    return spec.drift(t, X, U, V)[0], spec.diffusion(t, X, U, V)[0]


@dataclass(frozen=True)
class AssumptionReport:
    """Sampled cross-check of the declared regularity constants."""

    lipschitz_declared: float
    lipschitz_observed: float
    growth_declared: float
    growth_observed: float
    payoff_bound_declared: float
    payoff_observed: float
    priority_min: float
    priority_max: float
    samples: int
    box_radius: float
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def validate_assumptions(
    spec: ProblemSpec,
    box_radius: float = 10.0,
    samples: int = 2000,
    seed: int = 0,
) -> AssumptionReport:
    """Sample (t, x, y, u, v) and compare observed constants to declared ones.

    Observed Lipschitz ratio uses |b(t,x)-b(t,y)| + |sigma(t,x)-sigma(t,y)|_F
    over |x - y|; observed growth uses (|b| + |sigma|_F) / (1 + |x|).  A
    tolerance of 1e-9 absorbs rounding in the comparisons.
    """
    rng = np.random.default_rng(seed)
    d = spec.dim
    n = int(samples)
    t = rng.uniform(0.0, spec.horizon, n)
    X = rng.uniform(-box_radius, box_radius, (n, d))
    Y = rng.uniform(-box_radius, box_radius, (n, d))
    U = spec.actions_u.array[rng.integers(0, spec.actions_u.size, n)]
    V = spec.actions_v.array[rng.integers(0, spec.actions_v.size, n)]

    lip_obs = 0.0
    growth_obs = 0.0
    for i in range(n):
        bx = spec.drift(t[i], X[i : i + 1], U[i : i + 1], V[i : i + 1])[0]
        by = spec.drift(t[i], Y[i : i + 1], U[i : i + 1], V[i : i + 1])[0]
        sx = spec.diffusion(t[i], X[i : i + 1], U[i : i + 1], V[i : i + 1])[0]
        sy = spec.diffusion(t[i], Y[i : i + 1], U[i : i + 1], V[i : i + 1])[0]
        gap = np.linalg.norm(X[i] - Y[i])
        if gap > 1e-12:
            lip_obs = max(
                lip_obs,
                (np.linalg.norm(bx - by) + np.linalg.norm(sx - sy)) / gap,
            )
        growth_obs = max(
            growth_obs,
            (np.linalg.norm(bx) + np.linalg.norm(sx)) / (1.0 + np.linalg.norm(X[i])),
        )

    payoff_obs = float(np.max(np.abs(spec.payoff_values(X))))
    pvals = np.concatenate([spec.priority_values(ti, Xi[None, :]) for ti, Xi in zip(t, X)])
    lip_decl = spec.coefficients.lipschitz_bound(spec.actions_u, spec.actions_v)
    growth_decl = spec.coefficients.growth_bound(spec.actions_u, spec.actions_v)
    bound_decl = spec.payoff.bound

    tol = 1e-9
    failures = []
    if lip_obs > lip_decl + tol:
        failures.append(
            f"observed Lipschitz ratio {lip_obs:.6g} exceeds declared {lip_decl:.6g}"
        )
    if growth_obs > growth_decl + tol:
        failures.append(
            f"observed growth ratio {growth_obs:.6g} exceeds declared {growth_decl:.6g}"
        )
    if payoff_obs > bound_decl + tol:
        failures.append(
            f"observed |g| {payoff_obs:.6g} exceeds declared bound {bound_decl:.6g}"
        )
    if pvals.min() < -tol or pvals.max() > 1.0 + tol:
        failures.append("priority left [0, 1]")

    return AssumptionReport(
        lipschitz_declared=float(lip_decl),
        lipschitz_observed=float(lip_obs),
        growth_declared=float(growth_decl),
        growth_observed=float(growth_obs),
        payoff_bound_declared=float(bound_decl),
        payoff_observed=payoff_obs,
        priority_min=float(pvals.min()),
        priority_max=float(pvals.max()),
        samples=n,
        box_radius=float(box_radius),
        failures=tuple(failures),
    )
