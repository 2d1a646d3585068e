"""One-period matrix games with an information priority.

A finite payoff matrix f(u, v) is played between a maximizing row player u
and a minimizing column player v.  Three values matter:

* lower value  max_u min_v f   (v observes u's move and counters),
* upper value  min_v max_u f   (u observes v's move and counters),
* mixed value  p * lower + (1 - p) * upper  for a priority p in [0, 1],
  the expected outcome when a coin with P(heads) = p decides who moves
  second; heads means v sees u.

Because both players optimize sequentially, the prioritized game also has
an exact saddle representation over strategy pairs (plain action, counter
map): sup-inf and inf-sup coincide.  ``representation_residual`` certifies
this by honest enumeration of every counter map, feasible for action sets
of size at most four.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LocalGameMatrix",
    "StaticSaddle",
    "StaticGameError",
    "mix",
    "lower_value",
    "upper_value",
    "mixed_value",
    "saddle",
    "representation_residual",
    "play_one_period",
]

MAX_ENUMERABLE_ACTIONS = 4


class StaticGameError(ValueError):
    """Malformed matrix, priority, or choice passed to a one-period game."""


def _check_prio(prio: float) -> float:
    prio = float(prio)
    if not 0.0 <= prio <= 1.0:
        raise StaticGameError(f"priority must lie in [0, 1], got {prio}")
    return prio


def mix(prio: float, lower: float, upper: float) -> float:
    """Priority-weighted combination with exact endpoints.

    At prio == 1.0 returns ``lower`` itself and at prio == 0.0 returns
    ``upper`` itself, bitwise, so degenerate priorities reproduce the
    one-sided games with no floating-point residue.
    """
    prio = _check_prio(prio)
    if prio == 1.0:
        return lower
    if prio == 0.0:
        return upper
    return prio * lower + (1.0 - prio) * upper


@dataclass(frozen=True)
class LocalGameMatrix:
    """Payoff table f(u, v); u maximizes over rows, v minimizes over columns.

    ``u_labels`` / ``v_labels`` carry the action indices the rows and
    columns refer to in some enclosing problem; they default to
    0..m-1 / 0..n-1.
    """

    values: np.ndarray
    u_labels: tuple[int, ...] = field(default=())
    v_labels: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.size == 0:
            raise StaticGameError("payoff matrix must be 2-D and non-empty")
        if not np.all(np.isfinite(vals)):
            raise StaticGameError("payoff matrix entries must be finite")
        object.__setattr__(self, "values", vals)
        m, n = vals.shape
        u_labels = self.u_labels or tuple(range(m))
        v_labels = self.v_labels or tuple(range(n))
        if len(u_labels) != m or len(v_labels) != n:
            raise StaticGameError("label lengths must match matrix shape")
        object.__setattr__(self, "u_labels", tuple(int(i) for i in u_labels))
        object.__setattr__(self, "v_labels", tuple(int(j) for j in v_labels))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def _as_matrix(f: LocalGameMatrix | np.ndarray) -> LocalGameMatrix:
    if isinstance(f, LocalGameMatrix):
        return f
    return LocalGameMatrix(np.asarray(f, dtype=float))


def lower_value(f: LocalGameMatrix | np.ndarray) -> tuple[float, int, np.ndarray]:
    """Value and saddle data of the game where v sees u's move.

    Returns ``(value, u_star, beta_star)``: the optimal leading row, and
    v's pointwise-argmin counter map beta_star[u] (one best column per
    row).  Ties break to the lowest index, so the output is deterministic.
    """
    mat = _as_matrix(f).values
    beta_star = mat.argmin(axis=1)
    row_floor = mat.min(axis=1)
    u_star = int(row_floor.argmax())
    return float(row_floor[u_star]), u_star, beta_star


def upper_value(f: LocalGameMatrix | np.ndarray) -> tuple[float, int, np.ndarray]:
    """Value and saddle data of the game where u sees v's move.

    Returns ``(value, v_star, alpha_star)`` with u's counter map
    alpha_star[v] (one best row per column).  Ties break low.
    """
    mat = _as_matrix(f).values
    alpha_star = mat.argmax(axis=0)
    col_ceil = mat.max(axis=0)
    v_star = int(col_ceil.argmin())
    return float(col_ceil[v_star]), v_star, alpha_star


def mixed_value(f: LocalGameMatrix | np.ndarray, prio: float) -> float:
    """Priority-weighted value p * lower + (1 - p) * upper."""
    lo, _, _ = lower_value(f)
    hi, _, _ = upper_value(f)
    return mix(prio, lo, hi)


@dataclass(frozen=True)
class StaticSaddle:
    """Full saddle summary of a one-period prioritized game."""

    lower: float
    upper: float
    mixed: float
    prio: float
    u_star: int
    beta_star: np.ndarray
    v_star: int
    alpha_star: np.ndarray


def saddle(f: LocalGameMatrix | np.ndarray, prio: float) -> StaticSaddle:
    lo, u_star, beta_star = lower_value(f)
    hi, v_star, alpha_star = upper_value(f)
    return StaticSaddle(
        lower=lo,
        upper=hi,
        mixed=mix(prio, lo, hi),
        prio=_check_prio(prio),
        u_star=u_star,
        beta_star=beta_star,
        v_star=v_star,
        alpha_star=alpha_star,
    )


def _all_maps(domain: int, codomain: int) -> np.ndarray:
    """Every map {0..domain-1} -> {0..codomain-1} as an array of rows."""
    grids = np.meshgrid(*[np.arange(codomain)] * domain, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def representation_residual(
    f: LocalGameMatrix | np.ndarray, prio: float
) -> tuple[float, float, float]:
    """Brute-force check of the saddle representation of the mixed value.

    Enumerates every strategy pair ((u, alpha), (v, beta)) where alpha and
    beta are arbitrary counter maps, evaluates
    p * f(u, beta(u)) + (1 - p) * f(alpha(v), v), and reduces to sup-inf
    and inf-sup.  Returns ``(supinf, infsup, residual)`` with residual the
    larger deviation of the two from ``mixed_value``.  Only defined for
    action sets of size at most four (the map count grows as n**m).
    """
    mat = _as_matrix(f)
    prio = _check_prio(prio)
    m, n = mat.shape
    if m > MAX_ENUMERABLE_ACTIONS or n > MAX_ENUMERABLE_ACTIONS:
        raise StaticGameError(
            f"enumeration supports at most {MAX_ENUMERABLE_ACTIONS} actions per side"
        )
    vals = mat.values
    betas = _all_maps(m, n)        # (B, m) candidate counter maps for v
    alphas = _all_maps(n, m)       # (A, n) candidate counter maps for u
    # term1[u, b] = f(u, beta_b(u)); term2[a, v] = f(alpha_a(v), v)
    term1 = vals[np.arange(m)[:, None], betas.T]          # (m, B)
    term2 = vals[alphas, np.arange(n)[None, :]]           # (A, n)
    # payoff[u, a, v, b] = p * term1[u, b] + (1 - p) * term2[a, v]
    payoff = (
        prio * term1[:, None, None, :]
        + (1.0 - prio) * term2[None, :, :, None]
    )
    supinf = float(payoff.min(axis=(2, 3)).max())
    infsup = float(payoff.max(axis=(0, 1)).min())
    mixed = mixed_value(mat, prio)
    residual = max(abs(supinf - mixed), abs(infsup - mixed))
    return supinf, infsup, residual


def _check_choice(
    name: str, choice: tuple[int, np.ndarray], own: int, other: int
) -> tuple[int, np.ndarray]:
    try:
        plain, counter = choice
    except (TypeError, ValueError) as exc:
        raise StaticGameError(f"{name} must be a (plain index, counter map) pair") from exc
    plain = int(plain)
    counter = np.asarray(counter, dtype=int)
    if not 0 <= plain < own:
        raise StaticGameError(f"{name} plain index {plain} out of range 0..{own - 1}")
    if counter.shape != (other,):
        raise StaticGameError(
            f"{name} counter map must have one entry per opponent action ({other})"
        )
    if counter.min(initial=0) < 0 or counter.max(initial=0) >= own:
        raise StaticGameError(f"{name} counter map entries out of range 0..{own - 1}")
    return plain, counter


def play_one_period(
    f: LocalGameMatrix | np.ndarray,
    prio: float,
    u_choice: tuple[int, np.ndarray],
    v_choice: tuple[int, np.ndarray],
    coin: float | None = None,
) -> float:
    """Realized payoff of one period under the coin rule.

    ``u_choice`` is (plain row, counter map alpha: column -> row) and
    ``v_choice`` is (plain column, counter map beta: row -> column).  With
    coin < prio the coin came up heads, v sees u: u commits its plain row
    and v's counter map answers.  Otherwise u's counter map answers v's
    plain column.  ``coin=None`` means prio must be degenerate (0 or 1),
    i.e. the order of moves is deterministic and no draw is consumed.
    """
    mat = _as_matrix(f)
    prio = _check_prio(prio)
    m, n = mat.shape
    u_plain, alpha = _check_choice("u_choice", u_choice, m, n)
    v_plain, beta = _check_choice("v_choice", v_choice, n, m)
    if coin is None:
        if prio not in (0.0, 1.0):
            raise StaticGameError("coin draw required for non-degenerate priority")
        heads = prio == 1.0
    else:
        coin = float(coin)
        if not 0.0 <= coin < 1.0:
            raise StaticGameError(f"coin draw must lie in [0, 1), got {coin}")
        heads = coin < prio
    if heads:
        return float(mat.values[u_plain, beta[u_plain]])
    return float(mat.values[alpha[v_plain], v_plain])
