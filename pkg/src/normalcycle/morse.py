"""Morse indices of linear functionals, Morse-data slices and jump measures.

Sign convention: the index of ``xi`` at ``x`` is ``1 - chi`` of the small
superlevel germ ``{xi > xi(x)}`` near ``x``, so a convex set carries its single
critical point at the ``xi``-maximal vertex.  The one-sided fiber used by the
jump measure is taken on the same side, just above the level; with this choice
the jump measure of an indicator is the pushforward of the slice to the line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.optimize import linprog

from .complex import (
    SimplicialComplex,
    _tie_tol,
    as_covector,
    closure_mask,
    require_generic,
    sample_generic_covector,
    subdivide_by_level,
    level_masks,
    upper_link,
)
from .errors import UnknownVertex, ValidationError
from .euler import ConstructibleFunction, cf_indicator, chi_o


@dataclass(frozen=True)
class Atom:
    vertex: int
    index: int
    level: float


@dataclass(frozen=True, eq=False)
class MorseDataSlice:
    """Critical vertices of a generic covector with their indices, by level."""

    covector: np.ndarray
    atoms: tuple[Atom, ...]

    def __eq__(self, other):
        if not isinstance(other, MorseDataSlice):
            return NotImplemented
        return self.atoms == other.atoms and bool(np.array_equal(self.covector, other.covector))

    @property
    def total(self) -> int:
        return sum(a.index for a in self.atoms)

    @property
    def mass(self) -> int:
        return sum(abs(a.index) for a in self.atoms)

    def pushforward(self) -> "JumpMeasure":
        """Image of the slice on the line under ``(xi, x) -> xi(x)``."""
        return JumpMeasure.from_pairs((a.level, a.index) for a in self.atoms)


@dataclass(frozen=True)
class JumpMeasure:
    """Finite atomic integer measure on the line, atoms sorted by location."""

    atoms: tuple[tuple[float, int], ...] = ()

    @classmethod
    def from_pairs(cls, pairs) -> "JumpMeasure":
        acc: dict[float, int] = {}
        for t, m in pairs:
            acc[float(t)] = acc.get(float(t), 0) + int(m)
        return cls(tuple((t, m) for t, m in sorted(acc.items()) if m != 0))

    def __neg__(self):
        return JumpMeasure(tuple((t, -m) for t, m in self.atoms))

    def __add__(self, other):
        return JumpMeasure.from_pairs(self.atoms + other.atoms)

    @property
    def total(self) -> int:
        return sum(m for _, m in self.atoms)

    @property
    def mass(self) -> int:
        return sum(abs(m) for _, m in self.atoms)


# --- indices ---------------------------------------------------------------


def stratum_index(X: SimplicialComplex, xi, sigma, eps: float | None = None) -> int:
    """``1 - chi`` of the upper link of ``sigma``; ``xi`` must be constant on it."""
    return 1 - chi_o(upper_link(X, sigma, xi, eps))


def morse_index(X: SimplicialComplex, xi, v: int, eps: float | None = None) -> int:
    """Morse index of ``xi`` at vertex ``v``; 0 when ``v`` is not a vertex of ``X``.

    Raises:
        UnknownVertex: ``v`` is not a coordinate row of ``X``.
        NonGenericCovector: a link vertex of ``v`` shares its level.
    """
    v = int(v)
    if not 0 <= v < len(X.points):
        raise UnknownVertex(f"vertex id {v} out of range")
    if (v,) not in X.index:
        return 0
    return stratum_index(X, xi, (v,), eps)


def morse_slice(X: SimplicialComplex, xi, eps: float | None = None) -> MorseDataSlice:
    xi = as_covector(xi, X.ambient_dim)
    require_generic(X, xi, eps)
    levels = X.points @ xi
    atoms = []
    for v in X.vertices:
        m = stratum_index(X, xi, (v,), eps)
        if m:
            atoms.append(Atom(v, m, float(levels[v])))
    atoms.sort(key=lambda a: a.level)
    return MorseDataSlice(xi, tuple(atoms))


# --- level-set integrals ---------------------------------------------------


def _as_cf(obj) -> ConstructibleFunction:
    if isinstance(obj, ConstructibleFunction):
        return obj
    if isinstance(obj, SimplicialComplex):
        return cf_indicator(obj)
    raise TypeError(f"expected a complex or constructible function, got {type(obj).__name__}")


def level_integrals(
    f, xi, s: float, eps: float | None = None, method: str = "cells"
) -> tuple[int, int, int]:
    """Euler integrals of ``f`` over ``{xi<s}``, ``{xi=s}`` and ``{xi>s}``.

    Cells on one side of the level are counted directly.  An open ``d``-cell
    crossing the level splits into two open convex ``d``-pieces and an open
    ``(d-1)``-slice; ``method="cells"`` counts these in closed form, while
    ``method="subdivide"`` refines the crossing cells with
    :func:`subdivide_by_level` and counts the pieces (slower, used as a
    cross-check).
    """
    f = _as_cf(f)
    X = f.complex
    xi = as_covector(xi, X.ambient_dim)
    h = X.points @ xi - float(s)
    tol = _tie_tol(X, xi, eps)
    lo, hi = X.level_signs(h, tol)
    signed = f.weights * np.where(X.dims % 2 == 0, 1, -1)
    straddle = (lo < 0) & (hi > 0)
    above = int(signed[(hi > 0) & ~straddle].sum())
    below = int(signed[(lo < 0) & ~straddle].sum())
    on = int(signed[(lo == 0) & (hi == 0)].sum())
    if not straddle.any():
        return below, on, above
    if method == "cells":
        cross = int(signed[straddle].sum())
        return below + cross, on - cross, above + cross
    if method != "subdivide":
        raise ValueError(f"unknown method {method!r}")
    region = closure_mask(X, straddle)
    R = SimplicialComplex(X.points, X.selected(region))
    Y, parents = subdivide_by_level(R, xi, s, eps=eps, return_parents=True)
    to_x = np.array([X.index[R.simplices[p]] for p in parents], dtype=int)
    keep = straddle[to_x]
    yb, yo, ya = level_masks(Y, xi, s, eps)
    ysigns = np.where(Y.dims % 2 == 0, 1, -1)
    w = f.weights[to_x] * ysigns * keep
    return below + int(w[yb].sum()), on + int(w[yo].sum()), above + int(w[ya].sum())


def superlevel_integral(f, xi, c: float, closed: bool = True, eps: float | None = None) -> int:
    _, on, above = level_integrals(f, xi, c, eps)
    return on + above if closed else above


def superlevel_chi(X: SimplicialComplex, xi, c: float, closed: bool = True, eps: float | None = None) -> int:
    """Euler characteristic of ``X & {xi >= c}`` (closed) or ``X & {xi > c}`` (open, chi_o)."""
    return superlevel_integral(cf_indicator(X), xi, c, closed, eps)


def fiber_integral(f, xi, s: float, eps: float | None = None) -> int:
    return level_integrals(f, xi, s, eps)[1]


def _distinct_levels(X: SimplicialComplex, xi) -> np.ndarray:
    return np.unique(X.points[list(X.vertices)] @ xi)


def _one_sided_eps(levels: np.ndarray, scale: float) -> float:
    if len(levels) < 2:
        return max(scale, 1.0)
    return 0.5 * float(np.min(np.diff(levels)))


def _next_level_gap(X: SimplicialComplex, xi, t: float, tol: float) -> float:
    levels = _distinct_levels(X, xi)
    higher = levels[levels > t + tol]
    if len(higher) == 0:
        return max(X.diameter, 1.0)
    return 0.5 * float(higher[0] - t)


def _slice_sum_at(X: SimplicialComplex, xi, t: float, eps) -> int:
    tol = _tie_tol(X, xi, eps)
    return sum(a.index for a in morse_slice(X, xi, eps).atoms if abs(a.level - t) <= tol)


def index_sum_check(X: SimplicialComplex, xi, t: float, eps: float | None = None) -> tuple[int, int]:
    """Index sum at level ``t`` against ``chi(X_{xi>=t}) - chi(X_{xi>=t+e})``."""
    xi = as_covector(xi, X.ambient_dim)
    lhs = _slice_sum_at(X, xi, t, eps)
    e = _next_level_gap(X, xi, t, _tie_tol(X, xi, eps))
    rhs = superlevel_chi(X, xi, t, True, eps) - superlevel_chi(X, xi, t + e, True, eps)
    return lhs, rhs


def jump_identity_check(X: SimplicialComplex, xi, t: float, eps: float | None = None) -> tuple[int, int]:
    """Index sum at level ``t`` against ``chi_o(X_{xi=t}) - chi_o(X_{xi=t+0})``."""
    xi = as_covector(xi, X.ambient_dim)
    lhs = _slice_sum_at(X, xi, t, eps)
    e = _next_level_gap(X, xi, t, _tie_tol(X, xi, eps))
    f = cf_indicator(X)
    rhs = fiber_integral(f, xi, t, eps) - fiber_integral(f, xi, t + e, eps)
    return lhs, rhs


def jump_measure(f, xi, eps: float | None = None) -> JumpMeasure:
    """Atomic measure of the jumps of ``s -> integral of f over {xi = s}``.

    The mass at ``t`` is the fiber integral at ``t`` minus the one just above
    ``t``; only vertex levels can carry mass.
    """
    f = _as_cf(f)
    X = f.complex
    xi = as_covector(xi, X.ambient_dim)
    require_generic(X, xi, eps)
    levels = _distinct_levels(X, xi)
    e = _one_sided_eps(levels, X.diameter)
    pairs = []
    for t in levels:
        m = fiber_integral(f, xi, t, eps) - fiber_integral(f, xi, t + e, eps)
        if m:
            pairs.append((float(t), m))
    return JumpMeasure(tuple(pairs))


# --- bounded-Lipschitz distance ---------------------------------------------


def bl_distance(a: JumpMeasure, b: JumpMeasure) -> float:
    """Bounded-Lipschitz distance between two atomic measures on the line.

    Solves ``max sum m_i phi_i`` over ``|phi_i| <= 1`` and
    ``|phi_i - phi_j| <= |t_i - t_j|`` at the union of atom locations; on the
    line the Lipschitz constraints between neighbours suffice.
    """
    diff = (a + (-b)).atoms
    if not diff:
        return 0.0
    t = np.array([x for x, _ in diff])
    m = np.array([w for _, w in diff], dtype=float)
    k = len(t)
    if k == 1:
        return float(abs(m[0]))
    gaps = np.diff(t)
    A = np.zeros((2 * (k - 1), k))
    for i in range(k - 1):
        A[2 * i, i + 1], A[2 * i, i] = 1.0, -1.0
        A[2 * i + 1, i + 1], A[2 * i + 1, i] = -1.0, 1.0
    ub = np.repeat(gaps, 2)
    res = linprog(-m, A_ub=A, b_ub=ub, bounds=[(-1.0, 1.0)] * k, method="highs")
    if res.status != 0:
        raise RuntimeError(f"bounded-Lipschitz LP failed: {res.message}")
    return max(0.0, float(-res.fun))


# --- convergence harness -----------------------------------------------------


Member = Union[SimplicialComplex, ConstructibleFunction]


@dataclass
class ConvergenceReport:
    covectors: np.ndarray
    distances: np.ndarray
    condition_c: np.ndarray
    mass: np.ndarray
    tol: float
    mean_distance: np.ndarray = field(init=False)

    def __post_init__(self):
        self.mean_distance = self.distances.mean(axis=0) if self.distances.size else np.zeros(0)

    @property
    def mass_bound(self) -> int:
        return int(self.mass.max()) if self.mass.size else 0

    @property
    def strictly_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.mean_distance) < 0))

    @property
    def tail_start(self) -> int:
        """First member index from which mean distances strictly decrease."""
        k = len(self.mean_distance)
        start = max(k - 1, 0)
        while start > 0 and self.mean_distance[start - 1] > self.mean_distance[start]:
            start -= 1
        return start

    @property
    def converged(self) -> bool:
        return len(self.mean_distance) > 0 and bool(self.mean_distance[-1] <= self.tol)


def convergence_harness(
    sequence: Sequence[Member],
    target: Member,
    xi_samples: int = 20,
    seed: int = 0,
    tol: float = 1e-2,
    eps: float | None = None,
) -> ConvergenceReport:
    """Compare jump measures and superlevel characteristics of a sequence
    against a target over seeded generic covectors."""
    members = [_as_cf(m) for m in sequence]
    tgt = _as_cf(target)
    n = tgt.complex.ambient_dim
    for m in members:
        if m.complex.ambient_dim != n:
            raise ValidationError("all inputs must share the ambient dimension")
    K = len(members)
    xis = np.zeros((xi_samples, n))
    dist = np.zeros((xi_samples, K))
    cond = np.zeros((xi_samples, K), dtype=bool)
    mass = np.zeros(K, dtype=int)
    for i in range(xi_samples):
        xi = sample_generic_covector(
            tgt.complex, seed=(seed, i), eps=eps, others=[m.complex for m in members]
        )
        xis[i] = xi
        jt = jump_measure(tgt, xi, eps)
        tlevels = _distinct_levels(tgt.complex, xi)
        target_chi = [superlevel_integral(tgt, xi, c, True, eps) for c in tlevels]
        for k, f in enumerate(members):
            jk = jump_measure(f, xi, eps)
            dist[i, k] = bl_distance(jk, jt)
            mass[k] = max(mass[k], jk.mass)
            cond[i, k] = all(
                superlevel_integral(f, xi, c, True, eps) == tc
                for c, tc in zip(tlevels, target_chi)
            )
    return ConvergenceReport(xis, dist, cond, mass, tol)
