"""Intrinsic volumes from tube volumes, external angles and random lines."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial, gamma, pi, sqrt

import numpy as np

from .complex import SimplicialComplex, build_complex
from .errors import IllConditioned, MixedDimension, NotConvex, UnsupportedDimension, ValidationError
from .normal_cycle import build_normal_cycle
from .spherical import sphere_measure

BLOCK = 1 << 16


def unit_ball_volume(p: int) -> float:
    """Volume of the unit ball in dimension ``p`` (``omega_0 = 1``)."""
    return pi ** (p / 2) / gamma(p / 2 + 1)


def simplex_volume(points: np.ndarray) -> float:
    """``k``-volume of the simplex spanned by ``k+1`` rows (Gram determinant)."""
    points = np.asarray(points, dtype=float)
    k = len(points) - 1
    if k == 0:
        return 1.0
    E = points[1:] - points[0]
    g = np.linalg.det(E @ E.T)
    return sqrt(max(g, 0.0)) / factorial(k)


def hausdorff_measure_exact(S: SimplicialComplex, k: int, strict: bool = False) -> float:
    """Exact ``k``-dimensional measure of the ``k``-dimensional part of ``S``.

    Maximal simplices of lower dimension contribute nothing unless ``strict``
    is set, in which case they raise.  Higher-dimensional maximal simplices
    always raise since their ``k``-measure is infinite.
    """
    total = 0.0
    for s in S.maximal_simplices:
        d = len(s) - 1
        if d > k or (strict and d != k):
            raise MixedDimension(f"maximal simplex {s} has dimension {d}, expected {k}")
        if d == k:
            total += simplex_volume(S.points[list(s)])
    return total


# --- point-to-complex distance ----------------------------------------------


class _Projector:
    """Orthogonal projections onto the affine hulls of all cells of a complex."""

    def __init__(self, X: SimplicialComplex):
        self.cells = []
        for s in X.simplices:
            p = X.points[list(s)]
            if len(s) == 1:
                self.cells.append((p[0], None, None))
                continue
            E = p[1:] - p[0]
            G = np.linalg.inv(E @ E.T)
            self.cells.append((p[0], E, G @ E))

    def distance(self, P: np.ndarray) -> np.ndarray:
        best = np.full(len(P), np.inf)
        for origin, E, pinv in self.cells:
            D = P - origin
            if E is None:
                d2 = np.einsum("ij,ij->i", D, D)
                np.minimum(best, d2, out=best)
                continue
            lam = D @ pinv.T
            inside = (lam >= -1e-12).all(axis=1) & (lam.sum(axis=1) <= 1 + 1e-12)
            if not inside.any():
                continue
            R = D[inside] - lam[inside] @ E
            d2 = np.einsum("ij,ij->i", R, R)
            best[inside] = np.minimum(best[inside], d2)
        return np.sqrt(best)


def distance_to_complex(X: SimplicialComplex, P) -> np.ndarray:
    """Euclidean distance from each row of ``P`` to the realization of ``X``."""
    return _Projector(X).distance(np.atleast_2d(np.asarray(P, dtype=float)))


# --- tube formula -------------------------------------------------------------


def _seed_sequence(seed) -> np.random.SeedSequence:
    return seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)


def _block_counts(samples: int, block: int):
    full, rest = divmod(samples, block)
    return [block] * full + ([rest] if rest else [])


def tube_volume_mc(
    X: SimplicialComplex, r: float, samples: int = 1_000_000, seed=0, block: int = BLOCK
) -> tuple[float, float]:
    """Monte Carlo volume of the closed ``r``-tube around ``X``.

    Uniform points in the bounding box inflated by ``r``; each block draws from
    its own child seed, so the result depends only on ``seed`` and ``block``.
    Returns the estimate and its binomial standard error.
    """
    if r <= 0:
        raise ValidationError("tube radius must be positive")
    if len(X.vertices) == 0:
        raise ValidationError("empty complex")
    P = X.points[list(X.vertices)]
    lo, hi = P.min(axis=0) - r, P.max(axis=0) + r
    box = float(np.prod(hi - lo))
    proj = _Projector(X)
    sizes = _block_counts(samples, block)
    children = _seed_sequence(seed).spawn(len(sizes))
    hits = 0
    for size, child in zip(sizes, children):
        rng = np.random.default_rng(child)
        U = lo + (hi - lo) * rng.random((size, X.ambient_dim))
        hits += int(np.count_nonzero(proj.distance(U) <= r))
    p = hits / samples
    return box * p, box * sqrt(p * (1 - p) / samples)


@dataclass
class TubeExperiment:
    radii: np.ndarray
    volumes: np.ndarray
    stderr: np.ndarray
    samples: int
    seed: int

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float)
        self.volumes = np.asarray(self.volumes, dtype=float)
        self.stderr = np.asarray(self.stderr, dtype=float)
        if np.any(self.radii <= 0) or np.any(np.diff(self.radii) <= 0):
            raise ValidationError("radii must be positive and strictly increasing")
        if np.any(self.volumes < 0):
            raise ValidationError("tube volumes must be nonnegative")

    def as_dict(self) -> dict:
        return {
            "op": "tube",
            "r": self.radii.tolist(),
            "samples": self.samples,
            "seed": self.seed,
            "estimates": self.volumes.tolist(),
            "stderr": self.stderr.tolist(),
        }


def run_tube_experiment(
    X: SimplicialComplex, radii, samples: int = 1_000_000, seed: int = 0
) -> TubeExperiment:
    radii = np.asarray(radii, dtype=float)
    children = _seed_sequence(seed).spawn(len(radii))
    est = [tube_volume_mc(X, float(r), samples, child) for r, child in zip(radii, children)]
    return TubeExperiment(radii, [e for e, _ in est], [s for _, s in est], samples, seed)


@dataclass
class IntrinsicVolumes:
    """``mu[k]`` for ``k = 0..n`` with optional standard errors."""

    mu: np.ndarray
    stderr: np.ndarray | None = None

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        if self.stderr is not None:
            self.stderr = np.asarray(self.stderr, dtype=float)

    def __len__(self):
        return len(self.mu)

    def __getitem__(self, k):
        return self.mu[k]


def fit_tube_polynomial(exp: TubeExperiment, m: int, n: int, max_cond: float = 1e8) -> IntrinsicVolumes:
    """Least-squares fit of the tube polynomial in powers ``r**(n-m) .. r**n``.

    The coefficient of ``r**(n-m+k)`` is ``mu_{m-k} * omega_{n-m+k}``.  Data
    with standard errors are weighted by inverse variance and the returned
    errors propagate through the fit; exact data (zero errors) fit unweighted.
    """
    r = exp.radii
    if len(r) < m + 1:
        raise ValidationError(f"need at least {m + 1} radii to fit a degree-{m} tube polynomial")
    powers = np.arange(n - m, n + 1)
    A = r[:, None] ** powers[None, :]
    weighted = bool(np.all(exp.stderr > 0))
    w = 1.0 / exp.stderr if weighted else np.ones_like(r)
    Aw = A * w[:, None]
    yw = exp.volumes * w
    cond = np.linalg.cond(Aw)
    if not np.isfinite(cond) or cond > max_cond:
        raise IllConditioned(f"design matrix condition number {cond:.3g} exceeds {max_cond:.3g}")
    coef, *_ = np.linalg.lstsq(Aw, yw, rcond=None)
    omegas = np.array([unit_ball_volume(int(p)) for p in powers])
    mu = np.zeros(n + 1)
    se = np.zeros(n + 1)
    cov = np.linalg.inv(Aw.T @ Aw) if weighted else np.zeros((len(powers), len(powers)))
    for k in range(m + 1):
        j = k  # column of r**(n-m+k) <-> mu_{m-k}
        mu[m - k] = coef[j] / omegas[j]
        se[m - k] = sqrt(max(cov[j, j], 0.0)) / omegas[j]
    return IntrinsicVolumes(mu, se if weighted else None)


def default_radii(X: SimplicialComplex, count: int = 5, fraction: float = 0.2) -> np.ndarray:
    """Evenly spaced radii up to ``fraction`` of the shortest edge."""
    lengths = [np.linalg.norm(X.points[a] - X.points[b]) for a, b in X.edges]
    top = fraction * (min(lengths) if lengths else 1.0)
    return top * np.arange(1, count + 1) / count


def intrinsic_volumes_convex(P: SimplicialComplex, tol: float = 1e-9) -> IntrinsicVolumes:
    """Intrinsic volumes of a triangulated convex polytope from external angles.

    ``mu_k`` sums, over the ``k``-cells, the ``k``-volume times the normalized
    measure of the normal-cycle pieces over the cell; top-dimensional cells
    contribute their volume to ``mu_n``.

    Raises:
        NotConvex: a piece has multiplicity other than 1, or ``mu_0 != 1``.
    """
    n = P.ambient_dim
    if n > 3:
        raise UnsupportedDimension(f"ambient dimension {n} > 3")
    N = build_normal_cycle(P)
    mu = np.zeros(n + 1)
    for piece in N.pieces:
        if piece.multiplicity != 1:
            raise NotConvex(f"multiplicity {piece.multiplicity} at simplex {piece.simplex}")
        k = len(piece.simplex) - 1
        c = n - 1 - k
        mu[k] += simplex_volume(P.points[list(piece.simplex)]) * piece.cell.measure / sphere_measure(c)
    for s in P.simplices:
        if len(s) - 1 == n:
            mu[n] += simplex_volume(P.points[list(s)])
    if abs(mu[0] - 1.0) > 1e-6:
        raise NotConvex(f"external angles at vertices sum to {mu[0]:.9g}, not 1")
    return IntrinsicVolumes(mu)


# --- Crofton ---------------------------------------------------------------


def _reference_disk(S: SimplicialComplex):
    P = S.points[list(S.vertices)]
    center = 0.5 * (P.min(axis=0) + P.max(axis=0))
    radius = float(np.max(np.linalg.norm(P - center, axis=1)))
    return center, max(radius, 1e-12) * (1 + 1e-6)


def crofton_integral(
    S: SimplicialComplex, samples: int = 1_000_000, seed=0, eps: float | None = None, block: int = BLOCK
) -> tuple[float, float]:
    """Monte Carlo estimate of ``int chi(L & S) dtheta dp`` over lines hitting the
    reference disk, ``theta`` in ``[0, pi)`` and signed offset in ``[-R, R]``.

    Lines passing within ``eps`` of a vertex are redrawn.
    """
    if S.ambient_dim != 2:
        raise UnsupportedDimension("random-line estimates need ambient dimension 2")
    if S.dim > 1:
        raise UnsupportedDimension("random-line estimates need a complex of dimension <= 1")
    center, R = _reference_disk(S)
    tol = S.eps_tie if eps is None else eps
    V = S.points[list(S.vertices)] - center
    idx = {v: i for i, v in enumerate(S.vertices)}
    E = np.array([[idx[a], idx[b]] for a, b in S.edges], dtype=int).reshape(-1, 2)
    sizes = _block_counts(samples, block)
    children = _seed_sequence(seed).spawn(len(sizes))
    s1 = 0.0
    s2 = 0.0
    for size, child in zip(sizes, children):
        rng = np.random.default_rng(child)
        theta = np.pi * rng.random(size)
        p = R * (2 * rng.random(size) - 1)
        while True:
            u = np.column_stack([np.cos(theta), np.sin(theta)])
            h = u @ V.T - p[:, None]
            bad = (np.abs(h) <= tol).any(axis=1)
            if not bad.any():
                break
            k = int(bad.sum())
            theta[bad] = np.pi * rng.random(k)
            p[bad] = R * (2 * rng.random(k) - 1)
        counts = np.count_nonzero(h[:, E[:, 0]] * h[:, E[:, 1]] < 0, axis=1) if len(E) else np.zeros(size)
        s1 += float(counts.sum())
        s2 += float((counts.astype(float) ** 2).sum())
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    scale = 2 * R * np.pi
    return scale * mean, scale * sqrt(var / samples)


@lru_cache(maxsize=8)
def crofton_constant(samples: int = 1_000_000, seed: int = 0) -> tuple[float, float]:
    """Constant making the unit segment measure 1, with its standard error."""
    seg = build_complex([[0.0, 0.0], [1.0, 0.0]], [[0, 1]])
    raw, se = crofton_integral(seg, samples, seed)
    return 1.0 / raw, se / raw**2


def crofton_estimate(
    S: SimplicialComplex,
    k: int = 1,
    samples: int = 1_000_000,
    seed=0,
    calibration_samples: int = 1_000_000,
    calibration_seed: int = 0,
) -> tuple[float, float]:
    """Length of a planar PL curve from random-line intersection counts.

    The counting integral is scaled by a constant calibrated on the unit
    segment; the returned standard error combines both Monte Carlo errors.
    """
    if k != 1 or S.ambient_dim != 2:
        raise UnsupportedDimension("only lines against planar curves (k=1, n=2) are supported")
    raw, se_raw = crofton_integral(S, samples, seed)
    C, se_C = crofton_constant(calibration_samples, calibration_seed)
    est = C * raw
    rel = sqrt((se_raw / raw) ** 2 + (se_C / C) ** 2) if raw > 0 else 0.0
    return est, abs(est) * rel
