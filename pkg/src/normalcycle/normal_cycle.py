"""Normal cycles of PL sets in ambient dimension at most 3.

The cycle is stored as a stratified multiplicity function: for each simplex
``sigma`` the unit sphere of ``sigma``'s orthogonal complement is cut by the
great subspheres ``{xi . (w - v) = 0}`` (``w`` ranging over the link of
``sigma``), and every open cell with a nonzero Morse index becomes a piece.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import null_space

from .complex import SimplicialComplex, as_covector, link
from .errors import NonGenericCovector, UnsupportedDimension, ValidationError
from .morse import Atom, MorseDataSlice, stratum_index
from .spherical import MERGE_TOL, SphericalCell, arrangement_cells


@dataclass(frozen=True)
class NormalCyclePiece:
    simplex: tuple
    cell: SphericalCell
    multiplicity: int


@dataclass(frozen=True)
class NormalCycle:
    complex: SimplicialComplex
    pieces: tuple[NormalCyclePiece, ...]

    def pieces_at(self, simplex) -> list[NormalCyclePiece]:
        simplex = tuple(sorted(simplex))
        return [p for p in self.pieces if p.simplex == simplex]


def orthogonal_basis(points: np.ndarray, simplex) -> np.ndarray:
    """Orthonormal basis (columns) of the directions orthogonal to ``simplex``."""
    n = points.shape[1]
    if len(simplex) == 1:
        return np.eye(n)
    p = points[list(simplex)]
    return null_space(p[1:] - p[0])


def _link_normals(X: SimplicialComplex, simplex) -> np.ndarray:
    lk = link(X, simplex)
    base = X.points[simplex[0]]
    return np.array([X.points[w] - base for w in lk.vertices]).reshape(-1, X.ambient_dim)


def build_normal_cycle(X: SimplicialComplex, eps: float | None = None) -> NormalCycle:
    n = X.ambient_dim
    if n > 3:
        raise UnsupportedDimension(f"normal cycles need ambient dimension <= 3, got {n}")
    pieces = []
    for sigma in X.simplices:
        if n - len(sigma) < 0:
            continue
        basis = orthogonal_basis(X.points, sigma)
        for cell in arrangement_cells(basis, _link_normals(X, sigma)):
            m = stratum_index(X, cell.sample, sigma, eps)
            if m:
                pieces.append(NormalCyclePiece(sigma, cell, m))
    return NormalCycle(X, tuple(pieces))


def _vertex_pieces(N: NormalCycle):
    return [p for p in N.pieces if len(p.simplex) == 1]


def slice_at(N: NormalCycle, xi, tol: float = MERGE_TOL) -> MorseDataSlice:
    """Slice of the normal cycle over a generic covector.

    Raises:
        NonGenericCovector: ``xi`` lies on a cutting subsphere of some vertex.
    """
    X = N.complex
    xi = as_covector(xi, X.ambient_dim)
    u = xi / np.linalg.norm(xi)
    levels = X.points @ xi
    atoms = []
    for piece in _vertex_pieces(N):
        cell = piece.cell
        if cell.kind != "point" and len(cell.constraints):
            if np.min(np.abs(cell.constraints @ u)) <= tol:
                raise NonGenericCovector(f"covector lies on a cell boundary at vertex {piece.simplex[0]}")
        if cell.contains(u, tol):
            v = piece.simplex[0]
            atoms.append(Atom(v, piece.multiplicity, float(levels[v])))
    atoms.sort(key=lambda a: a.level)
    return MorseDataSlice(xi, tuple(atoms))


# --- structural checks ------------------------------------------------------


@dataclass
class CheckReport:
    name: str
    passed: bool
    max_violation: float
    details: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "check": self.name,
            "passed": self.passed,
            "max_violation": self.max_violation,
            "details": self.details,
        }


def check_legendrian(N: NormalCycle, tol: float = 1e-9) -> CheckReport:
    """Every covector of a piece must annihilate the edge directions of its simplex."""
    X = N.complex
    worst = 0.0
    details = []
    for k, piece in enumerate(N.pieces):
        s = piece.simplex
        if len(s) < 2:
            continue
        p = X.points[list(s)]
        edges = p[1:] - p[0]
        edges = edges / np.linalg.norm(edges, axis=1)[:, None]
        cell = piece.cell
        probes = np.vstack([cell.sample[None, :], cell.vertices]) if len(cell.vertices) else cell.sample[None, :]
        viol = float(np.max(np.abs(probes @ edges.T)))
        if viol > tol:
            details.append({"piece": k, "simplex": list(s), "violation": viol})
        worst = max(worst, viol)
    return CheckReport("legendrian", worst <= tol, worst, details)


def _boundary_terms_2d(N: NormalCycle):
    X = N.complex
    terms = []
    for piece in N.pieces:
        s, cell, m = piece.simplex, piece.cell, piece.multiplicity
        if len(s) == 1 and cell.kind == "arc":
            if len(cell.vertices) == 0:
                continue
            start, end = cell.vertices
            terms.append((s[0], end, m))
            terms.append((s[0], start, -m))
        elif len(s) == 2 and cell.kind == "point":
            nu = cell.vertices[0]
            tangent = np.array([-nu[1], nu[0]])
            a, b = s
            head, tail = (b, a) if tangent @ (X.points[b] - X.points[a]) > 0 else (a, b)
            terms.append((head, nu, m))
            terms.append((tail, nu, -m))
    return terms


def check_cycle_2d(N: NormalCycle, tol: float = 1e-9) -> CheckReport:
    """Boundary of the 1-dimensional normal cycle of a planar set.

    Vertex arcs run counterclockwise; a piece over an edge with normal ``nu``
    runs along ``nu`` rotated by +90 degrees.  The endpoint contributions,
    grouped by (vertex, covector), must cancel.
    """
    if N.complex.ambient_dim != 2:
        raise UnsupportedDimension("the cycle check needs ambient dimension 2")
    groups: list[list] = []
    for v, d, m in _boundary_terms_2d(N):
        for g in groups:
            if g[0] == v and np.linalg.norm(g[1] - d) <= tol:
                g[2] += m
                break
        else:
            groups.append([v, np.asarray(d, dtype=float), m])
    details = [
        {"vertex": int(v), "covector": d.tolist(), "boundary": int(m)}
        for v, d, m in groups
        if m != 0
    ]
    worst = max((abs(m) for _, _, m in groups), default=0)
    return CheckReport("cycle", worst == 0, float(worst), details)


def check_slices(N: NormalCycle, samples: int = 100, seed: int = 0) -> CheckReport:
    """Compare :func:`slice_at` with direct Morse slices on seeded covectors."""
    from .complex import sample_generic_covector
    from .morse import morse_slice

    X = N.complex
    details = []
    done = 0
    rng = np.random.default_rng(seed)
    if len(X.vertices) == 0:
        return CheckReport("slices", True, 0.0, details)
    while done < samples:
        xi = sample_generic_covector(X, rng)
        try:
            got = slice_at(N, xi)
        except NonGenericCovector:
            continue
        want = morse_slice(X, xi)
        done += 1
        if got != want:
            details.append(
                {
                    "xi": xi.tolist(),
                    "normal_cycle": [(a.vertex, a.index) for a in got.atoms],
                    "direct": [(a.vertex, a.index) for a in want.atoms],
                }
            )
    return CheckReport("slices", not details, float(len(details)), details)


def multiplicity(N: NormalCycle, simplex, xi, tol: float = MERGE_TOL) -> int:
    """Multiplicity of ``N`` at the stratum ``(simplex, xi)`` (0 off the support)."""
    total = 0
    for p in N.pieces_at(simplex):
        if p.cell.contains(xi, tol):
            total += p.multiplicity
    return total


def same_multiplicities(lhs: Sequence[NormalCycle], rhs: Sequence[NormalCycle]) -> bool:
    """Whether two sums of normal cycles agree on every open stratum.

    For each simplex carrying a piece, the arrangements of all summands are
    overlaid and the summed multiplicities compared at each refined cell.
    """
    cycles = list(lhs) + list(rhs)
    if not cycles:
        return True
    points = cycles[0].complex.points
    for N in cycles[1:]:
        if N.complex.points.shape != points.shape or not np.array_equal(N.complex.points, points):
            raise ValidationError("cycles must share the vertex coordinates")
    simplices = sorted({p.simplex for N in cycles for p in N.pieces}, key=lambda s: (len(s), s))
    for s in simplices:
        basis = orthogonal_basis(points, s)
        normals = [p.cell.constraints for N in cycles for p in N.pieces_at(s)]
        normals = np.vstack(normals) if normals else np.zeros((0, points.shape[1]))
        for cell in arrangement_cells(basis, normals):
            a = sum(multiplicity(N, s, cell.sample) for N in lhs)
            b = sum(multiplicity(N, s, cell.sample) for N in rhs)
            if a != b:
                return False
    return True


# --- conical extension ------------------------------------------------------


@dataclass(frozen=True)
class ConicalCycle:
    """Cone over a normal cycle plus the zero-section term.

    ``pieces`` keep the spherical cells; each stands for the cone
    ``{lambda xi : lambda > 0, xi in cell}`` over its simplex.  ``body`` is
    the selection carried by the zero section, with multiplicity 1.
    """

    normal_cycle: NormalCycle
    body: np.ndarray

    @property
    def pieces(self):
        return self.normal_cycle.pieces

    def slice(self, xi) -> MorseDataSlice:
        """Slice over a nonzero covector, equal to the normal-cycle slice at
        ``xi / |xi|``."""
        xi = as_covector(xi, self.normal_cycle.complex.ambient_dim)
        return slice_at(self.normal_cycle, xi / np.linalg.norm(xi))


def cone_extend(N: NormalCycle, full_dim_body=None) -> ConicalCycle:
    X = N.complex
    body = X.full_mask() if full_dim_body is None else np.asarray(full_dim_body, dtype=bool)
    if body.shape != (len(X),):
        raise ValidationError("body selection must match the complex")
    return ConicalCycle(N, body)
