"""Dense complex linear algebra helpers: normal eigenproblems, polynomial
roots with multiplicity, positivity certificates and multiset matching."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy import linalg
from scipy.optimize import linear_sum_assignment

from .errors import ConvergenceError, InputError

GOLDEN_TOL = 1e-9
GRID_TOL = 1e-7
CLUSTER_TOL = 1e-8
ROOT_CLUSTER_TOL = 1e-6


def as_matrix(a, name="matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array or raise InputError."""
    m = np.array(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise InputError(f"{name} must be two-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError(f"{name} has non-finite entries")
    return m


def scale_of(m: np.ndarray) -> float:
    return max(1.0, float(np.linalg.norm(m, 2))) if m.size else 1.0


def hermitian_defect(m: np.ndarray) -> float:
    return float(np.linalg.norm(m - m.conj().T, 2)) if m.size else 0.0


def unitary_defect(m: np.ndarray) -> float:
    if m.shape[0] != m.shape[1]:
        return np.inf
    return float(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0]), 2)) if m.size else 0.0


def projection_defect(p: np.ndarray) -> float:
    return float(np.linalg.norm(p @ p - p, 2)) if p.size else 0.0


def orthonormal_range(m: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis for the column space, via SVD with a relative cutoff."""
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return u[:, :rank]


def orthogonal_complement(m: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis for the orthogonal complement of the column space."""
    rows = m.shape[0]
    if m.size == 0:
        return np.eye(rows, dtype=complex)
    u, s, _ = np.linalg.svd(m, full_matrices=True)
    rank = int(np.sum(s > tol * max(1.0, s[0]))) if s.size else 0
    return u[:, rank:]


def cluster_points(points: Sequence[complex], tol: float, relative: bool = True) -> list[list[int]]:
    """Group indices of points by single linkage at distance ``tol``.

    With ``relative`` the threshold is ``tol * max(1, |p|)``.
    """
    pts = np.asarray(points, dtype=complex)
    n = len(pts)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            thresh = tol * max(1.0, abs(pts[i]), abs(pts[j])) if relative else tol
            if abs(pts[i] - pts[j]) <= thresh:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues of a normal matrix with their orthogonal spectral projections."""

    eigenvalues: tuple
    projections: tuple

    def reconstruct(self) -> np.ndarray:
        return sum(lam * p for lam, p in zip(self.eigenvalues, self.projections))

    @property
    def multiplicities(self) -> tuple:
        return tuple(int(round(np.trace(p).real)) for p in self.projections)


def eig_normal(m, tol: float = CLUSTER_TOL) -> SpectralDecomposition:
    """Spectral decomposition of a normal matrix.

    The complex Schur form of a normal matrix is diagonal, so the Schur
    vectors are an orthonormal eigenbasis. Eigenvalues closer than
    ``tol`` (relative) are merged and their eigenvectors share one
    projection.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise InputError(f"square matrix required, got {m.shape}")
    scale = scale_of(m)
    commutator = float(np.linalg.norm(m.conj().T @ m - m @ m.conj().T, 2))
    if commutator > tol * scale**2:
        raise InputError(f"matrix is not normal: ||M*M - MM*|| = {commutator:.3e}")
    try:
        t, z = linalg.schur(m, output="complex")
    except (linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(f"Schur reduction failed to converge: {exc}") from exc
    diag = np.diag(t)
    groups = cluster_points(diag, tol)
    eigenvalues, projections = [], []
    for g in groups:
        q = z[:, g]
        block = q.conj().T @ m @ q
        eigenvalues.append(complex(np.trace(block) / len(g)))
        projections.append(q @ q.conj().T)
    dec = SpectralDecomposition(tuple(eigenvalues), tuple(projections))
    residual = float(np.linalg.norm(dec.reconstruct() - m, 2))
    if residual > 10 * tol * scale:
        raise ConvergenceError(f"spectral reconstruction residual {residual:.3e} exceeds {10 * tol * scale:.3e}")
    return dec


def as_polynomial(p) -> Polynomial:
    if isinstance(p, Polynomial):
        return p
    return Polynomial(np.asarray(p, dtype=complex))


def poly_from_roots(roots: Sequence[complex]) -> Polynomial:
    """Monic polynomial with the given roots (ascending coefficients)."""
    if len(roots) == 0:
        return Polynomial([1.0 + 0j])
    return Polynomial(np.polynomial.polynomial.polyfromroots(np.asarray(roots, dtype=complex)))


def _newton(p: Polynomial, z: complex, steps: int) -> complex:
    dp = p.deriv()
    for _ in range(steps):
        d = dp(z)
        if d == 0:
            break
        step = p(z) / d
        if not np.isfinite(step):
            break
        candidate = z - step
        if abs(p(candidate)) <= abs(p(z)):
            z = candidate
    return complex(z)


def poly_roots(p, tol: float = ROOT_CLUSTER_TOL) -> np.ndarray:
    """Roots of a polynomial with multiplicity.

    Roots come from companion-matrix eigenvalues, get two Newton steps,
    and roots closer than ``tol`` are merged into one repeated root
    whose location is polished on the derivative where it is simple.
    """
    c = np.array(as_polynomial(p).coef, dtype=complex)
    if c.size == 0 or not np.any(c):
        raise InputError("zero polynomial has no well-defined roots")
    cmax = np.max(np.abs(c))
    while abs(c[-1]) <= 1e-14 * cmax:
        c = c[:-1]
    deg = len(c) - 1
    if deg == 0:
        return np.zeros(0, dtype=complex)
    monic = c / c[-1]
    companion = np.zeros((deg, deg), dtype=complex)
    companion[1:, :-1] = np.eye(deg - 1)
    companion[:, -1] = -monic[:-1]
    raw = np.linalg.eigvals(companion)
    poly = Polynomial(c)
    roots = []
    for group in cluster_points(raw, tol):
        mult = len(group)
        if mult == 1:
            r = _newton(poly, raw[group[0]], 2)
        else:
            r = _newton(poly.deriv(mult - 1), complex(np.mean(raw[group])), 2)
        roots.extend([r] * mult)
    return np.array(sorted(roots, key=lambda r: (round(r.real, 12), round(r.imag, 12))), dtype=complex)


class PsdCertificate(NamedTuple):
    is_psd: bool
    min_eigenvalue: float


def psd_check(m, tol: float = GOLDEN_TOL) -> PsdCertificate:
    """Certify positive semidefiniteness: smallest eigenvalue >= -tol."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise InputError(f"square matrix required, got {m.shape}")
    defect = hermitian_defect(m)
    if defect > max(tol, 1e-12) * scale_of(m):
        raise InputError(f"matrix is not Hermitian: ||M - M*|| = {defect:.3e}")
    if m.size == 0:
        return PsdCertificate(True, 0.0)
    lo = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
    return PsdCertificate(lo >= -tol, lo)


def match_multisets(small: Sequence[complex], large: Sequence[complex]) -> tuple[bool, float]:
    """Assign each element of ``small`` to a distinct element of ``large``.

    Returns whether an injective assignment exists and the largest
    matched distance of the optimal assignment (inf when ``small`` is
    the bigger multiset).
    """
    a = np.asarray(small, dtype=complex)
    b = np.asarray(large, dtype=complex)
    if len(a) > len(b):
        return False, np.inf
    if len(a) == 0:
        return True, 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return True, float(np.max(cost[rows, cols]))


def multiset_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Optimal-assignment deviation between equal-size multisets."""
    if len(a) != len(b):
        return np.inf
    return match_multisets(a, b)[1]
