"""Rational inner and contractive functions on the upper half-plane."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import ConvergenceError, InputError, PoleError
from .grids import REAL_GRID, UPPER_GRID
from .numeric import ROOT_CLUSTER_TOL, match_multisets, multiset_distance, poly_roots
from .operators import (DeficiencyFrame, PartialIsometrySystem, cayley, cayley_inverse,
                        defect_vector)

I_TOL = 1e-6  # zeros this close to i count as zeros at i


def _blaschke(zeros, z: complex) -> complex:
    value = 1.0 + 0j
    for a in zeros:
        den = z - a.conjugate()
        if den == 0:
            raise PoleError(a.conjugate())
        value *= (z - a) / den
    return value


@dataclass(frozen=True)
class ScalarInner:
    """Finite Blaschke product ``constant * prod (z - a)/(z - conj a)``."""

    constant: complex
    zeros: tuple

    def __post_init__(self):
        zeros = tuple(sorted((complex(a) for a in self.zeros), key=lambda a: (a.imag, a.real)))
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "constant", complex(self.constant))
        bad = [a for a in zeros if not a.imag > 0]
        if bad:
            raise InputError(f"zeros must lie in the upper half-plane: {bad}")
        if abs(abs(self.constant) - 1) > 1e-8:
            raise InputError(f"constant must be unimodular, got |c| = {abs(self.constant)}")

    @property
    def degree(self) -> int:
        return len(self.zeros)

    @property
    def size(self) -> int:
        return 1

    def __call__(self, z):
        return self.constant * _blaschke(self.zeros, complex(z))

    def matrix(self, z) -> np.ndarray:
        return np.array([[self(z)]])

    def canonical(self) -> "ScalarInner":
        """Same zeros, unimodular constant fixed by the behaviour at i.

        The leading Taylor coefficient at 0 of ``zeta -> f(b^{-1}(zeta))``
        is made positive, so ``b(z)^2`` is already canonical.
        """
        lead = 1.0 + 0j
        for a in self.zeros:
            if abs(a - 1j) > I_TOL:
                lead *= (1j - a) / (1j - a.conjugate())
        return ScalarInner(abs(lead) / lead, self.zeros)

    def times(self, other: "ScalarInner") -> "ScalarInner":
        return ScalarInner(self.constant * other.constant, self.zeros + other.zeros)


@dataclass(frozen=True)
class MatrixContractive:
    """Matrix-valued analytic contraction given by an evaluator."""

    evaluator: Callable[[complex], np.ndarray]
    size: int
    degree: Optional[int] = None

    def __call__(self, z) -> np.ndarray:
        return np.atleast_2d(np.asarray(self.evaluator(complex(z)), dtype=complex))

    def matrix(self, z) -> np.ndarray:
        return self(z)

    @classmethod
    def constant(cls, value) -> "MatrixContractive":
        value = np.atleast_2d(np.asarray(value, dtype=complex))
        return cls(lambda z: value, value.shape[0], 0)

    @classmethod
    def from_scalar(cls, f: ScalarInner) -> "MatrixContractive":
        return cls(f.matrix, 1, f.degree)


@dataclass(frozen=True)
class HerglotzFn:
    """Analytic function with nonnegative real part on the upper half-plane."""

    evaluator: Callable[[complex], np.ndarray]
    size: int

    def __call__(self, z) -> np.ndarray:
        return np.atleast_2d(np.asarray(self.evaluator(complex(z)), dtype=complex))


Contractive = Union[ScalarInner, MatrixContractive]


def as_matrix_function(f) -> MatrixContractive:
    if isinstance(f, MatrixContractive):
        return f
    if isinstance(f, ScalarInner):
        return MatrixContractive.from_scalar(f)
    if callable(f):
        probe = np.atleast_2d(np.asarray(f(2j), dtype=complex))
        return MatrixContractive(f, probe.shape[0])
    raise InputError(f"cannot interpret {type(f).__name__} as a matrix function")


def eval_inner(f: Contractive, z: complex):
    if isinstance(f, ScalarInner):
        return f(z)
    return f(z)


# ---------------------------------------------------------------------------
# Livsic characteristic function

def livsic_function(system: PartialIsometrySystem, frame: Optional[DeficiencyFrame] = None) -> MatrixContractive:
    """``Theta(z) = b(z) B(z)^{-1} A(z)`` with ``A = [<w_j, v_k>]``, ``B = [<w_j, u_k>]``.

    ``w_j(z)`` is any basis of ``ker(B* - z)``; ``v`` and ``u`` are the
    columns of ``frame.J`` and ``frame.Ji``.
    """
    frame = frame or system.frame
    if frame.index == 0:
        raise InputError("deficiency indices (0, 0): no characteristic function")

    def theta(z):
        w = defect_vector(system, z)
        a = (frame.J.conj().T @ w).T
        b = (frame.Ji.conj().T @ w).T
        if np.linalg.cond(b) > 1e13:
            raise PoleError(z, f"B(z) is singular at z = {z}")
        return complex(cayley(z)) * np.linalg.solve(b, a)

    return MatrixContractive(theta, frame.index, system.dim)


def aligned_livsic_function(system: PartialIsometrySystem, frame: Optional[DeficiencyFrame] = None) -> MatrixContractive:
    """Characteristic function whose left unitary factor follows ``frame.J``.

    ``b(z) (W^* J)^{-1} W^* Ji`` with ``W`` a basis of ``ker(B* - conj z)``.
    For inner functions this is the transpose of :func:`livsic_function`.
    Comparisons with extension characteristic functions, which are
    built from ``J`` on both sides, need this alignment.
    """
    frame = frame or system.frame

    def theta(z):
        w = defect_vector(system, complex(z).conjugate())
        left = w.conj().T @ frame.J
        if np.linalg.cond(left) > 1e13:
            raise PoleError(z, f"W(z)*J is singular at z = {z}")
        return complex(cayley(z)) * np.linalg.solve(left, w.conj().T @ frame.Ji)

    return MatrixContractive(theta, frame.index, system.dim)


def livsic_char(system: PartialIsometrySystem, frame: Optional[DeficiencyFrame] = None) -> Contractive:
    """Livsic characteristic function; scalar inner for index one."""
    f = livsic_function(system, frame)
    if f.size == 1:
        return recover_scalar_inner(lambda z: f(z)[0, 0], system.dim)
    return f


def recover_scalar_inner(func: Callable[[complex], complex], max_degree: int,
                         inner_tol: float = 1e-7, canonical: bool = True) -> ScalarInner:
    """Recover a finite Blaschke product from its values.

    Works in the disk variable ``zeta = b(z)``: fits ``p(zeta)/q(zeta)``
    by homogeneous least squares on a circle of radius 0.6 for increasing
    degree until the fit is exact, then takes the roots of ``p``. With
    ``canonical=False`` the fitted unimodular constant is kept.
    """
    if max_degree < 1:
        raise InputError("max_degree must be positive")
    count = max(4 * max_degree, 8)
    zeta = 0.6 * np.exp(2j * np.pi * (np.arange(count) + 0.25) / count)
    points = cayley_inverse(zeta)
    values = np.array([complex(func(z)) for z in points])
    vector = None
    for degree in range(1, max_degree + 1):
        vander = np.vander(zeta, degree + 1, increasing=True)
        system = np.hstack([vander, -values[:, None] * vander])
        _, s, vh = np.linalg.svd(system)
        vector = vh[-1].conj()
        if s[-1] <= 1e-9 * s[0]:
            break
    numerator = vector[: degree + 1]
    disk_zeros = poly_roots(numerator, ROOT_CLUSTER_TOL)
    if np.any(np.abs(disk_zeros) >= 1):
        raise ConvergenceError(f"recovered zeros leave the disk: {disk_zeros}")
    zeros = [complex(z) for z in cayley_inverse(disk_zeros)]
    bare = np.array([_blaschke(zeros, z) for z in points])
    ratio = values / bare
    constant = complex(np.mean(ratio))
    defect = float(np.max(np.abs(values - constant * bare)))
    if abs(abs(constant) - 1) > inner_tol or defect > inner_tol:
        raise ConvergenceError(
            f"values are not those of an inner function: |c| = {abs(constant):.6g}, fit defect {defect:.3e}")
    result = ScalarInner(constant / abs(constant), tuple(zeros))
    return result.canonical() if canonical else result


# ---------------------------------------------------------------------------
# Divisibility

def divides(theta: ScalarInner, phi: ScalarInner, tol: float = ROOT_CLUSTER_TOL) -> bool:
    """``theta <= phi``: every zero of theta is a zero of phi, with multiplicity."""
    if not (isinstance(theta, ScalarInner) and isinstance(phi, ScalarInner)):
        raise InputError("divides compares scalar inner functions; use matrix_divides for matrices")
    ok, dev = match_multisets(theta.zeros, phi.zeros)
    return ok and dev <= tol


class DivisionCheck(NamedTuple):
    holds: bool
    heuristic: bool
    worst_norm: float
    points_used: int
    pole_check: Optional[bool]


def matrix_divides(theta, phi, grid: Sequence[complex] = UPPER_GRID, tol: float = 1e-7,
                   max_condition: float = 1e8) -> DivisionCheck:
    """Sampled test that ``theta^{-1} phi`` is contractive and analytic.

    Contractivity is checked at grid points where ``theta`` is well
    conditioned. Analyticity is checked on small circles around the
    zeros of ``det theta`` (needs ``theta.degree``). This is a
    heuristic, and the result says so.
    """
    theta = as_matrix_function(theta)
    phi = as_matrix_function(phi)
    if theta.size != phi.size:
        raise InputError(f"size mismatch {theta.size} vs {phi.size}")
    worst, used = 0.0, 0
    for z in grid:
        if complex(z).imag <= 0:
            continue
        t = theta(z)
        if np.linalg.cond(t) > max_condition:
            continue
        worst = max(worst, float(np.linalg.norm(np.linalg.solve(t, phi(z)), 2)))
        used += 1
    holds = used > 0 and worst <= 1 + tol
    pole_ok = None
    if theta.degree:
        try:
            det = recover_scalar_inner(lambda z: np.linalg.det(theta(z)), theta.degree)
        except ConvergenceError:
            det = None
        if det is not None:
            pole_ok = True
            for a in det.zeros:
                radius = min(1e-3, a.imag / 2)
                for angle in np.linspace(0, 2 * np.pi, 8, endpoint=False):
                    z = a + radius * np.exp(1j * angle)
                    ratio = np.linalg.solve(theta(z), phi(z))
                    if np.linalg.norm(ratio, 2) > 1 + 1e-6:
                        pole_ok = False
            holds = holds and pole_ok
    return DivisionCheck(bool(holds), True, worst, used, pole_ok)


# ---------------------------------------------------------------------------
# Frostman shift and Herglotz correspondence

def frostman_shift(theta):
    """Move the value at i to zero by a Mobius map in the range.

    ``(1 - T0*)(1 - Theta T0*)^{-1}(Theta - T0)(1 - T0)^{-1}`` with
    ``T0 = Theta(i)``. A scalar inner input gives a scalar inner output.
    """
    if isinstance(theta, ScalarInner):
        c = theta(1j)
        if abs(c) < 1e-14:
            return theta
        lifted = frostman_shift(MatrixContractive.from_scalar(theta))
        return recover_scalar_inner(lambda z: lifted(z)[0, 0], theta.degree, canonical=False)
    theta = as_matrix_function(theta)
    t0 = theta(1j)
    if np.linalg.norm(t0, 2) >= 1:
        raise InputError(f"||Theta(i)|| = {np.linalg.norm(t0, 2):.6g} is not below 1")
    eye = np.eye(theta.size)
    left = eye - t0.conj().T
    right = np.linalg.inv(eye - t0)

    def shifted(z):
        t = theta(z)
        return left @ np.linalg.solve(eye - t @ t0.conj().T, t - t0) @ right

    return MatrixContractive(shifted, theta.size, theta.degree)


def herglotz_link(direction: str, f):
    """``G = (1 + Theta)(1 - Theta)^{-1}`` or ``Theta = (G - 1)(G + 1)^{-1}``.

    ``direction`` is ``"to_g"`` or ``"to_theta"``. A Herglotz function
    built from ``Theta`` is extended to the lower half-plane by
    ``G(z) = -G(conj z)*``.
    """
    if direction == "to_g":
        theta = as_matrix_function(f)
        eye = np.eye(theta.size)

        def g_upper(z):
            t = theta(z)
            gap = eye - t
            if np.linalg.cond(gap) > 1e14:
                raise PoleError(z, f"1 - Theta(z) is singular at z = {z}")
            return (eye + t) @ np.linalg.inv(gap)

        def g(z):
            z = complex(z)
            if z.imag < 0:
                return -g_upper(z.conjugate()).conj().T
            return g_upper(z)

        return HerglotzFn(g, theta.size)
    if direction == "to_theta":
        if not isinstance(f, HerglotzFn):
            raise InputError("to_theta expects a HerglotzFn")
        eye = np.eye(f.size)

        def theta(z):
            g = f(z)
            total = g + eye
            if np.linalg.cond(total) > 1e14:
                raise PoleError(z, f"G(z) + 1 is singular at z = {z}")
            return (g - eye) @ np.linalg.inv(total)

        return MatrixContractive(theta, f.size)
    raise InputError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# Coincidence and innerness

def _polar(m: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def coincidence_factors(f, g, grid: Sequence[complex] = UPPER_GRID, sweeps: int = 200):
    """Unitaries ``R, Q`` minimising ``sum ||R f(z) Q - g(z)||^2`` over the grid.

    Starts from the linear relation ``f(z) Q = R* g(z)`` at four base
    points (two leave a commutant's worth of solutions) and refines by alternating Procrustes steps. Returns
    ``(R, Q, worst_residual)``.
    """
    f = as_matrix_function(f)
    g = as_matrix_function(g)
    if f.size != g.size:
        raise InputError(f"size mismatch {f.size} vs {g.size}")
    n = f.size
    fs = [f(z) for z in grid]
    gs = [g(z) for z in grid]

    def residual(r, q):
        return max(float(np.linalg.norm(r @ a @ q - b, 2)) for a, b in zip(fs, gs))

    starts = [(np.eye(n), np.eye(n))]
    base = [k for k in range(len(grid)) if np.linalg.cond(gs[k]) < 1e8][:4]
    if len(base) >= 2:
        rows = []
        for k in base:
            # unknowns vec(Q), vec(P) with f Q - P g = 0
            rows.append(np.hstack([np.kron(np.eye(n), fs[k]), -np.kron(gs[k].T, np.eye(n))]))
        _, _, vh = np.linalg.svd(np.vstack(rows))
        for vec in vh[-min(3, vh.shape[0]):]:
            vec = vec.conj()
            q = vec[: n * n].reshape(n, n, order="F")
            p = vec[n * n:].reshape(n, n, order="F")
            if np.linalg.norm(q) > 1e-12 and np.linalg.norm(p) > 1e-12:
                starts.append((_polar(p).conj().T, _polar(q)))
    best = None
    for r, q in starts:
        for _ in range(sweeps):
            r = _polar(sum(b @ (a @ q).conj().T for a, b in zip(fs, gs)))
            q = _polar(sum((r @ a).conj().T @ b for a, b in zip(fs, gs)))
        res = residual(r, q)
        if best is None or res < best[2]:
            best = (r, q, res)
    return best


def coincide(f, g, tol: float = 1e-7, grid: Sequence[complex] = UPPER_GRID) -> bool:
    """Equality up to constant unitary factors on both sides."""
    if isinstance(f, ScalarInner) and isinstance(g, ScalarInner):
        return multiset_distance(f.zeros, g.zeros) <= tol
    f, g = as_matrix_function(f), as_matrix_function(g)
    if f.size != g.size:
        raise InputError(f"size mismatch {f.size} vs {g.size}")
    scale = max(1.0, max(float(np.linalg.norm(g(z), 2)) for z in grid))
    return coincidence_factors(f, g, grid)[2] <= tol * scale


def is_inner(f, tol: float = 1e-6, grid: Sequence[float] = REAL_GRID) -> bool:
    """Scalar: zeros in the upper half-plane and unimodular constant.

    Matrix: boundary values (taken 1e-9 above the real axis) are unitary.
    """
    if isinstance(f, ScalarInner):
        return all(a.imag > 0 for a in f.zeros) and abs(abs(f.constant) - 1) <= tol
    f = as_matrix_function(f)
    eye = np.eye(f.size)
    for x in grid:
        v = f(complex(x, 1e-9))
        if np.linalg.norm(v @ v.conj().T - eye, 2) > tol:
            return False
    return True
