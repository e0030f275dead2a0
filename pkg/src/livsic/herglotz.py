"""Atomic matrix measures and the Herglotz dictionary between circle and line.

Circle measures are kept unnormalised, ``sigma(T) = J* P_U(T) J``, so that
a unital measure has total mass exactly ``I``. A circle atom at ``alpha != 1``
becomes a line atom at ``t = b^{-1}(alpha)`` with mass
``pi (1 + t^2) sigma({alpha})``; the mass at ``alpha = 1`` becomes the
linear coefficient ``P``. With these conventions the Herglotz function is

    G(z) = -i z P + sum_t (t z + 1) / (i (t - z)) * Sigma({t}) / (pi (1 + t^2))

and ``G(i) = sigma(T)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InputError
from .inner import HerglotzFn
from .numeric import PsdCertificate, psd_check
from .operators import cayley, cayley_inverse

POINT_TOL = 1e-8
WEIGHT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class AtomicMatrixMeasure:
    """Finitely many atoms ``(point, PSD weight)`` on the circle or the line."""

    domain: str
    points: tuple
    weights: tuple

    def __post_init__(self):
        if self.domain not in ("circle", "line"):
            raise InputError(f"domain must be 'circle' or 'line', got {self.domain!r}")
        pts = tuple(complex(p) for p in self.points)
        wts = tuple(np.atleast_2d(np.asarray(w, dtype=complex)) for w in self.weights)
        if len(pts) != len(wts):
            raise InputError("points and weights differ in length")
        if self.domain == "circle":
            bad = [p for p in pts if abs(abs(p) - 1) > 1e-9]
            if bad:
                raise InputError(f"circle atoms must be unimodular: {bad}")
        else:
            bad = [p for p in pts if abs(p.imag) > 1e-9]
            if bad:
                raise InputError(f"line atoms must be real: {bad}")
            pts = tuple(complex(p.real) for p in pts)
        for p, w in zip(pts, wts):
            if w.shape[0] != w.shape[1]:
                raise InputError(f"weight at {p} is not square")
            if not psd_check(w, 1e-9 * max(1.0, np.linalg.norm(w))).is_psd:
                raise InputError(f"weight at {p} is not positive semidefinite")
        for j in range(len(pts)):
            for k in range(j + 1, len(pts)):
                if abs(pts[j] - pts[k]) <= 1e-12:
                    raise InputError(f"repeated atom at {pts[j]}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @property
    def size(self) -> int:
        return self.weights[0].shape[0] if self.weights else 0

    def __len__(self) -> int:
        return len(self.points)

    def total_mass(self) -> np.ndarray:
        return sum(self.weights) if self.weights else np.zeros((0, 0))

    def scaled(self, factor: float) -> "AtomicMatrixMeasure":
        return AtomicMatrixMeasure(self.domain, self.points, tuple(factor * w for w in self.weights))

    def weight_at(self, point: complex, tol: float = POINT_TOL):
        for p, w in zip(self.points, self.weights):
            if abs(p - point) <= tol:
                return w
        return None

    def integrate(self, values: Sequence[np.ndarray]) -> np.ndarray:
        """``sum_t weight(t) @ values[t]`` with values listed in atom order."""
        return sum(w @ np.asarray(v, dtype=complex) for w, v in zip(self.weights, values))


def measure_deviation(a: AtomicMatrixMeasure, b: AtomicMatrixMeasure,
                      point_tol: float = POINT_TOL) -> float:
    """Largest weight difference after pairing atoms; inf if supports differ."""
    if a.domain != b.domain or len(a) != len(b):
        return np.inf
    worst = 0.0
    for p, w in zip(a.points, a.weights):
        other = b.weight_at(p, point_tol)
        if other is None:
            return np.inf
        worst = max(worst, float(np.linalg.norm(w - other)))
    return worst


@dataclass(frozen=True, eq=False)
class HerglotzData:
    """Representing pair ``(P, Sigma)`` of a Herglotz function on the upper half-plane."""

    P: np.ndarray
    measure: AtomicMatrixMeasure

    @property
    def size(self) -> int:
        return self.P.shape[0]


def measure_transform(sigma: AtomicMatrixMeasure, point_tol: float = 1e-9) -> HerglotzData:
    """Circle measure to ``(P, Sigma)`` on the line."""
    if sigma.domain != "circle":
        raise InputError("measure_transform expects a circle measure")
    n = sigma.size
    P = np.zeros((n, n), dtype=complex)
    points, weights = [], []
    for alpha, w in zip(sigma.points, sigma.weights):
        if abs(alpha - 1) <= point_tol:
            P = P + w
            continue
        t = float(np.real(cayley_inverse(alpha)))
        points.append(t)
        weights.append(np.pi * (1 + t * t) * w)
    return HerglotzData(P, AtomicMatrixMeasure("line", tuple(points), tuple(weights)))


def inverse_measure_transform(h: HerglotzData) -> AtomicMatrixMeasure:
    """``(P, Sigma)`` back to the circle measure."""
    points, weights = [], []
    if np.linalg.norm(h.P) > 0:
        points.append(1.0 + 0j)
        weights.append(h.P)
    for t, w in zip(h.measure.points, h.measure.weights):
        t = t.real
        alpha = complex(cayley(t))
        points.append(alpha / abs(alpha))
        weights.append(w / (np.pi * (1 + t * t)))
    return AtomicMatrixMeasure("circle", tuple(points), tuple(weights))


def herglotz_eval(h: HerglotzData, z: complex) -> np.ndarray:
    z = complex(z)
    if z.imag == 0:
        raise InputError(f"Herglotz integral is not evaluated on the real axis (z = {z})")
    value = -1j * z * h.P
    for t, w in zip(h.measure.points, h.measure.weights):
        t = t.real
        value = value + (t * z + 1) / (1j * (t - z)) * w / (np.pi * (1 + t * t))
    return value


def herglotz_function(h: HerglotzData) -> HerglotzFn:
    return HerglotzFn(lambda z: herglotz_eval(h, z), h.size)


def herglotz_kernel(G: HerglotzFn, w: complex, z: complex) -> np.ndarray:
    """``K_w(z) = (i/pi) (G(z) + G(w)*) / (z - conj w)``."""
    w, z = complex(w), complex(z)
    gap = z - w.conjugate()
    if abs(gap) <= 1e-14:
        raise InputError(f"kernel undefined for z = conj(w) = {z}")
    return (1j / np.pi) * (G(z) + G(w).conj().T) / gap


@dataclass(frozen=True, eq=False)
class KernelGram:
    """Block matrix ``[K(w_k)(w_j)]`` over a point set, all coordinate directions."""

    points: tuple
    gram: np.ndarray

    def certify(self, tol: float = 1e-9) -> PsdCertificate:
        return psd_check((self.gram + self.gram.conj().T) / 2, tol)

    @property
    def hermitian_defect(self) -> float:
        return float(np.linalg.norm(self.gram - self.gram.conj().T, 2))


def kernel_gram(kernel: Callable[[complex, complex], np.ndarray], points: Sequence[complex]) -> KernelGram:
    """Gram matrix of a kernel given as ``kernel(w, z) = K_w(z)``."""
    pts = tuple(complex(p) for p in points)
    blocks = [[np.atleast_2d(kernel(wk, zj)) for wk in pts] for zj in pts]
    return KernelGram(pts, np.block(blocks))


def cauchy_transform(measure: AtomicMatrixMeasure, h: Sequence[np.ndarray], z: complex) -> np.ndarray:
    """``(1/(i pi)) sum_t Sigma({t}) h(t) / (t - z)``."""
    if measure.domain != "line":
        raise InputError("cauchy_transform expects a line measure")
    z = complex(z)
    if z.imag == 0:
        raise InputError(f"Cauchy transform is not evaluated on the real axis (z = {z})")
    total = np.zeros(measure.size, dtype=complex)
    for t, w, v in zip(measure.points, measure.weights, h):
        total = total + w @ np.asarray(v, dtype=complex).reshape(-1) / (t.real - z)
    return total / (1j * np.pi)
