"""Unitary extensions of a partial isometry and their characteristic functions.

An extension is a unitary ``U`` on C^M whose first N coordinates carry the
base space H = C^N and which agrees with ``V`` on ``ker(V)^perp``. All
resolvent expressions in ``A = b^{-1}(U)`` are written through ``U`` so that
an eigenvalue 1 of ``U`` needs no special treatment:

    (A - w)(A - z)^{-1} = ((i - w) + (i + w) U)((i - z) + (i + z) U)^{-1}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import InputError
from .grids import UPPER_GRID
from .herglotz import (AtomicMatrixMeasure, HerglotzData, POINT_TOL, herglotz_function,
                       measure_transform)
from .inner import (MatrixContractive, ScalarInner, aligned_livsic_function,
                    coincide, divides, herglotz_link, livsic_char, livsic_function,
                    matrix_divides, recover_scalar_inner)
from .numeric import as_matrix, eig_normal, unitary_defect
from .operators import (DeficiencyFrame, PartialIsometrySystem, canonical_extension, cayley,
                        deficiency_data, embed, verify_extension)


@dataclass(frozen=True, eq=False)
class ExtensionData:
    """A minimal unitary extension ``U`` of ``base.V`` with the frame used for ``J``."""

    U: np.ndarray
    base: PartialIsometrySystem
    frame: Optional[DeficiencyFrame] = None
    one_is_eigenvalue: bool = field(init=False, default=False)

    def __post_init__(self):
        U = as_matrix(self.U, "U")
        object.__setattr__(self, "U", U)
        if self.frame is None:
            object.__setattr__(self, "frame", self.base.frame)
        if not verify_extension(U, self.base):
            raise InputError("U is not a minimal unitary extension of the base partial isometry")
        spectrum = np.linalg.eigvals(U)
        object.__setattr__(self, "one_is_eigenvalue", bool(np.any(np.abs(spectrum - 1) <= 1e-8)))

    @property
    def M(self) -> int:
        return self.U.shape[0]

    @property
    def N(self) -> int:
        return self.base.dim

    @property
    def index(self) -> int:
        return self.frame.index

    @property
    def J(self) -> np.ndarray:
        """The frame ``J`` as an isometry into C^M."""
        return embed(self.frame.J, self.M)


def resolvent_ratio(U: np.ndarray, w: complex, z: complex) -> np.ndarray:
    """``((i - w) + U (i + w))((i - z) + U (i + z))^{-1}``."""
    eye = np.eye(U.shape[0])
    den = (1j - z) * eye + (1j + z) * U
    if np.linalg.cond(den) > 1e13:
        raise InputError(f"resolvent factor is singular at z = {z}")
    num = (1j - w) * eye + (1j + w) * U
    return num @ np.linalg.inv(den)


# ---------------------------------------------------------------------------
# Measures and characteristic functions

def clark_measure(ext: ExtensionData, drop: float = 1e-13) -> AtomicMatrixMeasure:
    """Atoms at the eigenvalues of ``U`` with weights ``J* P_k J``."""
    dec = eig_normal(ext.U)
    J = ext.J
    points, weights = [], []
    for lam, proj in zip(dec.eigenvalues, dec.projections):
        w = J.conj().T @ proj @ J
        w = (w + w.conj().T) / 2
        if np.linalg.norm(w) <= drop:
            continue
        points.append(lam / abs(lam))
        weights.append(w)
    return AtomicMatrixMeasure("circle", tuple(points), tuple(weights))


def herglotz_data(ext: ExtensionData) -> HerglotzData:
    return measure_transform(clark_measure(ext))


def ext_char_function(ext: ExtensionData) -> MatrixContractive:
    """Characteristic function of the extension relative to its base, as an evaluator."""
    g = herglotz_function(herglotz_data(ext))
    phi = herglotz_link("to_theta", g)
    return MatrixContractive(phi.evaluator, phi.size, ext.M)


def ext_char(ext: ExtensionData):
    """Characteristic function of the extension; scalar inner for index one."""
    phi = ext_char_function(ext)
    if phi.size == 1:
        return recover_scalar_inner(lambda z: phi(z)[0, 0], ext.M)
    return phi


def extension_order(ext: ExtensionData, grid: Sequence[complex] = UPPER_GRID, tol: float = 1e-7):
    """Check that the base characteristic function divides that of the extension.

    Scalar case: zero containment (returns bool). Matrix case: sampled
    heuristic on the J-aligned functions (returns a DivisionCheck).
    """
    if ext.index == 1:
        return divides(livsic_char(ext.base, ext.frame), ext_char(ext))
    theta = aligned_livsic_function(ext.base, ext.frame)
    return matrix_divides(theta, ext_char_function(ext), grid, tol)


def ac_deviation(system: PartialIsometrySystem, param, frame: Optional[DeficiencyFrame] = None,
                 grid: Sequence[complex] = UPPER_GRID) -> float:
    """Largest deviation of ``Phi(z)^T`` from ``param* Theta(z)`` over the grid.

    ``Phi`` is computed from the Clark measure of the canonical extension
    with parameter ``param``; ``Theta`` from the Livsic formula.
    """
    frame = frame or system.frame
    param = as_matrix(param, "parameter")
    ext = ExtensionData(canonical_extension(system, param, frame), system, frame)
    phi = ext_char_function(ext)
    theta = livsic_function(system, frame)
    worst = 0.0
    for z in grid:
        if complex(z).imag <= 0:
            continue
        worst = max(worst, float(np.linalg.norm(phi(z).T - param.conj().T @ theta(z), 2)))
    return worst


def ac_check(system: PartialIsometrySystem, param, frame: Optional[DeficiencyFrame] = None,
             grid: Sequence[complex] = UPPER_GRID, tol: float = 1e-7) -> bool:
    """The canonical extension with parameter ``U`` has characteristic function ``U* Theta``."""
    frame = frame or system.frame
    param = as_matrix(param, "parameter")
    if unitary_defect(param) > 1e-9:
        raise InputError("parameter must be unitary")
    if ac_deviation(system, param, frame, grid) > tol:
        return False
    if frame.index == 1:
        ext = ExtensionData(canonical_extension(system, param, frame), system, frame)
        return coincide(ext_char(ext), livsic_char(system, frame), 1e-6)
    return True


# ---------------------------------------------------------------------------
# Model maps and kernels

class ModelMaps(NamedTuple):
    gamma: Callable[[complex], np.ndarray]
    omega: Callable[[complex], np.ndarray]


def model_maps(ext: ExtensionData) -> ModelMaps:
    """``Omega(z) = (A + i)(A - conj z)^{-1} J`` and its compression ``Gamma = P_H Omega``.

    ``Gamma(z)`` spans ``ker(B* - conj z)`` and ``Gamma(i) = J``.
    """
    J, U, N = ext.J, ext.U, ext.N

    def omega(z):
        return resolvent_ratio(U, -1j, complex(z).conjugate()) @ J

    def gamma(z):
        return omega(z)[:N]

    return ModelMaps(gamma, omega)


def small_kernel(ext: ExtensionData, w: complex, z: complex) -> np.ndarray:
    """``k_w(z) = Gamma(z)* Gamma(w)``."""
    gamma = model_maps(ext).gamma
    return gamma(z).conj().T @ gamma(w)


def small_kernel_from_theta(ext: ExtensionData, w: complex, z: complex) -> np.ndarray:
    """``B(z) (1 - Theta(z) Theta(w)*) / (1 - b(z) conj b(w)) B(w)*`` with ``B(z) = Gamma(z)* J``.

    ``Theta`` is the J-aligned characteristic function of the base.
    """
    w, z = complex(w), complex(z)
    den = 1 - complex(cayley(z)) * complex(cayley(w)).conjugate()
    if abs(den) <= 1e-12:
        raise InputError(f"1 - b(z) conj b(w) vanishes at z = {z}, w = {w}")
    gamma = model_maps(ext).gamma
    theta = aligned_livsic_function(ext.base, ext.frame)
    J = ext.frame.J
    bz = gamma(z).conj().T @ J
    bw = gamma(w).conj().T @ J
    middle = (np.eye(ext.index) - theta(z) @ theta(w).conj().T) / den
    return bz @ middle @ bw.conj().T


def big_kernel(ext: ExtensionData, w: complex, z: complex) -> np.ndarray:
    """``K_w(z) = Omega(z)* Omega(w)``."""
    omega = model_maps(ext).omega
    return omega(z).conj().T @ omega(w)


def big_kernel_from_measure(ext: ExtensionData, w: complex, z: complex) -> np.ndarray:
    """``P + (1/pi) sum_t Sigma({t}) / ((t - z)(t - conj w))``."""
    h = herglotz_data(ext)
    w, z = complex(w), complex(z)
    value = h.P.astype(complex)
    for t, wt in zip(h.measure.points, h.measure.weights):
        value = value + wt / (np.pi * (t.real - z) * (t.real - w.conjugate()))
    return value


def lambda_values(ext: ExtensionData, z: complex) -> tuple[np.ndarray, np.ndarray]:
    """``b(z) K_{conj z}(-i)^{-1} K_{conj z}(i)`` and ``b(z) K_i(z)^{-1} K_{-i}(z)``."""
    z = complex(z)
    bz = complex(cayley(z))
    first = bz * np.linalg.solve(big_kernel(ext, z.conjugate(), -1j), big_kernel(ext, z.conjugate(), 1j))
    second = bz * np.linalg.solve(big_kernel(ext, 1j, z), big_kernel(ext, -1j, z))
    return first, second


def lambda_deviation(ext: ExtensionData, grid: Sequence[complex] = UPPER_GRID) -> tuple[float, float]:
    """Largest deviation of both kernel quotients from Phi, and grid coverage."""
    phi = ext_char_function(ext)
    pts = [complex(z) for z in grid if complex(z).imag > 0]
    worst, used = 0.0, 0
    for z in pts:
        try:
            first, second = lambda_values(ext, z)
            target = phi(z)
        except (np.linalg.LinAlgError, InputError):
            continue
        if not (np.all(np.isfinite(first)) and np.all(np.isfinite(second))):
            continue
        worst = max(worst, float(np.linalg.norm(first - target, 2)), float(np.linalg.norm(second - target, 2)))
        used += 1
    return worst, used / max(1, len(pts))


def lambda_identity(ext: ExtensionData, grid: Sequence[complex] = UPPER_GRID, tol: float = 1e-8) -> bool:
    worst, coverage = lambda_deviation(ext, grid)
    return coverage >= 0.8 and worst <= tol


# ---------------------------------------------------------------------------
# Cyclic expansion

def shifted_cayley(system: PartialIsometrySystem, w: complex) -> tuple[np.ndarray, np.ndarray]:
    """``b_w(B) Q_w`` on C^N and the projection ``P_w`` onto ``ker(B* - w)``.

    ``b_w(B)`` sends ``(B - conj w) x`` to ``(B - w) x``; in terms of ``V``
    it maps ``((i - conj w) + (i + conj w) V) y`` to ``((i - w) + (i + w) V) y``
    for ``y`` in ``ker(V)^perp``.
    """
    w = complex(w)
    source = system.shifted_range(w.conjugate())
    target = system.shifted_range(w)
    if source.shape[1] == 0:
        N = system.dim
        return np.zeros((N, N), dtype=complex), np.eye(N, dtype=complex)
    pinv = np.linalg.pinv(source)
    q = source @ pinv
    return target @ pinv, np.eye(system.dim) - q


class CyclicExpansion(NamedTuple):
    partial_sums: list
    remainders: list
    identity_residuals: np.ndarray
    remainder_norms: np.ndarray


def cyclic_expansion(ext: ExtensionData, h, w: complex, k: int) -> CyclicExpansion:
    """Expand ``h`` in H as ``sum_j b_w^dagger(A)^j P_w V_w^j h + b_w^dagger(A)^{k+1} V_w^{k+1} h``.

    For every ``j <= k`` records the partial sum, the remainder term, the
    norm of ``h - partial - remainder`` and the remainder norm.
    """
    w = complex(w)
    if w.imag == 0:
        raise InputError("w must not be real")
    h = np.asarray(h, dtype=complex).reshape(-1)
    N, M = ext.N, ext.M
    if h.shape[0] == M:
        if np.linalg.norm(h[N:]) > 1e-12:
            raise InputError("h must lie in the base space")
        h = h[:N]
    if h.shape[0] != N:
        raise InputError(f"h has length {h.shape[0]}, expected {N} or {M}")
    vw, pw = shifted_cayley(ext.base, w)
    dagger = resolvent_ratio(ext.U, w.conjugate(), w)
    full_h = embed(h, M)[:, 0]
    partial = np.zeros(M, dtype=complex)
    power = np.eye(M, dtype=complex)
    current = h.copy()
    sums, rems, residuals, norms = [], [], [], []
    for _ in range(k + 1):
        partial = partial + power @ embed(pw @ current, M)[:, 0]
        current = vw @ current
        power = dagger @ power
        remainder = power @ embed(current, M)[:, 0]
        sums.append(partial.copy())
        rems.append(remainder)
        residuals.append(float(np.linalg.norm(full_h - partial - remainder)))
        norms.append(float(np.linalg.norm(remainder)))
    return CyclicExpansion(sums, rems, np.array(residuals), np.array(norms))


def decay_rate(system: PartialIsometrySystem, h, w: complex, steps: int = 200) -> float:
    """Asymptotic geometric rate of ``||V_w^k h||``, from a window of late powers."""
    vw, _ = shifted_cayley(system, w)
    v = np.asarray(h, dtype=complex).reshape(-1)[: system.dim]
    half = steps // 2
    mid = None
    for j in range(1, steps + 1):
        v = vw @ v
        if j == half:
            mid = np.linalg.norm(v)
    end = np.linalg.norm(v)
    if mid == 0 or end == 0:
        return 0.0
    return float((end / mid) ** (1.0 / (steps - half)))


# ---------------------------------------------------------------------------
# Synthesis

def compressed_shift(disk_zeros: Sequence[complex]) -> np.ndarray:
    """Matrix of ``f -> P(zeta f)`` on the model space of a disk Blaschke product.

    Uses the orthonormal Takenaka-Malmquist basis
    ``e_k = sqrt(1 - |a_k|^2)/(1 - conj(a_k) zeta) prod_{l<k} b_{a_l}``,
    in which the operator is lower triangular.
    """
    a = np.asarray(disk_zeros, dtype=complex)
    d = len(a)
    s = np.sqrt(1 - np.abs(a) ** 2)
    m = np.diag(a).astype(complex)
    for j in range(d):
        for k in range(j):
            m[j, k] = s[j] * s[k] * np.prod(-a[k + 1:j].conj())
    return m


class Synthesis(NamedTuple):
    extension: ExtensionData
    embedding: np.ndarray
    model: np.ndarray


def synthesize_extension(theta: ScalarInner, phi: ScalarInner, tol: float = 1e-8) -> Synthesis:
    """Extension whose base has characteristic function ``theta`` and whose own is ``phi``.

    The extension space is the model space of ``phi`` in the disk picture,
    where the Cayley partial isometry is the compressed shift. Ordering
    the zeros of ``theta`` first makes the model space of ``theta`` the
    span of the first basis vectors. The unitary is the canonical
    extension, parameter 1, of the ``phi`` model.
    """
    for name, f in (("theta", theta), ("phi", phi)):
        if not any(abs(a - 1j) <= tol for a in f.zeros):
            raise InputError(f"{name} must vanish at i")
    if not divides(theta, phi, tol):
        raise InputError("theta does not divide phi")
    head = [1j] + sorted((a for a in theta.zeros), key=lambda a: abs(a - 1j))[1:]
    rest = list(phi.zeros)
    for a in head:
        j = int(np.argmin([abs(a - r) for r in rest]))
        rest.pop(j)
    ordered = [complex(a) for a in head] + rest
    disk = [0j if abs(a - 1j) <= tol else complex(cayley(a)) for a in ordered]
    model = compressed_shift(disk)
    full = deficiency_data(model)
    U = canonical_extension(full, np.eye(1))
    d = len(head)
    base = deficiency_data(model[:d, :d])
    ext = ExtensionData(U, base)
    return Synthesis(ext, embed(np.eye(d), len(ordered)), model)


# ---------------------------------------------------------------------------
# Ordering witnesses

@dataclass(frozen=True, eq=False)
class OrderWitness:
    """Data exhibiting ``B_1`` below ``B_2``.

    ``theta`` and ``phi`` are scalar inner; ``D(t)`` maps C^m to C^n at
    the atoms; ``sigma_small`` (m x m) and ``sigma_big`` (n x n) are line
    measures scaled by pi relative to the transformed Clark measures.
    """

    theta: ScalarInner
    phi: ScalarInner
    D: Callable[[float], np.ndarray]
    sigma_small: AtomicMatrixMeasure
    sigma_big: AtomicMatrixMeasure


class OrderReport(NamedTuple):
    cond1: bool
    cond2: bool
    cond3: bool
    weight_deviation: float
    moment_small: float
    moment_big: float


def pochar_verify(witness: OrderWitness, domain_images: Sequence[Callable[[float], np.ndarray]],
                  tol: float = 1e-9) -> OrderReport:
    """Check the three ordering conditions for a supplied witness."""
    small, big = witness.sigma_small, witness.sigma_big
    cond1 = divides(witness.theta, witness.phi)

    def D(t):
        return np.atleast_2d(np.asarray(witness.D(t), dtype=complex))

    scale = max([1.0] + [float(np.linalg.norm(w)) for w in big.weights + small.weights])
    deviation = 0.0
    cond2 = True
    for t in small.points:
        if big.weight_at(t) is None:
            cond2 = False
            deviation = np.inf
    for t, w in zip(big.points, big.weights):
        d = D(t.real)
        if not np.all(np.isfinite(d)):
            cond2 = False
            deviation = np.inf
            continue
        target = small.weight_at(t)
        if target is None:
            target = np.zeros((d.shape[1], d.shape[1]))
        deviation = max(deviation, float(np.linalg.norm(target - d.conj().T @ w @ d)))
    cond2 = cond2 and deviation <= tol * scale

    moment_small = moment_big = 0.0
    for f in domain_images:
        first = small.integrate([np.atleast_1d(f(t.real)) for t in small.points])
        second = big.integrate([D(t.real) @ np.atleast_1d(f(t.real)) for t in big.points])
        moment_small = max(moment_small, float(np.linalg.norm(first)))
        moment_big = max(moment_big, float(np.linalg.norm(second)))
    cond3 = moment_small <= tol * scale and moment_big <= tol * scale
    return OrderReport(cond1, bool(cond2), bool(cond3), deviation, moment_small, moment_big)


def pochar_measure(ext: ExtensionData) -> AtomicMatrixMeasure:
    """pi times the transformed Clark measure, the scaling used by witnesses."""
    h = herglotz_data(ext)
    if np.linalg.norm(h.P) > 1e-10:
        raise InputError("the Clark measure has mass at 1; ordering witnesses need none")
    return h.measure.scaled(np.pi)


def _atom_lookup(points, values, what):
    def lookup(t):
        for p, v in zip(points, values):
            if abs(p - t) <= POINT_TOL:
                return v
        raise InputError(f"{what} is only known at atoms; {t} is not one")
    return lookup


def domain_images(ext: ExtensionData) -> list:
    """Images in ``L^2(Sigma)`` of the domain basis of the base operator.

    At an atom ``t`` with spectral projection ``P_t`` the image of ``g`` is
    ``i pi (t - i) Sigma(t)^+ J* P_t g`` where ``Sigma`` is the pi-scaled
    measure; these are the functions whose Cauchy transforms reproduce
    ``Omega(z)* g``.
    """
    sigma = pochar_measure(ext)
    dec = eig_normal(ext.U)
    J = ext.J
    images = []
    for g in ext.base.dom_basis.T:
        g = embed(g, ext.M)[:, 0]
        values = []
        for t, w in zip(sigma.points, sigma.weights):
            alpha = complex(cayley(t.real))
            k = int(np.argmin([abs(lam - alpha) for lam in dec.eigenvalues]))
            values.append(1j * np.pi * (t.real - 1j) * np.linalg.pinv(w) @ (J.conj().T @ dec.projections[k] @ g))
        images.append(_atom_lookup([t.real for t in sigma.points], values, "domain image"))
    return images


def order_witness(ext_small: ExtensionData, ext_big: ExtensionData) -> OrderWitness:
    """Witness for two bases sharing one unitary, the larger canonically extended.

    ``D(t)`` solves ``P_t J_small = P_t J_big D(t)`` at each atom.
    """
    if ext_small.M != ext_big.M or np.linalg.norm(ext_small.U - ext_big.U) > 1e-12:
        raise InputError("both extensions must share the same unitary")
    sigma_small = pochar_measure(ext_small)
    sigma_big = pochar_measure(ext_big)
    dec = eig_normal(ext_big.U)
    Js, Jb = ext_small.J, ext_big.J
    points, values = [], []
    for t in sigma_big.points:
        alpha = complex(cayley(t.real))
        k = int(np.argmin([abs(lam - alpha) for lam in dec.eigenvalues]))
        p = dec.projections[k]
        points.append(t.real)
        values.append(np.linalg.pinv(p @ Jb) @ (p @ Js))
    return OrderWitness(
        theta=livsic_char(ext_small.base, ext_small.frame),
        phi=ext_char(ext_small),
        D=_atom_lookup(points, values, "D"),
        sigma_small=sigma_small,
        sigma_big=sigma_big,
    )


# ---------------------------------------------------------------------------
# Equivalence

def conjugated(ext: ExtensionData, W) -> ExtensionData:
    """The extension ``W U W*`` for a unitary ``W`` fixing the base coordinates."""
    W = as_matrix(W, "W")
    if W.shape != ext.U.shape:
        raise InputError(f"W must be {ext.U.shape}, got {W.shape}")
    if unitary_defect(W) > 1e-9:
        raise InputError("W must be unitary")
    fixed = np.linalg.norm(W[:, : ext.N] - np.eye(ext.M)[:, : ext.N])
    if fixed > 1e-10:
        raise InputError(f"W does not fix the base space (deviation {fixed:.3e})")
    return ExtensionData(W @ ext.U @ W.conj().T, ext.base, ext.frame)


def equivalence_deviation(ext: ExtensionData, W, grid: Sequence[complex] = UPPER_GRID) -> float:
    other = conjugated(ext, W)
    f, g = ext_char_function(ext), ext_char_function(other)
    return max(float(np.linalg.norm(f(z) - g(z), 2)) for z in grid if complex(z).imag > 0)


def equivalence_invariance(ext: ExtensionData, W, grid: Sequence[complex] = UPPER_GRID,
                           tol: float = 1e-9) -> bool:
    """Characteristic function unchanged under conjugation fixing H."""
    if equivalence_deviation(ext, W, grid) > tol:
        return False
    other = conjugated(ext, W)
    if ext.index == 1:
        return coincide(ext_char(ext), ext_char(other), 1e-6)
    return coincide(ext_char_function(ext), ext_char_function(other), tol, grid)
