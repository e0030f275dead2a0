"""Partial isometries as Cayley transforms of symmetric operators.

A simple symmetric operator ``B`` with equal deficiency indices is never
formed; it is carried by the partial isometry ``V = b(B)`` and every
statement about ``B`` is translated into linear algebra on ``V``:

* ``ker V = ker(B* - i)`` and ``ran(V)^perp = ker(B* + i)``,
* ``dom B = (1 - V) ker(V)^perp`` with ``B (1 - V) x = i (1 + V) x``,
* ``ran(B - z) = ((i - z) + (i + z) V) ker(V)^perp``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from .errors import InputError, PoleError
from .numeric import as_matrix, orthonormal_range, scale_of, unitary_defect

MOBIUS_KINDS = ("b", "b_inverse", "b_w", "b_w_dagger")


@dataclass(frozen=True)
class MobiusMap:
    """One of the four fractional linear maps used throughout.

    ``b(z) = (z-i)/(z+i)``, its inverse ``i(1+z)/(1-z)``, the Blaschke
    factor ``b_w(z) = (z-w)/(z-conj(w))`` and its reciprocal ``b_w_dagger``.
    """

    kind: str
    w: Optional[complex] = None

    def __post_init__(self):
        if self.kind not in MOBIUS_KINDS:
            raise InputError(f"unknown Mobius kind {self.kind!r}")
        if self.kind in ("b_w", "b_w_dagger") and self.w is None:
            raise InputError(f"{self.kind} needs a parameter w")

    @property
    def pole(self) -> complex:
        if self.kind == "b":
            return -1j
        if self.kind == "b_inverse":
            return 1.0 + 0j
        if self.kind == "b_w":
            return complex(np.conj(self.w))
        return complex(self.w)

    def __call__(self, z):
        return mobius_eval(self, z)


def mobius_eval(m: MobiusMap, z: complex) -> complex:
    z = complex(z)
    if abs(z - m.pole) <= 1e-300:
        raise PoleError(m.pole, f"{m.kind} has a pole at {m.pole}")
    if m.kind == "b":
        return (z - 1j) / (z + 1j)
    if m.kind == "b_inverse":
        return 1j * (1 + z) / (1 - z)
    w = complex(m.w)
    if m.kind == "b_w":
        return (z - w) / (z - w.conjugate())
    return (z - w.conjugate()) / (z - w)


def cayley(z):
    """``b(z) = (z - i)/(z + i)``, vectorised, no pole check."""
    z = np.asarray(z, dtype=complex)
    return (z - 1j) / (z + 1j)


def cayley_inverse(zeta):
    """``b^{-1}(zeta) = i(1 + zeta)/(1 - zeta)``, vectorised, no pole check."""
    zeta = np.asarray(zeta, dtype=complex)
    return 1j * (1 + zeta) / (1 - zeta)


@dataclass(frozen=True)
class DeficiencyFrame:
    """Isometries onto the two deficiency spaces.

    ``J`` spans ``ker(B* + i) = ran(V)^perp`` and ``Ji`` spans
    ``ker(B* - i) = ker V``.
    """

    J: np.ndarray
    Ji: np.ndarray

    @property
    def index(self) -> int:
        return self.J.shape[1]


@dataclass(frozen=True, eq=False)
class PartialIsometrySystem:
    """A partial isometry together with its deficiency data."""

    V: np.ndarray
    ker_basis: np.ndarray
    coran_basis: np.ndarray
    ker_perp_basis: np.ndarray
    dom_basis: np.ndarray
    simple: bool

    @property
    def dim(self) -> int:
        return self.V.shape[0]

    @property
    def index(self) -> int:
        return self.ker_basis.shape[1]

    @property
    def frame(self) -> DeficiencyFrame:
        return DeficiencyFrame(J=self.coran_basis, Ji=self.ker_basis)

    def graph(self) -> tuple[np.ndarray, np.ndarray]:
        """Pairs ``(f, Bf)`` spanning the graph of ``B`` as column blocks."""
        k = self.ker_perp_basis
        eye = np.eye(self.dim)
        return (eye - self.V) @ k, 1j * (eye + self.V) @ k

    def shifted_range(self, z: complex) -> np.ndarray:
        """Columns spanning ``ran(B - z)``."""
        z = complex(z)
        return ((1j - z) * np.eye(self.dim) + (1j + z) * self.V) @ self.ker_perp_basis


def _pivoted_basis(projector: np.ndarray, rank: int) -> np.ndarray:
    # Gram-Schmidt of the projected coordinate vectors, largest first; gives
    # deterministic frames such as e_2 for ker [[0,0],[1,0]].
    if rank == 0:
        return np.zeros((projector.shape[0], 0), dtype=complex)
    q, r, _ = linalg.qr(projector, pivoting=True)
    d = np.diag(r)[:rank]
    phases = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
    return q[:, :rank] * phases[None, :]


SIMPLICITY_GRID = tuple(
    complex(x, y)
    for x, y in [(0.3, 0.7), (-1.2, 0.4), (2.1, 1.6), (-0.5, 2.4), (0.9, 0.25),
                 (-2.6, 1.1), (1.4, 3.2), (-0.1, 0.55), (3.3, 0.8), (-1.7, 2.9)]
    for y in (y, -y)
)


def deficiency_data(V, tol: float = 1e-10) -> PartialIsometrySystem:
    """Validate a partial isometry and compute its deficiency data."""
    V = as_matrix(V, "V")
    n_rows, n_cols = V.shape
    if n_rows != n_cols:
        raise InputError(f"V must be square, got {V.shape}")
    gram = V.conj().T @ V
    defect = float(np.linalg.norm(gram - gram @ gram, 2))
    if defect > tol * scale_of(V) ** 2 * 10:
        raise InputError(f"V is not a partial isometry: ||V*V - (V*V)^2|| = {defect:.3e}")
    eye = np.eye(n_rows)
    ker_proj = eye - gram
    coran_proj = eye - V @ V.conj().T
    n_ker = int(np.sum(np.linalg.eigvalsh((ker_proj + ker_proj.conj().T) / 2) > 0.5))
    n_coran = int(np.sum(np.linalg.eigvalsh((coran_proj + coran_proj.conj().T) / 2) > 0.5))
    if n_ker != n_coran:
        raise InputError(f"unequal deficiency indices ({n_ker}, {n_coran})")
    ker_basis = _pivoted_basis(ker_proj, n_ker)
    coran_basis = _pivoted_basis(coran_proj, n_coran)
    ker_perp = _pivoted_basis(gram, n_rows - n_ker)
    dom_basis = (eye - V) @ ker_perp
    system = PartialIsometrySystem(V, ker_basis, coran_basis, ker_perp, dom_basis, simple=False)
    simple = n_ker > 0 and _spans_everything(system)
    return PartialIsometrySystem(V, ker_basis, coran_basis, ker_perp, dom_basis, simple=simple)


def _spans_everything(system: PartialIsometrySystem) -> bool:
    blocks = [defect_vector(system, z) for z in SIMPLICITY_GRID]
    stacked = np.hstack(blocks)
    return orthonormal_range(stacked, 1e-9).shape[1] == system.dim


def defect_vector(system: PartialIsometrySystem, z: complex) -> np.ndarray:
    """Orthonormal basis (N x n) of ``ker(B* - z) = ran(B - conj z)^perp``."""
    z = complex(z)
    N, n = system.dim, system.index
    rng = system.shifted_range(z.conjugate())
    if rng.shape[1] == 0:
        return np.eye(N, dtype=complex)
    u, s, _ = np.linalg.svd(rng, full_matrices=True)
    if s[-1] <= 1e-12 * max(1.0, s[0]):
        raise InputError(f"ran(B - conj z) drops rank at z = {z}; z lies in the exceptional set")
    return u[:, N - n:]


def embed(x: np.ndarray, size: int) -> np.ndarray:
    """Pad rows with zeros so that ``x`` lives in the first coordinates of C^size."""
    x = np.asarray(x, dtype=complex)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    out = np.zeros((size, x.shape[1]), dtype=complex)
    out[: x.shape[0]] = x
    return out


def krylov_is_full(U: np.ndarray, N: int, tol: float = 1e-9) -> bool:
    """Whether the smallest U-reducing subspace containing C^N is everything."""
    M = U.shape[0]
    blocks = [embed(np.eye(N), M)]
    for _ in range(M):
        blocks.append(U @ blocks[-1])
        blocks.append(U.conj().T @ blocks[-2])
    return orthonormal_range(np.hstack(blocks), tol).shape[1] == M


def verify_extension(U, system: PartialIsometrySystem, tol: float = 1e-9) -> bool:
    """Whether ``U`` is a minimal unitary extension of ``system.V``.

    ``U`` acts on C^M with the base space sitting in the first N
    coordinates; it must agree with ``V`` on ``ker(V)^perp`` and the
    joint Krylov space of ``U`` and ``U*`` over C^N must be all of C^M.
    """
    U = as_matrix(U, "U")
    if unitary_defect(U) > tol:
        raise InputError(f"U is not unitary: ||U*U - I|| = {unitary_defect(U):.3e}")
    M, N = U.shape[0], system.dim
    if M < N:
        return False
    k = system.ker_perp_basis
    agree = float(np.linalg.norm(U @ embed(k, M) - embed(system.V @ k, M), 2)) if k.size else 0.0
    if agree > tol:
        return False
    return krylov_is_full(U, N)


def canonical_extension(system: PartialIsometrySystem, param, frame: Optional[DeficiencyFrame] = None) -> np.ndarray:
    """``V + sum_jk param[j, k] <., u_j> v_k`` on the same space.

    ``u`` are the columns of ``frame.Ji`` (ker V) and ``v`` those of
    ``frame.J`` (ran(V)^perp).
    """
    frame = frame or system.frame
    param = as_matrix(param, "parameter")
    n = frame.index
    if param.shape != (n, n):
        raise InputError(f"parameter must be {n}x{n}, got {param.shape}")
    if unitary_defect(param) > 1e-9:
        raise InputError(f"parameter is not unitary: defect {unitary_defect(param):.3e}")
    return system.V + frame.J @ param.T @ frame.Ji.conj().T
