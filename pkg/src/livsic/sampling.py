"""Random test objects: unitaries, partial isometries, extensions, Blaschke products."""
from __future__ import annotations

import numpy as np

from .errors import InputError
from .extensions import ExtensionData
from .inner import ScalarInner
from .operators import PartialIsometrySystem, canonical_extension, deficiency_data, embed, krylov_is_full


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


def random_partial_isometry(N: int, n: int, rng: np.random.Generator, tries: int = 20) -> PartialIsometrySystem:
    """Simple partial isometry on C^N with deficiency indices (n, n)."""
    if not 0 < n <= N:
        raise InputError("need 0 < n <= N")
    for _ in range(tries):
        kernel = random_unitary(N, rng)[:, :n]
        V = random_unitary(N, rng) @ (np.eye(N) - kernel @ kernel.conj().T)
        system = deficiency_data(V)
        if system.simple:
            return system
    raise InputError("could not draw a simple partial isometry")


def random_extension(system: PartialIsometrySystem, extra: int, rng: np.random.Generator,
                     tries: int = 20) -> ExtensionData:
    """Minimal unitary extension on C^(N + extra); extra = 0 gives a canonical one."""
    N, n = system.dim, system.index
    if extra == 0:
        return ExtensionData(canonical_extension(system, random_unitary(n, rng)), system)
    M = N + extra
    source = np.hstack([embed(system.ker_basis, M), np.eye(M)[:, N:]])
    target = np.hstack([embed(system.coran_basis, M), np.eye(M)[:, N:]])
    base = embed(system.V @ system.ker_perp_basis @ system.ker_perp_basis.conj().T, M)
    base = np.hstack([base, np.zeros((M, extra))])
    for _ in range(tries):
        U = base + target @ random_unitary(n + extra, rng) @ source.conj().T
        if krylov_is_full(U, N):
            return ExtensionData(U, system)
    raise InputError("could not draw a minimal extension")


def random_upper_points(count: int, rng: np.random.Generator, low: float = 0.2, high: float = 3.0) -> list:
    return [complex(x, y) for x, y in zip(rng.uniform(-3, 3, count), rng.uniform(low, high, count))]


def random_blaschke(degree: int, rng: np.random.Generator, include_i: bool = False) -> ScalarInner:
    zeros = random_upper_points(degree - int(include_i), rng)
    if include_i:
        zeros = [1j] + zeros
    return ScalarInner(1.0, tuple(zeros)).canonical()
