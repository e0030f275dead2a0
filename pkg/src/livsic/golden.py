"""The two worked examples, rebuilt from their matrices and checked item by item."""
from __future__ import annotations

import time
from typing import Optional

import numpy as np

from .extensions import (ExtensionData, OrderWitness, clark_measure, domain_images, ext_char,
                         herglotz_data, lambda_deviation, order_witness, pochar_verify)
from .herglotz import AtomicMatrixMeasure, herglotz_eval, measure_deviation
from .inner import divides, livsic_char
from .jsonio import complex_to_json, inner_to_json
from .numeric import multiset_distance
from .operators import canonical_extension, cayley, cayley_inverse, deficiency_data
from .report import Report

# Example with a nilpotent base and an extension having eigenvalue 1.
FDEG_V = np.array([[0, 0], [1, 0]], dtype=complex)
FDEG_U = np.array([[0, 3 / 5, 4 / 5], [1, 0, 0], [0, 4 / 5, -3 / 5]], dtype=complex)
FDEG_BETA = complex(-4 / 5, 3 / 5)

# Example with two bases inside one canonical extension.
FDEG2_W = np.array([[0, 3 / 5, 4 / 5], [1, 0, 0], [0, 0, 0]], dtype=complex)
FDEG2_X = np.array([[0, 3 / 5, 4 / 5], [1, 0, 0], [0, -4j / 5, 3j / 5]], dtype=complex)
FDEG2_LAMBDA = complex(2 * np.sqrt(6) / 5, -1 / 5)


def fdeg_extension() -> ExtensionData:
    return ExtensionData(FDEG_U, deficiency_data(FDEG_V))


def fdeg2_extensions() -> tuple[ExtensionData, ExtensionData]:
    """``(X over V, X over W)`` where V is the nilpotent 2x2 base."""
    return ExtensionData(FDEG2_X, deficiency_data(FDEG_V)), ExtensionData(FDEG2_X, deficiency_data(FDEG2_W))


def fdeg2_D(t: float) -> complex:
    return -1j * (4 / 5) / (complex(cayley(t)) ** 2 - 3 / 5)


def fdeg2_f(t: float) -> complex:
    return (1 - complex(cayley(t))) * (1j / np.pi) / (t + 1j)


def _zeros_json(zeros):
    return [complex_to_json(z) for z in zeros]


def _circle_check(report, name, measure, expected, tol):
    expected_measure = AtomicMatrixMeasure("circle", tuple(expected), tuple(np.array([[w]]) for w in expected.values()))
    computed = {str(complex_to_json(p)): float(w[0, 0].real) for p, w in zip(measure.points, measure.weights)}
    report.check(name, computed, {str(complex_to_json(p)): w for p, w in expected.items()},
                 measure_deviation(measure, expected_measure), tol)


def _tol(default: float, override: Optional[float]) -> float:
    return default if override is None else override


def reproduce_fdeg(tol: Optional[float] = None) -> Report:
    start = time.perf_counter()
    report = Report("reproduce fdeg")
    ext = fdeg_extension()

    eig = np.linalg.eigvals(ext.U)
    expected_eig = [1, FDEG_BETA, FDEG_BETA.conjugate()]
    report.check("eigenvalues of U", _zeros_json(sorted(eig, key=lambda z: z.imag)), _zeros_json(expected_eig),
                 multiset_distance(eig, expected_eig), _tol(1e-10, tol))
    pair = [complex(cayley_inverse(FDEG_BETA)), complex(cayley_inverse(FDEG_BETA.conjugate()))]
    report.check("inverse Cayley images of the complex eigenvalues", _zeros_json(pair), _zeros_json([-1 / 3, 1 / 3]),
                 multiset_distance(pair, [-1 / 3, 1 / 3]), _tol(1e-10, tol))

    sigma = clark_measure(ext)
    _circle_check(report, "Clark measure weights", sigma,
                  {1: 4 / 9, FDEG_BETA: 5 / 18, FDEG_BETA.conjugate(): 5 / 18}, _tol(1e-10, tol))

    h = herglotz_data(ext)
    line_expected = AtomicMatrixMeasure("line", (1 / 3, -1 / 3),
                                        tuple(np.array([[np.pi * (10 / 9) * (5 / 18)]]) for _ in range(2)))
    report.check("mass at 1 of the Clark measure", float(h.P[0, 0].real), 4 / 9, abs(h.P[0, 0] - 4 / 9), _tol(1e-10, tol))
    report.check("line measure atoms", [p.real for p in h.measure.points], [1 / 3, -1 / 3],
                 measure_deviation(h.measure, line_expected), _tol(1e-10, tol))
    g_i = herglotz_eval(h, 1j)[0, 0]
    report.check("Herglotz function at i", complex_to_json(g_i), complex_to_json(1), abs(g_i - 1), _tol(1e-10, tol))

    theta = livsic_char(ext.base)
    report.check("zeros of the base characteristic function", _zeros_json(theta.zeros), _zeros_json([1j, 1j]),
                 multiset_distance(theta.zeros, [1j, 1j]), _tol(1e-8, tol))
    phi = ext_char(ext)
    report.check("zeros of the extension characteristic function", _zeros_json(phi.zeros),
                 _zeros_json([1j, 1j, 0.25j]), multiset_distance(phi.zeros, [1j, 1j, 0.25j]), _tol(1e-8, tol))
    report.flag("base divides extension", divides(theta, phi))
    worst, coverage = lambda_deviation(ext)
    report.check("kernel quotients equal the extension function", worst, 0.0, worst if coverage >= 0.8 else np.inf,
                 _tol(1e-8, tol))

    elapsed = time.perf_counter() - start
    report.flag("runtime below one second", elapsed < 1.0)
    report.data.update({"base": inner_to_json(theta), "extension": inner_to_json(phi), "runtime_seconds": elapsed})
    return report


def reproduce_fdeg2(tol: Optional[float] = None) -> Report:
    start = time.perf_counter()
    report = Report("reproduce fdeg2")
    over_v, over_w = fdeg2_extensions()
    lam = FDEG2_LAMBDA

    param = canonical_extension(over_w.base, np.array([[-1j]]))
    report.check("canonical extension of W with parameter -i", None, None,
                 float(np.linalg.norm(param - FDEG2_X)), _tol(1e-12, tol))

    eig = np.linalg.eigvals(FDEG2_X)
    expected_eig = [1j, lam, -lam.conjugate()]
    report.check("roots of det(z - X)", _zeros_json(eig), _zeros_json(expected_eig),
                 multiset_distance(eig, expected_eig), _tol(1e-10, tol))

    _circle_check(report, "Clark measure of X relative to W", clark_measure(over_w),
                  {1j: 2 / 3, lam: 1 / 6, -lam.conjugate(): 1 / 6}, _tol(1e-10, tol))
    _circle_check(report, "Clark measure of X relative to V", clark_measure(over_v),
                  {1j: 1 / 6, lam: 5 / 12, -lam.conjugate(): 5 / 12}, _tol(1e-10, tol))

    beta = float(np.real(cayley_inverse(lam)))
    sigma_t = AtomicMatrixMeasure("line", (-1.0, beta, 1 / beta), (
        np.array([[np.pi * 4 / 3]]),
        np.array([[np.pi * (1 + beta**2) / 6]]),
        np.array([[np.pi * (1 + beta**-2) / 6]]),
    ))
    report.check("line measure of X relative to W", [p.real for p in herglotz_data(over_w).measure.points],
                 [-1.0, beta, 1 / beta], measure_deviation(herglotz_data(over_w).measure, sigma_t), _tol(1e-10, tol))

    theta_t = livsic_char(over_w.base)
    expected_t = [1j, 1j * (4 + np.sqrt(15)), 1j * (4 - np.sqrt(15))]
    report.check("zeros of the characteristic function of W", _zeros_json(theta_t.zeros), _zeros_json(expected_t),
                 multiset_distance(theta_t.zeros, expected_t), _tol(1e-8, tol))
    theta_b = livsic_char(over_v.base)
    report.check("zeros of the characteristic function of V", _zeros_json(theta_b.zeros), _zeros_json([1j, 1j]),
                 multiset_distance(theta_b.zeros, [1j, 1j]), _tol(1e-8, tol))
    phi = ext_char(over_v)
    mu = (1j - 4) / (1j + 4)
    report.check("zeros of the extension function relative to V", _zeros_json(phi.zeros),
                 _zeros_json([1j, 1j, mu]), multiset_distance(phi.zeros, [1j, 1j, mu]), _tol(1e-8, tol))
    report.flag("V-function divides W-function", divides(theta_b, theta_t), expected=False)

    built = order_witness(over_v, over_w)
    witness = OrderWitness(theta_b, phi, fdeg2_D, built.sigma_small, built.sigma_big)
    order = pochar_verify(witness, [fdeg2_f], tol=_tol(1e-10, tol))
    report.flag("ordering condition 1", order.cond1)
    report.flag("ordering condition 2", order.cond2)
    report.flag("ordering condition 3", order.cond3)
    report.check("moment of f against the small measure", order.moment_small, 0.0, order.moment_small, _tol(1e-10, tol))
    report.check("moment of D f against the large measure", order.moment_big, 0.0, order.moment_big, _tol(1e-10, tol))

    atoms = [t.real for t in built.sigma_big.points]
    d_dev = max(abs(complex(built.D(t)[0, 0]) - fdeg2_D(t)) for t in atoms)
    report.check("D recovered from the spectral data", d_dev, 0.0, d_dev, _tol(1e-10, tol))
    image = domain_images(over_v)[0]
    f_dev = max(abs(complex(image(t)[0]) - fdeg2_f(t)) for t in atoms)
    report.check("domain image recovered from the spectral data", f_dev, 0.0, f_dev, _tol(1e-10, tol))
    for name, ext in (("V", over_v), ("W", over_w)):
        worst, coverage = lambda_deviation(ext)
        report.check(f"kernel quotients equal the extension function relative to {name}", worst, 0.0,
                     worst if coverage >= 0.8 else np.inf, _tol(1e-8, tol))

    elapsed = time.perf_counter() - start
    report.flag("runtime below one second", elapsed < 1.0)
    report.data.update({"extension": inner_to_json(phi), "runtime_seconds": elapsed})
    return report


EXAMPLES = {"fdeg": reproduce_fdeg, "fdeg2": reproduce_fdeg2}


def reproduce(name: str, tol: Optional[float] = None) -> Report:
    return EXAMPLES[name](tol)
