import numpy as np
import pytest
from hypothesis import given, strategies as st

from livsic.errors import InputError
from livsic.extensions import pochar_measure
from livsic.golden import FDEG2_LAMBDA, fdeg2_f
from livsic.herglotz import (AtomicMatrixMeasure, HerglotzData, cauchy_transform, herglotz_eval,
                             herglotz_function, herglotz_kernel, inverse_measure_transform, kernel_gram,
                             measure_deviation, measure_transform)
from livsic.inner import MatrixContractive, ScalarInner, herglotz_link, livsic_function
from livsic.operators import cayley, cayley_inverse
from livsic.sampling import random_partial_isometry, random_upper_points

seeds = st.integers(0, 2**32 - 1)


def random_circle_measure(rng, atoms, n, unital=False):
    angles = np.sort(rng.uniform(0.1, 2 * np.pi - 0.1, atoms))
    weights = []
    for _ in range(atoms):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        weights.append(a @ a.conj().T)
    if unital:
        total = sum(weights)
        vals, vecs = np.linalg.eigh(total)
        root = vecs @ np.diag(vals ** -0.5) @ vecs.conj().T
        weights = [root @ w @ root for w in weights]
    return AtomicMatrixMeasure("circle", tuple(np.exp(1j * angles)), tuple(weights))


def fdeg_data():
    line = AtomicMatrixMeasure("line", (1 / 3, -1 / 3),
                               tuple(np.array([[np.pi * (10 / 9) * (5 / 18)]]) for _ in range(2)))
    return HerglotzData(np.array([[4 / 9]]), line)


class TestMeasures:
    def test_validation(self):
        with pytest.raises(InputError):
            AtomicMatrixMeasure("disk", (), ())
        with pytest.raises(InputError):
            AtomicMatrixMeasure("circle", (0.5,), (np.eye(1),))
        with pytest.raises(InputError):
            AtomicMatrixMeasure("line", (1j,), (np.eye(1),))
        with pytest.raises(InputError):
            AtomicMatrixMeasure("line", (0.0,), (-np.eye(1),))
        with pytest.raises(InputError):
            AtomicMatrixMeasure("line", (0.0, 0.0), (np.eye(1), np.eye(1)))

    def test_deviation_detects_support_change(self):
        a = AtomicMatrixMeasure("line", (0.0,), (np.eye(1),))
        b = AtomicMatrixMeasure("line", (1.0,), (np.eye(1),))
        assert measure_deviation(a, b) == np.inf
        assert measure_deviation(a, a) == 0


class TestTransform:
    def test_three_dimensional_example(self):
        lam = FDEG2_LAMBDA
        sigma = AtomicMatrixMeasure("circle", (1j, lam, -lam.conjugate()),
                                    (np.array([[2 / 3]]), np.array([[1 / 6]]), np.array([[1 / 6]])))
        beta = float(np.real(cayley_inverse(lam)))
        expected = AtomicMatrixMeasure("line", (-1.0, beta, 1 / beta), (
            np.array([[np.pi * 4 / 3]]),
            np.array([[np.pi * (1 + beta ** 2) / 6]]),
            np.array([[np.pi * (1 + beta ** -2) / 6]]),
        ))
        h = measure_transform(sigma)
        assert np.linalg.norm(h.P) == 0
        assert measure_deviation(h.measure, expected) < 1e-12
        # b(-1) = i places the heaviest atom at -1
        assert cayley(-1) == pytest.approx(1j)

    def test_mass_at_one(self):
        w = np.array([[0.3, 0.1j], [-0.1j, 0.2]])
        h = measure_transform(AtomicMatrixMeasure("circle", (1.0,), (w,)))
        assert np.allclose(h.P, w) and len(h.measure) == 0

    def test_round_trip(self, rng):
        sigma = random_circle_measure(rng, 4, 2)
        back = inverse_measure_transform(measure_transform(sigma))
        assert measure_deviation(back, sigma) < 1e-10
        # independent inverse map: t -> b(t), weight / (pi (1 + t^2))
        h = measure_transform(sigma)
        for t, w in zip(h.measure.points, h.measure.weights):
            assert np.allclose(sigma.weight_at(complex(cayley(t.real))), w / (np.pi * (1 + t.real ** 2)))

    def test_line_input_rejected(self):
        with pytest.raises(InputError):
            measure_transform(AtomicMatrixMeasure("line", (0.0,), (np.eye(1),)))


class TestEval:
    def test_worked_value_at_i(self):
        assert herglotz_eval(fdeg_data(), 1j)[0, 0] == pytest.approx(1, abs=1e-12)

    def test_linear_term_only(self):
        h = HerglotzData(np.eye(2), AtomicMatrixMeasure("line", (), ()))
        z = complex(0.3, 1.7)
        assert np.allclose(herglotz_eval(h, z), -1j * z * np.eye(2))

    def test_worked_value_at_2i_two_routes(self):
        z = 2j
        # Closed form of the integral; each atom term carries a factor 1/i.
        closed = (-1j * (4 / 9) * z + (5 / 18) * (z / 3 + 1) / (1j * (1 / 3 - z))
                  + (5 / 18) * (-z / 3 + 1) / (1j * (-1 / 3 - z)))
        phi = ScalarInner(1, (1j, 1j, 0.25j))(z)
        from_phi = (1 + phi) / (1 - phi)
        computed = herglotz_eval(fdeg_data(), z)[0, 0]
        assert computed == pytest.approx(closed, abs=1e-12)
        assert computed == pytest.approx(from_phi, abs=1e-12)

    def test_real_point_rejected(self):
        with pytest.raises(InputError):
            herglotz_eval(fdeg_data(), 0.5)


@given(seeds, st.integers(1, 3), st.integers(1, 2), st.booleans())
def test_unital_iff_value_one_at_i(seed, atoms, n, unital):
    rng = np.random.default_rng(seed)
    sigma = random_circle_measure(rng, atoms, n, unital)
    h = measure_transform(sigma)
    g_i = herglotz_eval(h, 1j)
    assert np.allclose(g_i, sigma.total_mass(), atol=1e-9)
    assert (np.linalg.norm(g_i - np.eye(n)) <= 1e-9) == (np.linalg.norm(sigma.total_mass() - np.eye(n)) <= 1e-9)


@given(seeds, st.complex_numbers(max_magnitude=5))
def test_reflection_symmetry(seed, z):
    if abs(z.imag) < 1e-3:
        return
    rng = np.random.default_rng(seed)
    h = measure_transform(random_circle_measure(rng, 3, 2))
    assert np.linalg.norm(herglotz_eval(h, z.conjugate()).conj().T + herglotz_eval(h, z)) <= 1e-9 * max(1, abs(z)) ** 2


class TestKernel:
    def test_value_at_i_for_unital_measure(self, rng):
        sigma = random_circle_measure(rng, 3, 2, unital=True)
        g = herglotz_function(measure_transform(sigma))
        # Normalisation: G(i) = I gives K_i(i) = I / pi.
        assert np.allclose(herglotz_kernel(g, 1j, 1j), np.eye(2) / np.pi)

    def test_hermitian_symmetry(self, rng):
        g = herglotz_function(measure_transform(random_circle_measure(rng, 4, 2)))
        for w, z in zip(random_upper_points(5, rng), random_upper_points(5, rng)):
            assert np.allclose(herglotz_kernel(g, w, z), herglotz_kernel(g, z, w).conj().T)

    def test_gram_psd(self, rng):
        g = herglotz_function(measure_transform(random_circle_measure(rng, 4, 2)))
        gram = kernel_gram(lambda w, z: herglotz_kernel(g, w, z), random_upper_points(6, rng))
        assert gram.gram.shape == (12, 12)
        assert gram.hermitian_defect < 1e-12
        assert gram.certify().is_psd

    def test_conjugate_point_rejected(self):
        g = herglotz_function(fdeg_data())
        with pytest.raises(InputError):
            herglotz_kernel(g, 1j, -1j)


@given(seeds, st.integers(2, 8))
def test_kernel_grams_psd(seed, count):
    rng = np.random.default_rng(seed)
    g = herglotz_function(measure_transform(random_circle_measure(rng, 5, 2)))
    gram = kernel_gram(lambda w, z: herglotz_kernel(g, w, z), random_upper_points(count, rng))
    assert gram.certify(1e-9).min_eigenvalue >= -1e-9


@given(seeds)
def test_conjugation_identity(seed):
    rng = np.random.default_rng(seed)
    theta = livsic_function(random_partial_isometry(4, 2, rng))
    transposed = MatrixContractive(lambda z: theta(z).T, 2)
    g, gt = herglotz_link("to_g", theta), herglotz_link("to_g", transposed)
    z, w = random_upper_points(2, rng)
    left = herglotz_kernel(gt, w.conjugate(), z)
    right = herglotz_kernel(g, w, z.conjugate()).conj()
    assert np.linalg.norm(left - right) <= 1e-9


class TestCauchy:
    def test_single_atom(self):
        w = np.array([[2.0, 0.5], [0.5, 1.0]])
        m = AtomicMatrixMeasure("line", (0.7,), (w,))
        z = complex(0.1, 1.2)
        e1 = np.array([1, 0])
        assert np.allclose(cauchy_transform(m, [e1], z), w @ e1 / (1j * np.pi * (0.7 - z)))

    def test_worked_moment_vanishes(self, fdeg2):
        over_v, _ = fdeg2
        sigma = pochar_measure(over_v)
        moment = sigma.integrate([np.atleast_1d(fdeg2_f(t.real)) for t in sigma.points])
        assert np.linalg.norm(moment) < 1e-12

    def test_isometry_through_kernel_gram(self, rng):
        ts = (-1.3, 0.4, 2.2)
        ws = tuple(np.array([[x]]) for x in rng.uniform(0.5, 2, 3))
        m = AtomicMatrixMeasure("line", ts, ws)
        g = herglotz_function(HerglotzData(np.zeros((1, 1)), m))
        h = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        values = [np.array([x]) for x in h]
        norm_sigma = sum(float(w[0, 0].real) * abs(x) ** 2 for w, x in zip(ws, h))
        points = random_upper_points(6, rng)
        gram = kernel_gram(lambda w, z: herglotz_kernel(g, w, z), points).gram
        f = np.concatenate([cauchy_transform(m, values, z) for z in points])
        norm_space = float(np.real(f.conj() @ np.linalg.pinv(gram, rcond=1e-10, hermitian=True) @ f))
        assert norm_space == pytest.approx(norm_sigma, rel=1e-7)

    def test_real_point_rejected(self):
        with pytest.raises(InputError):
            cauchy_transform(AtomicMatrixMeasure("line", (0.0,), (np.eye(1),)), [np.ones(1)], 1.0)
