import io

import numpy as np
import pytest
from scipy.integrate import quad

from oracles import dense_gate
from pqcfourier import (
    CircuitTemplate,
    ConfigurationError,
    DataVariable,
    Model,
    PauliRotation,
    PauliString,
    SumSquareStats,
    design_value,
    evaluate_on_grid,
    extract_coefficients,
    hea,
    hee,
    model_spectrum,
    parseval_sum,
    qnn,
    rx,
    sum_sq_statistics,
    z_string,
)
from pqcfourier.circuits import expectation_model
from pqcfourier.fourier import (
    evaluate_on_grid_2d,
    extract_coefficients_2d,
    grid_points,
    sample_spectra,
    stats_row,
)

X = DataVariable("x")


def cosine_model():
    return Model(CircuitTemplate(1, [rx(0, X)], (), ("x",)), PauliString("Z"), "x")


def sine_model():
    # RY(x)|0> measured in X gives sin x
    return Model(CircuitTemplate(1, [PauliRotation("Y", (0,), X)], (), ("x",)), PauliString("X"), "x")


def random_model(rng):
    n = int(rng.integers(1, 5))
    L = int(rng.integers(1, 6))
    axis = str(rng.choice(["X", "Y", "Z", "XY", "YZ"]))
    ent = "chain" if n == 1 else str(rng.choice(["chain", "ring"]))
    template = hee(n, L, axis, ent).then(hea(n, 1, str(rng.choice(["X", "Y"])), ent))
    obs = PauliString("".join(rng.choice(list("IXYZ"), size=n)))
    m = Model(template, obs, "x")
    return m.with_params(rng.uniform(0, 2 * np.pi, template.n_params))


class TestEvaluateOnGrid:
    def test_cosine_against_dense_oracle(self):
        N = 5
        want = []
        for x in grid_points(N):
            psi = dense_gate(1, rx(0, x)) @ np.array([1, 0])
            want.append(np.abs(psi[0]) ** 2 - np.abs(psi[1]) ** 2)
        got = evaluate_on_grid(cosine_model(), N)
        np.testing.assert_allclose(got, want, atol=1e-14)
        np.testing.assert_allclose(got, np.cos(2 * np.pi * np.arange(5) / 5), atol=1e-14)

    def test_zero_effect_rotation(self):
        m = Model(CircuitTemplate(1, [PauliRotation("Z", (0,), X)], (), ("x",)), PauliString("Z"), "x")
        np.testing.assert_allclose(evaluate_on_grid(m, 7), np.ones(7), atol=1e-15)

    def test_wrap(self, rng):
        m = random_model(rng)
        N = 2 * m.R + 1
        xs = grid_points(N)
        np.testing.assert_allclose(m.evaluate_batch(xs + 2 * np.pi), m.evaluate_batch(xs), atol=1e-10)

    def test_default_grid(self):
        m = qnn(2, 3)
        assert evaluate_on_grid(m).shape == (13,)

    def test_below_nyquist(self):
        with pytest.raises(ConfigurationError, match="13"):
            evaluate_on_grid(qnn(2, 3), 12)


class TestExtract:
    def test_cosine(self):
        spec = extract_coefficients(np.cos(grid_points(5)), 1)
        assert spec[1] == pytest.approx(0.5, abs=1e-12)
        assert spec[-1] == pytest.approx(0.5, abs=1e-12)
        assert spec[0] == pytest.approx(0.0, abs=1e-12)
        assert parseval_sum(spec) == pytest.approx(0.5, abs=1e-12)

    def test_sign_convention(self):
        # sin x = sum c_k exp(-i k x)  =>  c_1 = i/2, c_-1 = -i/2
        spec = model_spectrum(sine_model())
        assert spec[1] == pytest.approx(0.5j, abs=1e-12)
        assert spec[-1] == pytest.approx(-0.5j, abs=1e-12)

    def test_constant(self):
        spec = extract_coefficients(np.ones(9), 4)
        np.testing.assert_allclose(spec.coeffs, np.eye(9)[4], atol=1e-14)
        assert parseval_sum(spec) == pytest.approx(1.0)

    def test_zero(self):
        assert parseval_sum(extract_coefficients(np.zeros(7), 3)) == 0.0

    def test_aliasing_refused(self):
        with pytest.raises(ConfigurationError):
            extract_coefficients(np.ones(4), 2)

    def test_matches_fft(self, rng):
        m = random_model(rng)
        samples = evaluate_on_grid(m)
        R, N = m.R, samples.shape[0]
        fft = np.fft.ifft(samples)  # (1/N) sum f_j exp(+2 pi i k j / N)
        want = np.array([fft[k % N] for k in range(-R, R + 1)])
        np.testing.assert_allclose(extract_coefficients(samples, R).coeffs, want, atol=1e-12)

    def test_absent_frequency(self):
        assert extract_coefficients(np.cos(grid_points(5)), 1)[7] == 0

    def test_csv(self):
        buf = io.StringIO()
        model_spectrum(cosine_model()).to_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "k,re,im,abs2"
        assert len(lines) == 4
        k, re, im, abs2 = lines[3].split(",")
        assert int(k) == 1 and float(re) == pytest.approx(0.5) and float(abs2) == pytest.approx(0.25)


class TestSpectralInvariants:
    def test_two_grids_parseval_symmetry(self, rng):
        for _ in range(25):
            m = random_model(rng)
            R = m.R
            small = model_spectrum(m)
            large = model_spectrum(m, 4 * R + 1)
            np.testing.assert_allclose(small.coeffs, large.coeffs, atol=1e-10)
            np.testing.assert_allclose(small.coeffs[::-1], small.coeffs.conj(), atol=1e-10)
            samples = evaluate_on_grid(m)
            assert parseval_sum(small) == pytest.approx(np.mean(samples**2), abs=1e-10)

    def test_reconstruction(self, rng):
        for _ in range(10):
            m = random_model(rng)
            spec = model_spectrum(m)
            xs = rng.uniform(-10, 10, 20)
            np.testing.assert_allclose(spec(xs), m.evaluate_batch(xs), atol=1e-8)

    def test_continuous_parseval_by_quadrature(self):
        m = qnn(2, 2).with_params([0.4, 2.2])
        integral = quad(lambda x: m.evaluate(x) ** 2, 0, 2 * np.pi, limit=200)[0] / (2 * np.pi)
        assert parseval_sum(model_spectrum(m)) == pytest.approx(integral, abs=1e-9)

    def test_parameter_as_variable(self, rng):
        t = hea(3, 2)
        m = expectation_model(t).with_params(rng.uniform(0, 6, t.n_params))
        assert m.R == 1
        spec = model_spectrum(m)
        theta = m.flat_params()
        for x in [0.1, 2.0, 5.5]:
            theta[0] = x
            assert spec(x) == pytest.approx(m.with_params(theta).evaluate(), abs=1e-10)


class TestTwoVariable:
    def test_product_of_cosines(self):
        t = CircuitTemplate(2, [rx(0, X), rx(1, DataVariable("y"))], (), ("x", "y"))
        m = Model(t, z_string(2), "x", data={"y": 0.0})
        samples = evaluate_on_grid_2d(m, DataVariable("y"), 3, 5)
        np.testing.assert_allclose(
            samples, np.outer(np.cos(grid_points(3)), np.cos(grid_points(5))), atol=1e-14
        )
        c = extract_coefficients_2d(samples, 1, 1)
        want = np.zeros((3, 3))
        want[np.ix_([0, 2], [0, 2])] = 0.25
        np.testing.assert_allclose(c, want, atol=1e-14)
        assert np.sum(np.abs(c) ** 2) == pytest.approx(np.mean(samples**2))


class TestStatistics:
    def test_degenerate(self):
        stats = SumSquareStats.from_values([0.3, 0.3])
        assert stats.variance == 0.0 and stats.mean == 0.3

    def test_too_few(self):
        with pytest.raises(ConfigurationError):
            sum_sq_statistics(qnn(2, 1), 1, 0)

    def test_bounds_and_determinism(self):
        m = qnn(2, 4)
        a = sum_sq_statistics(m, 40, 7)
        b = sum_sq_statistics(m, 40, 7, workers=4)
        np.testing.assert_array_equal(a.per_sample, b.per_sample)
        assert (a.mean, a.variance) == (b.mean, b.variance)
        assert a.per_sample.min() <= a.mean <= a.per_sample.max()
        assert a.variance >= 0 and a.n_samples == 40

    def test_samples_match_direct_evaluation(self):
        m = qnn(3, 2)
        spectra = sample_spectra(m, 3, 11)
        from pqcfourier.fourier import sample_flat_params

        for s, spec in enumerate(spectra):
            direct = model_spectrum(m.with_params(sample_flat_params(m, 11, s)))
            np.testing.assert_allclose(spec.coeffs, direct.coeffs, atol=1e-12)
            assert spec.fixed_snapshot == direct.fixed_snapshot

    def test_seed_changes_draws(self):
        m = qnn(2, 2)
        assert sum_sq_statistics(m, 5, 1).mean != sum_sq_statistics(m, 5, 2).mean

    def test_stats_row_theory(self):
        stats = SumSquareStats.from_values([0.1, 0.2])
        assert stats_row(2, 20, stats)["theory"] == pytest.approx(0.2)
        assert stats_row(2, 20, stats, "probability")["theory"] == pytest.approx(0.1)


class TestDesignValue:
    @pytest.mark.parametrize("n, want", [(2, 0.2), (4, 1 / 17), (6, 1 / 65), (8, 1 / 257)])
    def test_expectation(self, n, want):
        assert design_value(n) == pytest.approx(want, rel=1e-15)

    @pytest.mark.parametrize("n, want", [(2, 0.1), (4, 0.0073529411764705885)])
    def test_probability(self, n, want):
        assert design_value(n, "probability") == pytest.approx(want, rel=1e-12)

    def test_haar_expectation_by_monte_carlo(self, rng):
        # E |<psi|Z..Z|psi>|^2 over Haar-random states equals 1/(d+1)
        for n in (1, 2, 3):
            d = 2**n
            psi = rng.normal(size=(20000, d)) + 1j * rng.normal(size=(20000, d))
            psi /= np.linalg.norm(psi, axis=1, keepdims=True)
            parity = np.array([(-1) ** bin(i).count("1") for i in range(d)])
            f2 = (np.abs(psi) ** 2 @ parity) ** 2
            p0 = np.abs(psi[:, 0]) ** 4
            assert f2.mean() == pytest.approx(design_value(n), abs=5 * f2.std() / np.sqrt(20000))
            assert p0.mean() == pytest.approx(design_value(n, "probability"), abs=5 * p0.std() / np.sqrt(20000))
