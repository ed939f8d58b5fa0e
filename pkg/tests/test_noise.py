import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _helpers import random_data
from noisyloewner import (FrequencyData, InterpolationSet, LabelMismatch, LengthMismatch, NoiseDraw,
                          build_loewner, delta_matrices, draw_noise, pollute, structure_matrices)
from noisyloewner.noise import noise_stream, read_noise_draw, write_noise_draw


@pytest.fixture
def unit_data():
    # r = 1, H(mu_1) = 2
    return FrequencyData(InterpolationSet([1j], [-1j]), [2.0], [3.0])


class TestPollute:
    def test_zero_sigma(self, scalar_data):
        out = pollute(scalar_data, 0.0, draw_noise(1, 5))
        assert np.array_equal(out.h_mu, scalar_data.h_mu) and np.array_equal(out.h_gamma, scalar_data.h_gamma)
        assert out.label == 'noisy(0.0)'

    def test_relative(self, unit_data):
        out = pollute(unit_data, 0.1, NoiseDraw([0.5 + 0.5j], [0.0]))
        assert out.h_mu[0] == pytest.approx(2.1 + 0.1j)
        assert out.h_gamma[0] == 3.0

    def test_absolute(self, unit_data):
        out = pollute(unit_data, 0.1, NoiseDraw([0.5 + 0.5j], [0.0], mode='absolute'))
        assert out.h_mu[0] == pytest.approx(2.05 + 0.05j)

    def test_original_unchanged(self, unit_data):
        before = unit_data.h_mu.copy()
        pollute(unit_data, 1.0, NoiseDraw([1.0], [1.0]))
        assert np.array_equal(unit_data.h_mu, before)

    def test_errors(self, unit_data):
        with pytest.raises(LengthMismatch):
            pollute(unit_data, 0.1, draw_noise(2, 0))
        noisy = pollute(unit_data, 0.1, draw_noise(1, 0))
        with pytest.raises(LabelMismatch):
            pollute(noisy, 0.1, draw_noise(1, 0))
        with pytest.raises(ValueError):
            pollute(unit_data, -1.0, draw_noise(1, 0))

    def test_determinism(self):
        data = random_data(np.random.default_rng(1), 5)
        a = pollute(data, 1e-3, draw_noise(5, 42, key=(0, 3, 1)))
        b = pollute(data, 1e-3, draw_noise(5, 42, key=(0, 3, 1)))
        assert a.h_mu.tobytes() == b.h_mu.tobytes() and a.h_gamma.tobytes() == b.h_gamma.tobytes()

    def test_unbiased(self):
        data = random_data(np.random.default_rng(2), 3)
        sigma, n = 0.05, 10**4
        vals = np.array([pollute(data, sigma, draw_noise(3, 7, key=(k,))).h_mu for k in range(n)])
        dev = np.abs(vals.mean(axis=0) - data.h_mu)
        assert np.all(dev <= 4 * sigma * np.abs(data.h_mu) / np.sqrt(n))


class TestDraws:
    def test_keyed_streams_independent_of_order(self):
        a = [draw_noise(4, 0, key=(0, i, 0)).eps for i in range(3)]
        b = [draw_noise(4, 0, key=(0, i, 0)).eps for i in reversed(range(3))][::-1]
        assert all(np.array_equal(x, y) for x, y in zip(a, b))
        assert not np.array_equal(a[0], a[1])

    def test_moments(self):
        z = noise_stream(3, (5,)).standard_normal((4, 10**5))
        d = draw_noise(10**5, 3, key=(5,))
        assert np.array_equal(d.eps.real, z[0]) and np.array_equal(d.eta.imag, z[3])
        for part in (d.eps.real, d.eps.imag, d.eta.real, d.eta.imag):
            assert abs(part.mean()) < 0.02
            assert abs(part.var() - 1) < 0.02
        assert abs(np.mean(d.eps.real * d.eps.imag)) < 0.02
        # each part has unit variance, so E|eps|^2 = 2
        assert abs(np.mean(np.abs(d.eps) ** 2) - 2) < 0.03

    def test_real_vector_concentration(self):
        r, n = 16, 10**4
        hits = sum(np.linalg.norm(draw_noise(r, 1, key=(k,)).eps.real) > 2 * np.sqrt(r) for k in range(n))
        p = np.exp(-r / 2)
        assert hits / n <= p + 3 * np.sqrt(p * (1 - p) / n)

    def test_draw_validation(self):
        with pytest.raises(LengthMismatch):
            NoiseDraw([1, 2], [1])
        with pytest.raises(ValueError):
            NoiseDraw([1], [1], mode='multiplicative')


class TestStructure:
    def test_zero_draw(self):
        data = random_data(np.random.default_rng(3), 4)
        pert = delta_matrices(data, NoiseDraw(np.zeros(4), np.zeros(4)))
        for M in (pert.dL, pert.dLs, pert.dB, pert.dC):
            assert not np.any(M)

    def test_scalar_unrolled(self, scalar_data):
        pert = delta_matrices(scalar_data, NoiseDraw([1.0], [0.0]))
        assert pert.dL[0, 0] == pytest.approx(scalar_data.h_mu[0] / (1j - (-1j)))
        assert np.array_equal(pert.dE, -pert.dL) and np.array_equal(pert.dA, -pert.dLs)

    def test_scalar_structure(self, scalar_data):
        F_E, F_A = structure_matrices(scalar_data, 0)
        assert F_E[0, 0] == pytest.approx((1 - 1j) / 4)
        assert F_A[0, 0] == pytest.approx((1 + 1j) / 4)

    def test_zero_row_and_column(self):
        data = random_data(np.random.default_rng(4), 4)
        F_E, _ = structure_matrices(data, data.points.mu[0])
        _, F_A = structure_matrices(data, data.points.gamma[0])
        assert not np.any(F_E[0]) and not np.any(F_A[:, 0])

    @given(st.integers(0, 10**6), st.integers(1, 8), st.sampled_from(['relative', 'absolute']))
    def test_master_identity(self, seed, r, mode):
        rng = np.random.default_rng(seed)
        data = random_data(rng, r)
        draw = draw_noise(r, seed, mode=mode)
        s = complex(*rng.standard_normal(2) * 5)
        pert = delta_matrices(data, draw)
        F_E, F_A = structure_matrices(data, s, mode)
        lhs = s * pert.dE - pert.dA
        rhs = np.diag(draw.eps) @ F_E + F_A @ np.diag(draw.eta)
        assert np.abs(lhs - rhs).max() <= 1e-12 * max(np.abs(lhs).max(), np.abs(rhs).max())

    @given(st.integers(0, 10**6), st.integers(1, 8), st.floats(1e-8, 1.0), st.sampled_from(['relative', 'absolute']))
    def test_decomposition(self, seed, r, sigma, mode):
        data = random_data(np.random.default_rng(seed), r)
        draw = draw_noise(r, seed, mode=mode)
        noisy = build_loewner(pollute(data, sigma, draw))
        base = build_loewner(data)
        pert = delta_matrices(data, draw)
        for got, m0, dm in ((noisy.E_hat, base.E_hat, pert.dE), (noisy.A_hat, base.A_hat, pert.dA),
                            (noisy.B_hat, base.B_hat, pert.dB), (noisy.C_hat, base.C_hat, pert.dC)):
            want = m0 + sigma * dm
            assert np.abs(got - want).max() <= 1e-12 * np.abs(want).max()


class TestNoiseDrawCsv:
    @given(st.integers(0, 10**6), st.integers(1, 10))
    def test_roundtrip(self, tmp_path_factory, seed, r):
        d = draw_noise(r, seed, key=(1, 2))
        path = tmp_path_factory.mktemp('nd') / 'draw.csv'
        write_noise_draw(d, path)
        back = read_noise_draw(path, seed=seed, key=(1, 2))
        assert np.array_equal(back.eps, d.eps) and np.array_equal(back.eta, d.eta)

    def test_header(self, tmp_path):
        path = tmp_path / 'd.csv'
        write_noise_draw(draw_noise(2, 0), path)
        assert path.read_text().splitlines()[0] == 'index,re_eps,im_eps,re_eta,im_eta'
