import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from haareig import DomainError
from haareig.rand_dist import RngStream, chi_complex_sq, chi_real, std_normal_complex, std_normal_real, uniform_phase

N_BIG = 1_000_000
N_KS = 100_000
KS_CRIT = 1.63 / math.sqrt(N_KS)


def two_sample_crit(n, m):
    return 1.63 * math.sqrt((n + m) / (n * m))


@pytest.fixture(scope="module")
def normals():
    rng = RngStream(1)
    return np.array([rng.std_normal_real() for _ in range(N_BIG)])


@pytest.fixture(scope="module")
def complex_normals():
    rng = RngStream(2)
    return np.array([rng.std_normal_complex() for _ in range(N_BIG)])


def test_normal_moments(normals):
    assert abs(normals.mean()) < 0.005
    assert abs(normals.var() - 1.0) < 0.01
    assert abs(sps.skew(normals)) < 0.01


def test_normal_ks(normals):
    assert sps.kstest(normals[:N_KS], "norm").statistic < KS_CRIT


def test_complex_normal(complex_normals):
    z = complex_normals
    assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 0.01
    assert abs(np.corrcoef(z.real, z.imag)[0, 1]) < 0.01
    assert abs(z.real.var() - 0.5) < 0.005
    assert sps.kstest(np.angle(z[:N_KS]), sps.uniform(-math.pi, 2 * math.pi).cdf).statistic < KS_CRIT


def test_complex_modulus_is_chi_complex(complex_normals):
    rng = RngStream(3)
    ref = np.array([rng.chi_complex_sq(1) for _ in range(N_KS)])
    assert sps.ks_2samp(np.abs(complex_normals[:N_KS]) ** 2, ref).statistic < two_sample_crit(N_KS, N_KS)


@pytest.mark.parametrize("k", [1, 2, 5, 20])
def test_chi_real_moments(k):
    rng = RngStream(10 + k)
    x2 = np.array([rng.chi_real(k) for _ in range(N_BIG)]) ** 2
    assert x2.min() >= 0.0
    assert abs(x2.mean() / k - 1.0) < 0.02
    assert abs(x2.var() / (2 * k) - 1.0) < 0.02


def test_chi_real_k5_mean():
    rng = RngStream(7)
    x2 = np.array([chi_real(5, rng) for _ in range(N_BIG)]) ** 2
    assert abs(x2.mean() - 5.0) < 0.05


@pytest.mark.parametrize("k", [1, 3, 8])
def test_chi_real_gamma_matches_sum_oracle(k):
    rng = RngStream(20 + k)
    a = np.array([rng.chi_real(k) for _ in range(N_KS)])
    b = np.array([rng.chi_real_by_sum(k) for _ in range(N_KS)])
    assert sps.ks_2samp(a, b).statistic < two_sample_crit(N_KS, N_KS)


def test_chi_complex_sq_moments():
    rng = RngStream(30)
    x = np.array([chi_complex_sq(4, rng) for _ in range(N_BIG)])
    assert abs(x.mean() - 4.0) < 0.05
    assert abs(x.var() - 4.0) < 0.05
    x1 = np.array([rng.chi_complex_sq(1) for _ in range(N_KS)])
    assert abs(x1.mean() - 1.0) < 0.02


def test_chi_complex_sq_matches_half_chi_real_sq():
    rng = RngStream(31)
    a = np.array([rng.chi_complex_sq(3) for _ in range(N_KS)])
    b = np.array([rng.chi_real(6) ** 2 / 2 for _ in range(N_KS)])
    assert sps.ks_2samp(a, b).statistic < two_sample_crit(N_KS, N_KS)


@pytest.mark.parametrize("fn", [lambda r: chi_real(0, r), lambda r: chi_complex_sq(0, r),
                                lambda r: r.chi_real(-1), lambda r: r.chi_real_by_sum(65)])
def test_chi_rejects_bad_dof(fn):
    with pytest.raises(DomainError):
        fn(RngStream(0))


def test_uniform_phase():
    rng = RngStream(40)
    th = np.array([uniform_phase(rng) for _ in range(N_BIG)])
    assert th.min() > -math.pi and th.max() <= math.pi
    assert abs(np.mean(np.exp(1j * th))) < 0.005
    counts, _ = np.histogram(th, bins=50, range=(-math.pi, math.pi))
    assert sps.chisquare(counts).pvalue > 0.001


def test_gamma_small_shape():
    rng = RngStream(41)
    g = np.array([rng.gamma(0.5) for _ in range(N_KS)])
    assert sps.kstest(g, sps.gamma(0.5).cdf).statistic < KS_CRIT


def test_determinism_and_functional_aliases():
    a, b = RngStream(123), RngStream(123)
    xs = [a.std_normal_real(), a.chi_real(3), a.uniform_phase(), a.std_normal_complex()]
    ys = [std_normal_real(b), chi_real(3, b), uniform_phase(b), std_normal_complex(b)]
    assert xs == ys


def test_split_streams_differ_and_are_reproducible():
    root = RngStream(5)
    a, b = root.split(0), root.split(1)
    assert a.uniform() != b.uniform()
    assert RngStream(5).split(0).split(3).uniforms(10).tolist() == RngStream(5, (0, 3)).uniforms(10).tolist()
    with pytest.raises(DomainError):
        root.split(-1)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 5000), min_size=1, max_size=6))
def test_transcript_independent_of_chunking(chunks):
    total = sum(chunks)
    whole = RngStream(9).uniforms(total)
    r = RngStream(9)
    parts = np.concatenate([r.uniforms(c) for c in chunks])
    assert np.array_equal(whole, parts)
    r = RngStream(9)
    singles = np.array([r.uniform() for _ in range(min(total, 5000))])
    assert np.array_equal(whole[:len(singles)], singles)


def _reference_gamma(uniform, shape):
    """Plain-python Marsaglia-Tsang over a uniform source (shape >= 1)."""
    def normal():
        while True:
            u, v = 2.0 * uniform() - 1.0, 2.0 * uniform() - 1.0
            r2 = u * u + v * v
            if 0.0 < r2 < 1.0:
                return u * math.sqrt(-2.0 * math.log(r2) / r2)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = normal()
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v ** 3
        u = uniform()
        if u < 1.0 - 0.0331 * x ** 4 or math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
            return d * v


def test_gamma_transcript_across_buffer_refills():
    a = RngStream(77)
    got = [a.gamma(2.5) for _ in range(20_000)]
    src = iter(RngStream(77).uniforms(200_000).tolist())
    want = [_reference_gamma(lambda: next(src), 2.5) for _ in range(20_000)]
    assert np.allclose(got, want, rtol=1e-14, atol=0)


@pytest.mark.parametrize("seed", [-1, 2**64])
def test_seed_range(seed):
    with pytest.raises(DomainError):
        RngStream(seed)
