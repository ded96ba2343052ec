import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from haareig import DomainError
from haareig import stats
from haareig.stats import EigenSample, Histogram


def test_eigen_sample_checks_modulus():
    assert len(EigenSample([1, 1j])) == 2
    with pytest.raises(DomainError):
        EigenSample([1.1])


def test_phases():
    assert stats.phases(EigenSample([1])) == pytest.approx([0])
    assert stats.phases(EigenSample([-1, 1j])) == pytest.approx([math.pi / 2, math.pi])
    z = np.exp(1j * np.random.default_rng(0).uniform(-4, 4, 50))
    th = stats.phases(z)
    assert np.all(np.diff(th) >= 0) and th.min() >= 0 and th.max() < 2 * math.pi


def test_spacings_examples():
    n = 7
    assert stats.spacings(np.exp(2j * math.pi * np.arange(n) / n)) == pytest.approx(np.ones(n))
    assert stats.spacings(np.array([1, -1])) == pytest.approx([1, 1])
    with pytest.raises(DomainError):
        stats.spacings(np.array([1]))


@settings(max_examples=100)
@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=40))
def test_spacings_sum_to_n(angles):
    sp = stats.spacings(np.exp(1j * np.array(angles)))
    assert np.all(sp >= 0)
    assert abs(sp.sum() - len(angles)) <= 1e-10


def test_wigner_density():
    assert stats.wigner_density(0.0) == 0
    assert stats.wigner_density(1.0) == pytest.approx(0.716186, abs=1e-6)
    assert integrate.quad(stats.wigner_density, 0, 10)[0] == pytest.approx(1, abs=1e-6)
    assert integrate.quad(lambda z: z * stats.wigner_density(z), 0, 10)[0] == pytest.approx(1, abs=1e-6)
    with pytest.raises(DomainError):
        stats.wigner_density(-0.1)
    z = np.linspace(0, 4, 9)
    assert np.allclose(np.diff(stats.wigner_cdf(z)), [integrate.quad(stats.wigner_density, a, b)[0]
                                                      for a, b in zip(z[:-1], z[1:])])


def test_unitary_surmise_normalized():
    assert integrate.quad(stats.unitary_surmise_density, 0, 10)[0] == pytest.approx(1, abs=1e-6)
    assert integrate.quad(lambda z: z * stats.unitary_surmise_density(z), 0, 10)[0] == pytest.approx(1, abs=1e-6)


def test_histogram_single_value():
    h = stats.histogram([0.5], [0.0, 2.0])
    assert h.densities == pytest.approx([0.5])


def test_histogram_uniform_phases():
    x = np.random.default_rng(1).uniform(0, 2 * math.pi, 1_000_000)
    h = stats.histogram(x, np.linspace(0, 2 * math.pi, 51))
    p = 1 / 50
    ci = 4 * math.sqrt(p * (1 - p) / 1e6)
    assert np.max(np.abs(h.masses - p)) < ci
    assert np.allclose(h.densities, 1 / (2 * math.pi), rtol=0.05)


def test_histogram_area_and_clamping():
    h = stats.histogram([-1.0, 0.1, 0.5, 3.0, 9.0], [0, 1, 2, 3])
    assert h.clamped == 3
    assert list(h.counts) == [3, 0, 2]
    assert abs((h.densities * h.widths).sum() - 1) <= 1e-12


@pytest.mark.parametrize("args", [([], [0, 1]), ([1], [0]), ([1], [1, 0])])
def test_histogram_rejects(args):
    with pytest.raises(DomainError):
        stats.histogram(*args)


def test_histogram_merge_and_text_roundtrip():
    e = np.linspace(0, 3, 31)
    rng = np.random.default_rng(2)
    a, b = stats.histogram(rng.rayleigh(size=500), e), stats.histogram(rng.rayleigh(size=700), e)
    m = a.merge(b)
    assert m.total == 1200
    with pytest.raises(DomainError):
        a.merge(stats.histogram([1.0], [0, 3]))
    edges, dens = Histogram.from_text(m.to_text())
    assert np.array_equal(edges, e)
    assert abs((dens * np.diff(edges)).sum() - 1) <= 1e-12
    assert m.to_text().splitlines()[-1].split()[1] == "0.0"


def test_ks_examples():
    assert stats.ks_uniform_phase([math.pi]) == pytest.approx(0.5)
    n = 100
    assert stats.ks_uniform_phase(2 * math.pi * np.arange(n) / n) <= 1 / n + 1e-12
    from scipy import stats as sps
    x = np.random.default_rng(3).uniform(0, 2 * math.pi, 1000)
    assert stats.ks_uniform_phase(x) == pytest.approx(sps.kstest(x / (2 * math.pi), "uniform").statistic)


def test_ks_uniform_pass_rate():
    rng = np.random.default_rng(4)
    n = 100_000
    passes = sum(stats.ks_uniform_phase(rng.uniform(0, 2 * math.pi, n)) < stats.ks_critical(n)
                 for _ in range(100))
    assert passes >= 98


def test_tv_examples():
    e = np.linspace(0, 3, 31)
    # inverse-CDF samples of the surmise itself
    u = np.random.default_rng(5).uniform(size=1_000_000)
    z = np.sqrt(-4 / math.pi * np.log1p(-u))
    h = stats.histogram(z, e)
    assert stats.tv_distance(h, cdf=stats.wigner_cdf) < 0.02
    assert stats.tv_distance(h, stats.wigner_density) == pytest.approx(stats.tv_distance(h, cdf=stats.wigner_cdf),
                                                                      abs=1e-9)
    far = stats.histogram(np.full(10, 5.5), [5, 6])
    assert stats.tv_distance(far, cdf=stats.wigner_cdf) == pytest.approx(1.0, abs=1e-6)


def test_periodicity_defect():
    flat = Histogram(np.linspace(0, 2 * math.pi, 11), np.full(10, 7))
    assert stats.periodicity_defect(flat, 5) == 0
    periodic = Histogram(np.linspace(0, 2 * math.pi, 11), np.array([1, 5] * 5))
    assert stats.periodicity_defect(periodic, 5) == 0
    delta = Histogram(np.linspace(0, 2 * math.pi, 11), np.array([9] + [0] * 9))
    assert stats.periodicity_defect(delta, 5) > 0
    with pytest.raises(DomainError):
        stats.periodicity_defect(flat, 3)


def test_atoms():
    assert stats.atom_mass([0.0, 0.0], 0.0, 1e-8) == 1
    assert stats.atom_mass([1.0, 2.0], math.pi, 1e-8) == 0
    assert stats.atom_mass([2 * math.pi - 1e-10], 0.0, 1e-8) == 1
    with pytest.raises(DomainError):
        stats.atom_mass([0.0], 0.0, 0.0)
    assert stats.has_atom(np.array([1j, -1 + 1e-9j]), -1, 1e-8)
    assert not stats.has_atom(np.array([1j]), 1, 1e-8)
