import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bandlab.errors import CapacityError, InvalidConfigError, RangeError
from bandlab.lattice import (
    FrequencyVector,
    SpectralBand,
    TorusConfig,
    band_norm_range,
    brute_force_band_oracle,
    count_ball,
    count_band,
    enumerate_band,
    shell_counts,
    shell_multiplicity,
    unit_ball_volume,
    weyl_remainder,
)


def test_torus_config_bounds():
    TorusConfig(2)
    TorusConfig(8)
    with pytest.raises(InvalidConfigError):
        TorusConfig(1)
    with pytest.raises(InvalidConfigError):
        TorusConfig(9)


def test_band_validation():
    SpectralBand(1.0, 1.0)
    with pytest.raises(InvalidConfigError):
        SpectralBand(0.5, 0.1)
    with pytest.raises(InvalidConfigError):
        SpectralBand(5.0, 0.0)
    with pytest.raises(InvalidConfigError):
        SpectralBand(5.0, 1.5)
    with pytest.raises(RangeError):
        SpectralBand(2e12, 0.5)


def test_band_norm_range_exact_boundaries():
    # lam = 5 exactly: m = 25 is included (half-open at the top end)
    assert band_norm_range(SpectralBand(5.0, 0.1)) == (25, 27)
    # 26.01 is not an integer, so m = 26 is the last member
    assert band_norm_range(SpectralBand(4.0, 1.0)) == (16, 25)
    # top endpoint hitting an exact square is excluded
    assert band_norm_range(SpectralBand(3.0, 1.0)) == (9, 16)


def test_known_count_two_dim():
    # |k|^2 in {25, 26} in Z^2: r2(25) = 12, r2(26) = 8
    cluster = enumerate_band(TorusConfig(2), SpectralBand(5.0, 0.1))
    assert cluster.N == 20
    assert all(25 <= f.norm_sq <= 26 for f in cluster.freqs)
    # lexicographic ordering
    assert list(cluster.freqs) == sorted(cluster.freqs, key=lambda f: f.k)


def test_frequency_vector_norm():
    f = FrequencyVector.of([3, -4])
    assert f.norm_sq == 25


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("lam", [5.0, 10.0, 20.0])
@pytest.mark.parametrize("eps", [0.01, 0.1, 0.5, 1.0])
def test_enumerate_matches_oracle(n, lam, eps):
    cfg = TorusConfig(n)
    band = SpectralBand(lam, eps)
    fast = enumerate_band(cfg, band)
    slow = brute_force_band_oracle(cfg, band)
    assert fast.freqs == slow.freqs
    assert count_band(cfg, band) == slow.N


def test_oracle_capacity_guard():
    with pytest.raises(CapacityError):
        brute_force_band_oracle(TorusConfig(3), SpectralBand(50.0, 0.5), cube_cap=1000)


def test_count_ball_small_values():
    cfg = TorusConfig(2)
    # r=0 -> origin only; r=1 -> origin + 4 neighbors; r=sqrt(2) -> +4 diagonals
    assert count_ball(cfg, 0.0) == 1
    assert count_ball(cfg, 1.0) == 5
    assert count_ball(cfg, 1.5) == 9
    assert count_ball(cfg, 2.0) == 13


def test_shell_multiplicity_known():
    cfg = TorusConfig(2)
    assert shell_multiplicity(cfg, 0) == 1
    assert shell_multiplicity(cfg, 1) == 4
    assert shell_multiplicity(cfg, 25) == 12
    assert shell_multiplicity(cfg, 3) == 0
    cfg3 = TorusConfig(3)
    assert shell_multiplicity(cfg3, 1) == 6
    assert shell_multiplicity(cfg3, 2) == 12


def test_shell_counts_consistency():
    cfg = TorusConfig(3)
    counts = shell_counts(cfg, 0, 50)
    assert counts.sum() == count_ball(cfg, math.sqrt(49))
    for m in (0, 1, 5, 49):
        assert counts[m] == shell_multiplicity(cfg, m)


def test_unit_ball_volume():
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_weyl_remainder_scale():
    cfg = TorusConfig(2)
    for r in (10.0, 100.0, 1000.0):
        assert abs(weyl_remainder(cfg, r)) < 10 * r


@settings(max_examples=40, deadline=None)
@given(
    lam=st.floats(min_value=1.0, max_value=60.0),
    eps=st.floats(min_value=0.01, max_value=1.0),
)
def test_count_matches_enumeration_size(lam, eps):
    cfg = TorusConfig(2)
    band = SpectralBand(lam, eps)
    assert count_band(cfg, band) == enumerate_band(cfg, band).N


@settings(max_examples=30, deadline=None)
@given(m=st.integers(min_value=0, max_value=400))
def test_shell_symmetry_under_negation(m):
    # multiplicity is invariant under k -> -k, so it is even unless m == 0
    cfg = TorusConfig(2)
    r = shell_multiplicity(cfg, m)
    assert r % 2 == 0 or m == 0


def test_empty_band():
    cfg = TorusConfig(2)
    band = SpectralBand(5.05, 0.04)  # (25.5, 25.9): no integers
    assert count_band(cfg, band) == 0
    assert enumerate_band(cfg, band).N == 0
    assert enumerate_band(cfg, band).frequency_array().shape == (0, 2)
