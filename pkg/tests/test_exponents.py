import math

import pytest

from bandlab.errors import DomainError
from bandlab.exponents import (
    ExponentProfile,
    alpha,
    corollary_rhs,
    critical_p,
    eps_power,
    profile_table,
    shrink_rate,
    sigma,
)


def test_critical_p():
    assert critical_p(2) == 6.0
    assert critical_p(3) == 4.0


def test_sigma_values():
    assert sigma(5, 2.0) == 0.0
    assert sigma(3, math.inf) == pytest.approx(1.0)
    # both branches at the critical point
    assert sigma(2, 6.0) == pytest.approx(1.0 / 6.0)
    with pytest.raises(DomainError):
        sigma(2, 1.5)


def test_alpha_values():
    assert alpha(4, 2.0) == pytest.approx(1.0)
    assert alpha(2, 6.0) == pytest.approx(1.5)
    assert alpha(2, 12.0) == pytest.approx(3.0)
    assert math.isinf(alpha(2, math.inf))


def test_branch_continuity_exact():
    for n in range(2, 9):
        pc = critical_p(n)
        low_sigma = (n - 1) / 2 * (0.5 - 1.0 / pc)
        high_sigma = n * (0.5 - 1.0 / pc) - 0.5
        assert abs(low_sigma - high_sigma) <= 1e-14
        low_alpha = 2 * pc / (pc + 2)
        high_alpha = pc * (n - 1) / (2 * n)
        assert abs(low_alpha - high_alpha) <= 1e-14


def test_alpha_monotone_in_p():
    for n in (2, 3, 5):
        ps = [2.0, 3.0, 4.0, 6.0, 10.0, 50.0]
        vals = [alpha(n, p) for p in ps]
        assert all(a < b for a, b in zip(vals, vals[1:]))


def test_eps_power_endpoints():
    for n in (2, 3, 4):
        assert eps_power(n, critical_p(n)) == pytest.approx(0.0)
        assert eps_power(n, math.inf) == 1.0
    with pytest.raises(DomainError):
        eps_power(2, 4.0)


def test_shrink_rate():
    assert shrink_rate(2, 1000.0) == pytest.approx(0.1)
    assert shrink_rate(4, 1.0) == 1.0
    assert shrink_rate(3, 16.0) == pytest.approx(0.25)


def test_corollary_rhs_recovers_unit_band_bound():
    # p = inf: dim dependence drops and the RHS is lam^(n-1) eps
    for n in (2, 3):
        val = corollary_rhs(n, math.inf, 100.0, 0.25, 17)
        assert val == pytest.approx(100.0 ** (n - 1) * 0.25)


def test_corollary_rhs_arithmetic():
    # n=2, p=12: 2 sigma = 2 (2 (1/2 - 1/12) - 1/2) = 2/3
    val = corollary_rhs(2, 12.0, 100.0, 0.1, 10)
    expected = 100.0 ** (2.0 / 3.0) * 0.1**0.5 * 10.0 ** (1.0 / 3.0)
    assert val == pytest.approx(expected, rel=1e-12)
    with pytest.raises(DomainError):
        corollary_rhs(2, 4.0, 100.0, 0.1, 10)
    with pytest.raises(DomainError):
        corollary_rhs(2, 12.0, 100.0, 0.1, 0)


def test_corollary_rhs_monotone_in_p():
    vals = [corollary_rhs(2, p, 50.0, 0.3, 5) for p in (6.0, 8.0, 12.0, 40.0, math.inf)]
    diffs = [b - a for a, b in zip(vals, vals[1:])]
    assert all(d > 0 for d in diffs) or all(d < 0 for d in diffs)


def test_profile_table():
    rows = profile_table(2)
    assert any(math.isinf(r.p) for r in rows)
    crit = [r for r in rows if r.p == 6.0][0]
    assert crit.sigma == pytest.approx(1.0 / 6.0)
    assert crit.alpha == pytest.approx(1.5)
    assert crit.eps_power == pytest.approx(0.0)
    sub = [r for r in rows if r.p == 4.0][0]
    assert sub.eps_power is None


def test_profile_of():
    prof = ExponentProfile.of(3, math.inf)
    assert prof.sigma == pytest.approx(1.0)
    assert prof.eps_power == 1.0
    assert prof.critical_p == 4.0
