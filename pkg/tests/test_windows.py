import mpmath
import numpy as np
import pytest

from modereg.model import Dataset
from modereg.windows import (
    chebyshev_rule,
    empirical_rule,
    kemp_bandwidth,
    sigma_prior_interval,
    silverman_rule,
)

mpmath.mp.dps = 30
SILVERMAN_100 = float(mpmath.mpf("1.3643") * mpmath.mpf("1.3510") * mpmath.power(100, mpmath.mpf("-0.2")))
KEMP_250 = float(mpmath.mpf("1.6") * mpmath.power(250, mpmath.mpf("-0.143")))


def test_oracle_values():
    assert SILVERMAN_100 == pytest.approx(0.7338, abs=1e-4)
    assert KEMP_250 == pytest.approx(0.72646, abs=1e-5)


class TestSimpleRules:
    def test_empirical(self):
        assert empirical_rule(1.5) == 4.5
        assert empirical_rule(1.0) == 3.0

    def test_chebyshev(self):
        assert chebyshev_rule(2.0) == 8.0
        assert chebyshev_rule(1.0) == 4.0

    @pytest.mark.parametrize("s", [0.01, 0.7, 3.0, 100.0])
    def test_ordering_and_homogeneity(self, s):
        assert chebyshev_rule(s) > empirical_rule(s)
        assert empirical_rule(2.5 * s) == pytest.approx(2.5 * empirical_rule(s))

    @pytest.mark.parametrize("rule", [empirical_rule, chebyshev_rule])
    def test_domain(self, rule):
        with pytest.raises(ValueError):
            rule(0.0)


class TestSilverman:
    def test_iqr_path(self):
        assert silverman_rule(100, 1.0, iqr=1.349) == pytest.approx(SILVERMAN_100, rel=1e-12)

    def test_mad_path(self):
        assert silverman_rule(100, 1.0, mad=1 / 1.4826) == pytest.approx(SILVERMAN_100, rel=1e-12)

    def test_decreasing_in_n(self):
        vals = [silverman_rule(n, 1.0, iqr=1.0) for n in (2, 10, 100, 1000)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_homogeneous(self):
        a = silverman_rule(50, 1.2, iqr=1.1)
        assert silverman_rule(50, 3 * 1.2, iqr=3 * 1.1) == pytest.approx(3 * a)

    def test_needs_spread(self):
        with pytest.raises(ValueError):
            silverman_rule(100, 1.0)


class TestKemp:
    def test_value(self):
        assert kemp_bandwidth(1.6, 1.0, 250) == pytest.approx(KEMP_250, rel=1e-12)

    def test_linear_in_k(self):
        assert kemp_bandwidth(0.8, 0.7, 250) == pytest.approx(kemp_bandwidth(1.6, 0.7, 250) / 2)

    def test_zero_mad(self):
        assert kemp_bandwidth(1.6, 0.0, 250) == 0.0


def residual_dataset(resid):
    """Intercept-only data whose OLS residuals equal ``resid`` (mean zero)."""
    resid = np.asarray(resid, dtype=float)
    resid = resid - resid.mean()
    return Dataset(5.0 + resid, np.ones((resid.size, 1)))


class TestInterval:
    def test_defaults(self):
        from modereg.special import robust_scales

        d = residual_dataset(np.random.default_rng(0).standard_normal(100))
        s = robust_scales(d.y - d.y.mean())
        w1, w2 = sigma_prior_interval(d)
        assert w1 == pytest.approx(silverman_rule(100, s["sd"], iqr=s["iqr"]))
        assert w2 == pytest.approx(4 * s["sd"])
        assert 0 < w1 < w2

    def test_unit_sd_composition(self):
        # sd = 1 and iqr >= 1.349 make the silverman endpoint the oracle value
        rng = np.random.default_rng(1)
        r = rng.standard_normal(100)
        r = (r - r.mean()) / r.std(ddof=1)
        from modereg.special import robust_scales

        s = robust_scales(r)
        d = residual_dataset(r)
        w1, w2 = sigma_prior_interval(d)
        assert w2 == pytest.approx(4.0)
        assert w1 == pytest.approx(SILVERMAN_100 * min(1.0, s["iqr"] / 1.349))

    def test_empirical_chebyshev(self):
        r = np.random.default_rng(2).standard_normal(60)
        r = (r - r.mean()) / r.std(ddof=1)
        assert sigma_prior_interval(residual_dataset(r), "empirical", "chebyshev") == pytest.approx((3.0, 4.0))

    def test_identical_rules(self):
        r = np.random.default_rng(3).standard_normal(60)
        with pytest.raises(ValueError, match="different rule pair"):
            sigma_prior_interval(residual_dataset(r), "chebyshev", "chebyshev")

    def test_response_source(self):
        x = np.linspace(-1, 1, 50)
        d = Dataset.from_arrays(10 * x + 0.01 * np.sin(40 * x), x)
        lo_res, _ = sigma_prior_interval(d, "empirical", "chebyshev")
        lo_y, _ = sigma_prior_interval(d, "empirical", "chebyshev", source="response")
        assert lo_y > 100 * lo_res
