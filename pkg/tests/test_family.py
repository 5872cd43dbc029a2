"""Family engine tests: log-densities, derivative bundles, Fisher
information, Schur complements, and third-derivative functionals.

Expected values are either trivial identities, closed forms checked by
independent algebra inside the test, or oracle computations (explicit
sums over finite supports, finite differences of exact quantities).
"""

import numpy as np
import pytest

from priorforge import catalog
from priorforge import family as fam
from priorforge.errors import BoundaryError, DomainError


def theta(*vals):
    return np.asarray(vals, dtype=float)


class TestLogDensity:
    def test_bernoulli_symmetric_point(self):
        b = catalog.get_family("binomial", m=1)
        assert fam.log_density(b, 1, theta(0.5)) == pytest.approx(np.log(0.5))

    def test_normal_mode_value(self):
        nz = catalog.get_family("normal_known_var")
        assert fam.log_density(nz, 0.7, theta(0.7)) == pytest.approx(
            -0.5 * np.log(2 * np.pi)
        )

    def test_exponential_scale_direct_evaluation(self):
        # oracle: log(theta^-1 exp(-x/theta)) at theta = 2, x = 2
        e = catalog.get_family("exponential_scale")
        assert fam.log_density(e, 2.0, theta(2.0)) == pytest.approx(np.log(0.5) - 1.0)

    def test_discrete_mass_sums_to_one(self):
        b = catalog.get_family("binomial", m=4)
        xs = np.arange(5.0)
        total = np.exp(fam.log_density(b, xs, theta(0.37))).sum()
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_out_of_support_rejected(self):
        b = catalog.get_family("binomial", m=2)
        with pytest.raises(DomainError):
            fam.log_density(b, 3, theta(0.5))

    def test_boundary_parameter_rejected(self):
        b = catalog.get_family("binomial", m=1)
        with pytest.raises(BoundaryError):
            fam.log_density(b, 1, theta(1.0 - 1e-12))


class TestDerivatives:
    def test_gaussian_score(self):
        nz = catalog.get_family("normal_known_var")
        bundle = fam.derivatives(nz, 1.3, theta(0.2), order=1)
        assert bundle.values[1] == pytest.approx(1.3 - 0.2)
        assert bundle.method == "analytic"

    def test_bernoulli_second_derivative(self):
        # d^2/dp^2 log p = -1/p^2 at x = 1
        b = catalog.get_family("binomial", m=1)
        bundle = fam.derivatives(b, 1, theta(0.3), order=2)
        assert bundle.values[2] == pytest.approx(-1.0 / 0.09)

    def test_poisson_third_derivative(self):
        # d^3/dlam^3 (x log lam - lam) = 2 x / lam^3
        p = catalog.get_family("poisson")
        bundle = fam.derivatives(p, 5, theta(2.0), order=3)
        assert bundle.values[3] == pytest.approx(2 * 5 / 8.0)

    def test_finite_difference_error_estimates(self):
        # a family without analytic derivatives: halving the step should
        # change entries by less than 10x the reported error estimate
        g = catalog.get_family("gamma_mean")
        sub = catalog.FamilyModel(
            name="gamma_slice",
            space=catalog.ParameterSpace(((0.0, np.inf),)),
            observation_kind="continuous",
            support=g.support,
            log_density=lambda x, th: g.log_density(x, np.array([th[0], 2.0])),
            sampler=None,
            default_anchor=(1.0,),
        )
        from priorforge import derivatives as dv

        x = 1.7
        bundle = fam.derivatives(sub, x, theta(1.2), order=3)
        assert bundle.method == "finite-difference"
        for order in (1, 2, 3):
            h = dv.default_step(1.2, order)

            def f(t):
                return float(sub.log_density(x, np.array([t])))

            v_half, _ = dv.central_derivative(f, 1.2, order, h / 2)
            assert abs(v_half - bundle.values[order]) <= 10 * max(
                bundle.errors[order], 1e-12
            )


class TestFisherInformation:
    def test_bernoulli_exact_sum_oracle(self):
        # oracle: I(p) = sum_x f(x) * (dlogf)^2 over x in {0, 1}
        b = catalog.get_family("binomial", m=1)
        p = 0.37
        oracle = p * (1 / p) ** 2 + (1 - p) * (1 / (1 - p)) ** 2
        got = fam.fisher_information(b, theta(p))[0, 0]
        assert got == pytest.approx(oracle, rel=1e-12)
        assert got == pytest.approx(1.0 / (p * (1 - p)), rel=1e-12)

    def test_bvn_correlation_closed_form(self):
        b = catalog.get_family("bvn_rho")
        for r in (-0.6, 0.0, 0.4):
            got = fam.fisher_information(b, theta(r))[0, 0]
            assert got == pytest.approx((1 + r**2) / (1 - r**2) ** 2, rel=1e-12)

    def test_fieller_creasy_matrix(self):
        f = catalog.get_family("fieller_creasy")
        t, mu = 0.8, 1.4
        got = fam.fisher_information(f, theta(t, mu))
        np.testing.assert_allclose(
            got, [[mu**2, mu * t], [mu * t, 1 + t**2]], rtol=1e-12
        )

    @pytest.mark.parametrize(
        "fid, kwargs",
        [
            ("binomial", {"m": 3}),
            ("binomial_logit", {"m": 2}),
            ("poisson", {}),
            ("poisson_log", {}),
            ("normal_known_var", {}),
            ("normal_location_scale", {}),
            ("exponential_scale", {}),
            ("halfnormal_scale", {}),
            ("bvn_rho", {}),
            ("noncentrality", {}),
            ("noncentrality_orthogonal", {}),
            ("fieller_creasy", {}),
            ("fieller_creasy_orthogonal", {}),
            ("gamma_mean", {}),
            ("exp_family_expc", {}),
            ("logistic_location", {}),
            ("neyman_scott", {"n_cells": 3, "k": 2}),
        ],
    )
    def test_exact_fisher_matches_numeric(self, fid, kwargs):
        f = catalog.get_family(fid, **kwargs)
        if f.exact_fisher is None or not f.expectation_supported:
            pytest.skip("no closed form or no expectation engine")
        pts = f.grid(3)
        pts = np.atleast_2d(pts) if f.dim > 1 else pts[:, None]
        for row in pts[:: max(1, len(pts) // 4)]:
            exact = np.atleast_2d(np.asarray(f.exact_fisher(row), dtype=float))
            numeric = fam.fisher_information_numeric(f, row)
            np.testing.assert_allclose(numeric, exact, rtol=1e-5, atol=1e-9)

    def test_symmetry_and_positive_definite_on_grid(self):
        f = catalog.get_family("noncentrality")
        for row in np.atleast_2d(f.grid(3)):
            mat = fam.fisher_information(f, row)
            np.testing.assert_allclose(mat, mat.T, rtol=0, atol=0)
            assert np.all(np.linalg.eigvalsh(mat) > 0)


class TestSchurComplement:
    def test_noncentrality_closed_form(self):
        f = catalog.get_family("noncentrality")
        for t in (-1.0, 0.3, 1.2):
            got = fam.fisher_schur(f, theta(t, 1.7))
            assert got == pytest.approx(2.0 / (t**2 + 2.0), rel=1e-12)

    def test_orthogonalized_fieller_creasy_is_diagonal(self):
        f = catalog.get_family("fieller_creasy_orthogonal")
        t, phi = 0.6, 1.3
        mat = fam.fisher_information(f, theta(t, phi))
        np.testing.assert_allclose(
            mat, np.diag([phi**2 / (1 + t**2) ** 2, 1.0]), rtol=1e-12, atol=1e-12
        )

    def test_diagonal_matrix_schur_is_first_entry(self):
        f = catalog.get_family("fieller_creasy_orthogonal")
        t, phi = 0.6, 1.3
        mat = fam.fisher_information(f, theta(t, phi))
        assert fam.fisher_schur(f, theta(t, phi)) == pytest.approx(mat[0, 0], rel=1e-12)


class TestThirdDerivativeFunctionals:
    def test_canonical_exponential_family_g3_equals_iprime(self):
        # for canonical exponential families g3 = I', with I' here taken
        # by central differences of the information
        for fid in ("exp_family_expc", "binomial_logit", "poisson_log"):
            f = catalog.get_family(fid)
            for t in (-0.3, 0.2, 0.8):
                h = 1e-5 * max(1.0, abs(t))
                iprime = (
                    fam.fisher_information(f, theta(t + h))[0, 0]
                    - fam.fisher_information(f, theta(t - h))[0, 0]
                ) / (2 * h)
                assert fam.g3(f, theta(t)) == pytest.approx(iprime, rel=1e-4)

    def test_symmetric_location_family_g3_zero(self):
        f = catalog.get_family("logistic_location")
        assert fam.g3(f, theta(0.4)) == pytest.approx(0.0, abs=1e-9)

    def test_normal_g3_zero(self):
        f = catalog.get_family("normal_known_var")
        assert fam.g3(f, theta(1.1)) == 0.0

    def test_numeric_g3_matches_exact_for_exponential_scale(self):
        f = catalog.get_family("exponential_scale")
        stripped = catalog.replace(f, exact_g3=None)
        for t in (0.8, 2.5):
            assert fam.g3(stripped, theta(t)) == pytest.approx(
                -4.0 / t**3, rel=1e-6
            )


class TestScoreCube:
    def test_gaussian_zero(self):
        f = catalog.get_family("normal_known_var")
        assert fam.score_cube_expectation(f, theta(0.3)) == pytest.approx(0.0, abs=1e-12)

    def test_symmetric_location_zero(self):
        f = catalog.get_family("logistic_location")
        assert fam.score_cube_expectation(f, theta(0.9)) == pytest.approx(0.0, abs=1e-9)

    def test_bernoulli_half_zero_by_exact_sum(self):
        f = catalog.get_family("binomial", m=1)
        assert fam.score_cube_expectation(f, theta(0.5)) == pytest.approx(0.0, abs=1e-12)

    def test_third_bartlett_identity(self):
        # E[(dl)^3] = 3 I' - 2 g3 for smooth families; I' by central
        # differences of the exact information
        for fid, t in (("poisson", 1.7), ("exponential_scale", 1.3), ("bvn_rho", 0.45)):
            f = catalog.get_family(fid)
            h = 1e-5
            iprime = (
                fam.fisher_information(f, theta(t + h))[0, 0]
                - fam.fisher_information(f, theta(t - h))[0, 0]
            ) / (2 * h)
            lhs = fam.score_cube_expectation(f, theta(t))
            rhs = 3 * iprime - 2 * fam.g3(f, theta(t))
            assert lhs == pytest.approx(rhs, rel=2e-5, abs=1e-8)


class TestExpectationIdentities:
    @pytest.mark.parametrize(
        "fid",
        [
            "binomial",
            "poisson",
            "normal_known_var",
            "exponential_scale",
            "halfnormal_scale",
            "bvn_rho",
            "gamma_mean",
            "noncentrality",
            "fieller_creasy",
            "exp_family_expc",
            "logistic_location",
        ],
    )
    def test_score_and_information_identities(self, fid):
        f = catalog.get_family(fid)
        pts = f.grid(3)
        pts = np.atleast_2d(pts) if f.dim > 1 else pts[:, None]
        for row in pts[:: max(1, len(pts) // 3)]:
            i = f.interest_index
            mean_score = fam.score_moment(f, row, (i,))
            assert abs(mean_score) < 1e-8
            info = fam.fisher_information(f, row)[i, i]
            sq = fam.score_moment(f, row, (i, i))
            assert sq == pytest.approx(info, rel=1e-5)


class TestNeymanScottStatistics:
    def test_sampler_matches_statistic_distribution(self):
        f = catalog.get_family("neyman_scott", n_cells=4, k=3)
        th = np.array([0.5, -0.2, 1.0, 0.0, 1.44])
        rng = np.random.default_rng(7)
        draws = f.sampler(th, rng, size=4000)
        # cell means are unbiased for the cell parameters
        np.testing.assert_allclose(draws[:, :4].mean(axis=0), th[:4], atol=0.05)
        # W ~ v * chi2(n(k-1)): mean = v * n * (k-1)
        assert draws[:, 4].mean() == pytest.approx(1.44 * 4 * 2, rel=0.05)

    def test_loglik_matches_full_array_likelihood_shape(self):
        # statistic-based log-likelihood differences must equal the
        # full-array ones (they differ by an x-only constant)
        f = catalog.get_family("neyman_scott", n_cells=2, k=3)
        rng = np.random.default_rng(3)
        arr = rng.normal([[0.3], [1.0]], 0.9, size=(2, 3))
        xbar = arr.mean(axis=1)
        w = float(np.sum((arr - xbar[:, None]) ** 2))
        stat = np.concatenate([xbar, [w]])

        def full_loglik(th):
            means = np.asarray(th[:2])
            v = th[2]
            return float(
                -0.5 * arr.size * np.log(2 * np.pi * v)
                - np.sum((arr - means[:, None]) ** 2) / (2 * v)
            )

        th1 = np.array([0.2, 0.9, 1.2])
        th2 = np.array([0.5, 1.1, 0.7])
        got = fam.log_density(f, stat, th1) - fam.log_density(f, stat, th2)
        want = full_loglik(th1) - full_loglik(th2)
        assert got == pytest.approx(want, rel=1e-10)


class TestRandomEffectsStatistics:
    def test_likelihood_shape_matches_construction(self):
        # (Ybar, T, S) carry the (m, r, u) likelihood
        # r^{nk/2} u^{k/2} exp(-r/2 (nku(Ybar-m)^2 + uT + S))
        f = catalog.get_family("random_effects", k_groups=5, n_per=4)
        stat = np.array([0.3, 6.0, 11.0])
        m, r, u = 0.1, 1.3, 0.4

        def expected(th):
            m, r, u = th
            return (
                0.5 * 20 * np.log(r)
                + 0.5 * 5 * np.log(u)
                - 0.5 * r * (20 * u * (0.3 - m) ** 2 + u * 6.0 + 11.0)
            )

        got = fam.log_density(f, stat, theta(m, r, u))
        assert got == pytest.approx(expected((m, r, u)), rel=1e-12)

    def test_sampler_moments(self):
        f = catalog.get_family("random_effects", k_groups=6, n_per=3)
        th = theta(0.5, 2.0, 0.25)  # sigma^2 = 0.5, b = 1/(ru) = 2
        rng = np.random.default_rng(11)
        draws = f.sampler(th, rng, size=6000)
        assert draws[:, 0].mean() == pytest.approx(0.5, abs=0.02)
        assert draws[:, 1].mean() == pytest.approx(2.0 * 5, rel=0.05)  # b*(k-1)
        assert draws[:, 2].mean() == pytest.approx(0.5 * 12, rel=0.05)  # sigma^2*k(n-1)
