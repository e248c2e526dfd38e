#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace igabem;

TEST(Moments, DegreeZeroFarAbscissa) {
    BasisSpec B = make_open_basis(0, {0.0, 1.0});
    Eigen::VectorXd mu = modified_moments(B, 3.0);
    EXPECT_NEAR(mu[0], 3 * std::log(3.0) - 2 * std::log(2.0) - 1.0, 1e-15);
    EXPECT_NEAR(mu[0], 0.909543, 1e-6);
}

TEST(Moments, PartitionOfUnity) {
    for (int d = 0; d <= 5; ++d) {
        std::vector<double> br{-1.0, -0.6, -0.1, 0.25, 0.3, 0.8, 1.0};
        BasisSpec B = make_open_basis(d, br);
        const double a = -1.0, b = 1.0;
        for (double s : {-1.0, -0.6, -0.33, 0.0, 0.25, 0.9, 1.0, 1.7, -2.5}) {
            double sum = modified_moments(B, s).sum();
            auto xlx = [](double x) { return x == 0.0 ? 0.0 : x * std::log(std::abs(x)); };
            double ex = xlx(b - s) + xlx(s - a) - (b - a);
            EXPECT_NEAR(sum, ex, 1e-12) << "d=" << d << " s=" << s;
        }
    }
}

TEST(Moments, RandomPairsAgainstOracle) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int checked = 0;
    for (int d = 0; d <= 5; ++d) {
        std::vector<double> br{-1.0};
        for (int k = 0; k < 9; ++k) br.push_back(br.back() + 0.1 + U(rng) * 0.3);
        BasisSpec B = make_open_basis(d, br);
        std::uniform_real_distribution<double> S(B.a(), B.b());
        std::uniform_int_distribution<int> J(0, B.dim() - 1);
        for (int k = 0; k < 34; ++k) {
            const double s = (k % 5 == 0) ? br[1 + k % 8] : S(rng);  // every fifth abscissa on a knot
            const int j = J(rng);
            double v = modified_moments(B, s)[j];
            double ref = oracle::log_moment(B, j, s);
            ASSERT_NEAR(v, ref, 1e-10 * std::max(1e-3, std::abs(ref))) << "d=" << d << " j=" << j << " s=" << s;
            ++checked;
        }
    }
    EXPECT_GE(checked, 200);
}

TEST(Moments, FineMeshesStayAccurate) {
    for (int d : {3, 5}) {
        std::vector<double> br;
        const int nh = 100;
        for (int k = 0; k <= nh; ++k) br.push_back(-1.0 + 2.0 * k / nh);
        BasisSpec B = make_open_basis(d, br);
        for (double s : {-0.987, 0.0, 0.5123}) {
            Eigen::VectorXd mu = modified_moments(B, s);
            for (int j : {0, 7, 50, B.dim() - 1}) {
                double ref = oracle::log_moment(B, j, s);
                EXPECT_NEAR(mu[j], ref, 1e-10 * std::abs(ref)) << "d=" << d << " j=" << j;
            }
        }
    }
}

TEST(Moments, PeriodicKernelAgainstOracle) {
    std::vector<double> br;
    for (int k = 0; k <= 12; ++k) br.push_back(-1.0 + 2.0 * k / 12);
    BasisSpec B = make_cyclic_basis(3, br);
    const double L = 2.0;
    LogKernel lk{L};
    for (double s : {-1.0, -0.43, 0.0, 0.91}) {
        Eigen::VectorXd mu = log_moments(B, s, lk);
        for (int j = 0; j < B.dim(); ++j) {
            std::vector<double> cuts(br.begin(), br.end());
            cuts.push_back(s);
            double ref = oracle::integrate_log(
                [&](double t) {
                    double p = std::abs(L / std::numbers::pi * std::sin(std::numbers::pi * (t - s) / L));
                    return p == 0.0 ? 0.0 : std::log(p) * eval_function(B, j, t);
                },
                -1.0, 1.0, cuts);
            EXPECT_NEAR(mu[j], ref, 1e-11) << "s=" << s << " j=" << j;
        }
    }
}

TEST(Moments, MonomialClosedForm) {
    for (int k = 0; k <= 6; ++k)
        for (double s : {-1.0, -0.2, 0.5, 1.0, 2.0}) {
            double ref = oracle::integrate_log(
                [&](double t) { return t == s ? 0.0 : std::log(std::abs(t - s)) * std::pow(t, k); }, -1.0, 1.0, {s});
            // the binomial expansion in s loses digits as (1 + |s|)^k once s leaves the interval
            const double tol = std::abs(s) <= 1.0 ? 1e-13 : 4e-15 * std::pow(1.0 + std::abs(s), k + 1);
            EXPECT_NEAR(log_moment_monomial(k, -1.0, 1.0, s), ref, tol) << "k=" << k << " s=" << s;
        }
}
