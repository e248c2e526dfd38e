#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace igabem;

namespace {

std::vector<double> uniform_breaks(double a, double b, int n) {
    std::vector<double> br(n + 1);
    for (int k = 0; k <= n; ++k) br[k] = a + (b - a) * k / n;
    br.back() = b;
    return br;
}

std::vector<BasisSpec> test_bases() {
    return {
        make_open_basis(2, {-1.0, 1.0}),
        make_open_basis(3, uniform_breaks(0.0, 1.0, 10)),
        make_open_basis(5, {-1.0, -0.3, 0.1, 0.2, 0.9, 1.0}),
        make_open_basis(3, {0.0, 0.5, 1.0, 2.0}, {4, 2, 3, 4}),
        make_cyclic_basis(3, uniform_breaks(-1.0, 1.0, 12)),
        make_cyclic_basis(2, {0.0, 0.3, 0.4, 1.0, 1.7, 2.0}),
        make_cyclic_basis(3, uniform_breaks(-1.0, 1.0, 8), {2, 1, 2, 1, 2, 1, 2, 1, 2}),
    };
}

}  // namespace

TEST(Splines, ParabolaBasisMidpointIsBernstein) {
    BasisSpec B = make_open_basis(2, {-1.0, 1.0});
    auto v = eval_basis(B, 0.0);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_NEAR(v[0].second, 0.25, 1e-15);
    EXPECT_NEAR(v[1].second, 0.5, 1e-15);
    EXPECT_NEAR(v[2].second, 0.25, 1e-15);
}

TEST(Splines, PartitionOfUnityAndDerivativeSum) {
    std::mt19937_64 rng(7);
    for (const auto& B : test_bases()) {
        std::uniform_real_distribution<double> U(B.a(), B.b());
        for (int k = 0; k < 10000; ++k) {
            const double s = U(rng);
            double s0 = 0.0, s1 = 0.0, s2 = 0.0;
            for (auto [i, v] : eval_basis(B, s, 0)) s0 += v;
            for (auto [i, v] : eval_basis(B, s, 1)) s1 += v;
            for (auto [i, v] : eval_basis(B, s, 2)) s2 += v;
            ASSERT_NEAR(s0, 1.0, 1e-13);
            ASSERT_NEAR(s1, 0.0, 1e-13 * B.num_elements() / B.length() * 10);
            ASSERT_NEAR(s2, 0.0, 1e-10 * std::pow(B.num_elements() / B.length(), 2));
        }
    }
}

TEST(Splines, AtMostDegreePlusOneNonzeros) {
    for (const auto& B : test_bases())
        for (int k = 0; k <= 100; ++k) {
            double s = B.a() + B.length() * k / 100;
            EXPECT_LE(static_cast<int>(eval_basis(B, s).size()), B.degree + 1);
        }
}

TEST(Splines, MatchesTruncatedPowerOracle) {
    BasisSpec B = make_open_basis(3, uniform_breaks(0.0, 1.0, 10));
    auto check = [&](double s) {
        std::vector<double> val(B.dim(), 0.0);
        for (auto [i, v] : eval_basis(B, s)) val[i] = v;
        for (int i = 0; i < B.dim(); ++i)
            ASSERT_NEAR(val[i], oracle::truncated_power_bspline(B.knots, i, 3, s), 1e-12) << "i=" << i << " s=" << s;
    };
    check(0.37);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) check(U(rng));
}

TEST(Splines, OutsideDomainThrows) {
    BasisSpec B = make_open_basis(2, {-1.0, 1.0});
    EXPECT_THROW(eval_basis(B, 1.5), DomainError);
    EXPECT_THROW(eval_basis(B, -1.0 - 1e-9), DomainError);
}

TEST(Splines, OpenKnotVectorT1) {
    BasisSpec B = make_open_basis(2, {-1.0, 1.0});
    EXPECT_EQ(B.knots, (std::vector<double>{-1, -1, -1, 1, 1, 1}));
    EXPECT_EQ(B.dim(), 3);
}

TEST(Splines, LinearHatPair) {
    BasisSpec B = make_open_basis(1, {0.0, 1.0});
    EXPECT_EQ(B.dim(), 2);
    auto v = eval_basis(B, 0.25);
    EXPECT_NEAR(v[0].second, 0.75, 1e-15);
    EXPECT_NEAR(v[1].second, 0.25, 1e-15);
}

TEST(Splines, CyclicCubicDimensionEqualsElementCount) {
    std::vector<double> br;
    for (int k = 0; k <= 18; ++k) br.push_back(-1.5 + k / 6.0);
    BasisSpec B = make_cyclic_basis(3, br);
    EXPECT_EQ(B.num_elements(), 18);
    EXPECT_EQ(B.dim(), 18);
    EXPECT_EQ(B.num_raw() - B.degree, B.dim());
}

TEST(Splines, InconsistentMultiplicitiesRejected) {
    EXPECT_THROW(make_open_basis(2, {0.0, 0.5, 1.0}, {3, 3, 3}), ConstructionError);
    EXPECT_THROW(make_open_basis(2, {0.0, 0.5, 1.0}, {3, 1}), ConstructionError);
    EXPECT_THROW(make_open_basis(2, {0.0}), ConstructionError);
    EXPECT_THROW(make_open_basis(2, {1.0, 0.0}), ConstructionError);
    EXPECT_THROW(make_cyclic_basis(3, {0.0, 0.5, 1.0}, {1, 4, 1}), ConstructionError);
}

TEST(Splines, CyclicEvaluationIsPeriodic) {
    for (const auto& B : test_bases()) {
        if (!B.closed) continue;
        // derivatives up to the continuity order at the seam
        const int smooth = B.degree - B.mult.front();
        for (int deriv = 0; deriv <= std::min(2, smooth); ++deriv)
            for (int i = 0; i < B.dim(); ++i) {
                double at_a = eval_function(B, i, B.a(), deriv);
                double at_b = eval_function(B, i, std::nextafter(B.b(), B.a()), deriv);
                EXPECT_NEAR(at_a, at_b, deriv == 0 ? 1e-13 : 1e-9) << "i=" << i << " deriv=" << deriv;
            }
    }
}

TEST(Splines, RefineIdentity) {
    BasisSpec B = make_open_basis(3, uniform_breaks(0.0, 1.0, 5));
    RefinedBasis R = refine_uniform(B, 1);
    EXPECT_TRUE(R.fine == B);
}

TEST(Splines, RefineSplitsElements) {
    RefinedBasis R = refine_uniform(make_open_basis(2, {-1.0, 0.0, 1.0}), 2);
    EXPECT_EQ(R.fine.breaks, (std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0}));
    EXPECT_EQ(R.fine.mult, (std::vector<int>{3, 1, 1, 1, 3}));
}

TEST(Splines, ParentReproducedInRefinedSpan) {
    for (const auto& B : test_bases())
        for (int nref : {2, 3}) {
            RefinedBasis R = refine_uniform(B, nref);
            const int m = 40 * R.fine.num_elements();
            Eigen::MatrixXd C(m, R.fine.dim());
            Eigen::MatrixXd P(m, B.dim());
            C.setZero();
            P.setZero();
            for (int k = 0; k < m; ++k) {
                double s = B.a() + B.length() * (k + 0.5) / m;
                for (auto [j, v] : eval_basis(R.fine, s)) C(k, j) = v;
                for (auto [i, v] : eval_basis(B, s)) P(k, i) = v;
            }
            Eigen::MatrixXd X = C.colPivHouseholderQr().solve(P);
            EXPECT_LE((C * X - P).cwiseAbs().maxCoeff(), 1e-12);
        }
}

TEST(Splines, ProductIntegralBasics) {
    BasisSpec B = make_open_basis(2, uniform_breaks(-1.0, 1.0, 10));
    EXPECT_EQ(product_integral(B, 0, B, 8), 0.0);
    for (int i = 0; i < B.dim(); ++i) {
        EXPECT_GT(product_integral(B, i, B, i), 0.0);
        for (int j = 0; j < B.dim(); ++j) EXPECT_NEAR(product_integral(B, i, B, j), product_integral(B, j, B, i), 1e-16);
    }
}

TEST(Splines, ProductIntegralT1AgainstOracle) {
    BasisSpec B = make_open_basis(2, {-1.0, 1.0});
    double ref = oracle::integrate([&](double s) { return eval_function(B, 0, s) * eval_function(B, 1, s); }, -1, 1);
    EXPECT_NEAR(product_integral(B, 0, B, 1), ref, 1e-13);
}

TEST(Splines, ProductIntegralRandomBasesAgainstOracle) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int d = 0; d <= 5; ++d)
        for (bool closed : {false, true}) {
            if (closed && d == 0) continue;
            std::vector<double> br{0.0};
            for (int k = 0; k < 7; ++k) br.push_back(br.back() + 0.2 + U(rng));
            BasisSpec B = closed ? make_cyclic_basis(d, br) : make_open_basis(d, br);
            RefinedBasis R = refine_uniform(B, 2);
            for (int i = 0; i < B.dim(); ++i)
                for (int j : overlapping_functions(R.fine, B, i)) {
                    double ref = oracle::integrate(
                        [&](double s) { return eval_function(R.fine, j, s) * eval_function(B, i, s); }, B.a(), B.b(),
                        R.fine.breaks);
                    double v = product_integral(R.fine, j, B, i);
                    ASSERT_NEAR(v, ref, 1e-12 * std::abs(ref)) << "d=" << d << " i=" << i << " j=" << j;
                }
        }
}

TEST(Splines, SupportsAndActiveSets) {
    BasisSpec T1 = make_open_basis(2, {-1.0, 1.0});
    auto s = support(T1, 0);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].lo, -1.0);
    EXPECT_EQ(s[0].hi, 1.0);

    BasisSpec B = make_open_basis(2, uniform_breaks(-1.0, 1.0, 10));
    for (int i = 2; i < B.dim() - 2; ++i) {
        auto si = support(B, i);
        ASSERT_EQ(si.size(), 1u);
        EXPECT_NEAR(si[0].length(), 3 * 0.2, 1e-14);
    }
    EXPECT_THROW(support(B, B.dim()), DomainError);

    for (int d = 1; d <= 5; ++d)
        for (int nref : {1, 2, 3}) {
            BasisSpec P = make_open_basis(d, uniform_breaks(-1.0, 1.0, 12));
            RefinedBasis R = refine_uniform(P, nref);
            for (int i = 0; i < P.dim(); ++i)
                EXPECT_LE(static_cast<int>(overlapping_functions(R.fine, P, i).size()), (1 + nref) * (d + 1));
        }
}

TEST(Splines, CyclicWrapFunctionHasTwoArcs) {
    BasisSpec B = make_cyclic_basis(3, uniform_breaks(-1.0, 1.0, 12));
    EXPECT_EQ(support(B, 0).size(), 2u);
    EXPECT_EQ(support(B, B.degree).size(), 1u);
}
