#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "explf/test_function.hpp"

using namespace explf;

// 2 (u * u)(x) with u(t) = cos(pi t) on |t| <= 1/2, by direct quadrature.
static double g_convolution(double x) {
    constexpr double pi = std::numbers::pi;
    double lo = std::max(-0.5, x - 0.5), hi = std::min(0.5, x + 0.5);
    if (hi <= lo) return 0.0;
    auto f = [&](double t) { return std::cos(pi * t) * std::cos(pi * (x - t)); };
    return 2 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-14);
}

TEST(TestFunction, ClosedFormMatchesConvolution) {
    for (int i = -130; i <= 130; ++i) {
        double x = i / 100.0;
        EXPECT_NEAR(g(x), g_convolution(x), 1e-8) << "x=" << x;
    }
    EXPECT_DOUBLE_EQ(g(0), 1.0);
}

TEST(TestFunction, EvenAndSupported) {
    Odlyzko F(3.0);
    for (double x : {0.1, 0.7, 1.9, 2.99}) EXPECT_DOUBLE_EQ(F(x), F(-x));
    EXPECT_EQ(F(3.0), 0.0);
    EXPECT_EQ(F(4.5), 0.0);
    EXPECT_THROW(Odlyzko(0.0), std::invalid_argument);
}

TEST(TestFunction, PhiFunctionalEquation) {
    for (double l : {1.0, 2.5, 6.0, 12.0}) {
        Odlyzko F(l);
        for (double re : {-0.5, 0.0, 0.2, 0.5, 1.3})
            for (double im : {0.0, 0.7, 3.0}) {
                cplx s(re, im);
                cplx a = phi(F, s), b = phi(F, 1.0 - s);
                EXPECT_NEAR(std::abs(a - b), 0.0, 1e-9 * std::max(1.0, std::abs(a)));
            }
    }
}

TEST(TestFunction, PhiNonNegativeOnStrip) {
    for (double l : {1.0, 3.0, 8.0}) {
        Odlyzko F(l);
        for (int i = 0; i <= 10; ++i)
            for (int k = 0; k <= 20; ++k) {
                cplx s(i / 10.0, k * 1.5);
                EXPECT_GE(phi(F, s).real(), -1e-12) << "lambda=" << l << " s=" << s;
            }
    }
}

TEST(TestFunction, PhiCachedAgrees) {
    Odlyzko F(2.0);
    EXPECT_DOUBLE_EQ(phi_cached(2.0, 0.5), phi(F, 0.5));
    EXPECT_DOUBLE_EQ(phi_cached(2.0, 0.5), phi_cached(2.0, 0.5));
}

TEST(TestFunction, PrimeWeights) {
    Odlyzko F(5.0);
    auto pw = prime_weights(F, 2);
    ASSERT_EQ(pw.size(), 7u);  // k log 2 < 5
    for (auto [k, w] : pw) EXPECT_NEAR(w, F(k * std::log(2.0)) * std::log(2.0) / std::pow(2.0, k / 2.0), 1e-15);
    double sum = 0, alt = 0;
    for (auto [k, w] : pw) {
        sum += w;
        alt += k % 2 ? -w : w;
    }
    EXPECT_NEAR(theta(F, 2, cplx(1, 0)), sum, 1e-14);
    EXPECT_NEAR(theta(F, 2, cplx(-1, 0)), alt, 1e-14);
}
