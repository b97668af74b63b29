#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "explf/archimedean.hpp"

using namespace explf;

// I(a,a') with the raw integrand and a different quadrature rule.
static double i_integral_oracle(const Odlyzko& F, double a, double ap) {
    double b = a / 2 + ap, top = F.lambda / a;
    auto h = [&](double y) {
        if (y < 1e-7) return 1.5 - b;
        return F(a * y) * std::exp(-b * y) / (-std::expm1(-y)) - std::exp(-y) / y;
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(h, 0.0, top, 1e-12) - boost::math::expint(1, top);
}

TEST(Archimedean, IIntegralMatchesOracle) {
    for (double l : {std::log(2.0), 1.0, 2.0, 5.5, 12.0}) {
        Odlyzko F(l);
        for (auto [a, ap] : std::vector<std::pair<double, double>>{{0.5, 0.0}, {0.5, 0.5}, {1.0, 0.5}, {1.0, 3.5}, {1.0, 10.0}})
            EXPECT_NEAR(i_integral(F, a, ap), i_integral_oracle(F, a, ap), 1e-9) << l << " " << a << " " << ap;
    }
    EXPECT_THROW(i_integral(Odlyzko(1.0), 0.0, 1.0), std::invalid_argument);
}

TEST(Archimedean, TaylorBranchIsContinuous) {
    Odlyzko F(3.0);
    for (double b : {0.25, 1.0, 6.0}) {
        double y = kTaylorCut;
        double exact = F(y) * std::exp(-b * y) / (-std::expm1(-y)) - std::exp(-y) / y;
        EXPECT_NEAR(i_integrand_taylor(F.lambda, 1.0, b, y), exact, 1e-9);
    }
}

// Gamma_R(s) Gamma_R(s+1) = Gamma_C(s): J(1) + J(eps) = J(I_0).
TEST(Archimedean, DuplicationIdentity) {
    for (double l : {std::log(2.0), 1.0, 4.0, 9.0}) {
        JTable T{Odlyzko(l), 4};
        double i0 = std::log(2 * std::numbers::pi) + gamma_term(Odlyzko(l), 1.0, 0.0);
        EXPECT_NEAR(T.j_triv() + T.j_eps(), i0, 1e-9);
        EXPECT_DOUBLE_EQ(T.j(KElement::ind(0)), T.j_triv() + T.j_eps());
    }
}

TEST(Archimedean, JTableLog2Odd) {
    const JTable& T = JCache::get(std::log(2.0), 24);
    const double expect[] = {0.848, 0.611, 0.408, 0.230, 0.074, -0.065};
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(T.j_ind(2 * i + 1), expect[i], 2e-3) << "I" << 2 * i + 1;
    EXPECT_NEAR(T.j_ind(13), -0.189, 2e-3);
}

TEST(Archimedean, JTableLog2Even) {
    const JTable& T = JCache::get(std::log(2.0), 24);
    const double expect[] = {0.560, 0.421, 0.725, 0.506, 0.316, 0.150, 0.003, -0.129};
    EXPECT_NEAR(T.j_triv(), expect[0], 2e-3);
    EXPECT_NEAR(T.j_eps(), expect[1], 2e-3);
    for (int i = 1; i <= 6; ++i) EXPECT_NEAR(T.j_ind(2 * i), expect[i + 1], 2e-3) << "I" << 2 * i;
}

TEST(Archimedean, JIsAdditiveAndDecreasing) {
    const JTable& T = JCache::get(2.0, 40);
    KElement a = KElement::parse("I17+I5"), b = KElement::parse("I9+eps");
    EXPECT_NEAR(T.j(a + b), T.j(a) + T.j(b), 1e-12);
    for (int w = 1; w < 40; ++w) EXPECT_LT(T.j_ind(w + 1), T.j_ind(w));
    EXPECT_NEAR(T.b(a, b), T.j(tensor(a, b)), 1e-12);
    EXPECT_THROW(T.j_ind(1000), std::out_of_range);
}

TEST(Archimedean, EpsilonInfinity) {
    EXPECT_EQ(eps_infinity(KElement::ind(13)).value_real(), -1);
    EXPECT_EQ(eps_infinity(KElement::ind(11)).value_real(), 1);
    EXPECT_EQ(eps_infinity(KElement::ind(19) + KElement::ind(7)).value_real(), 1);
    EXPECT_FALSE(eps_infinity(KElement::ind(12)).is_real());
    EXPECT_EQ(eps_infinity(KElement::triv()).value_real(), 1);
    EXPECT_THROW(eps_infinity(KElement::ind(3, -1)), std::invalid_argument);
}
