#include <gtest/gtest.h>

#include "explf/registry.hpp"

using namespace explf;

namespace {

RepRecord shape(int n, bool ramified, int sign = 0) {
    RepRecord r;
    r.name = "x";
    r.rank = n;
    r.conductor = ramified ? 2 : 1;
    r.local_sign = ramified ? sign : 0;
    return r;
}

// Type (I) with the unramified characters trivial, so every piece carries a Frobenius sign.
WDRep type_I_trivial(int n, int psi) {
    WDRep r = unramified_rep(n - 2, 1);
    r.pieces.push_back({0, 1, 2, psi});
    return r;
}

}  // namespace

TEST(WeilDeligne, PairExponentMatchesTensorOracle) {
    for (int n = 1; n <= 20; ++n)
        for (int m = 1; m <= 20; ++m)
            for (int ra = 0; ra < 2; ++ra)
                for (int rb = 0; rb < 2; ++rb) {
                    if ((ra && n < 2) || (rb && m < 2)) continue;
                    RepRecord a = shape(n, ra), b = shape(m, rb);
                    WDRep pa = a.local_parameter(2), pb = b.local_parameter(2);
                    int e = pair_exponent(a, b, 2);
                    EXPECT_EQ(e, tensor_exponent(pa, pb)) << n << " " << m << " " << ra << rb;
                    EXPECT_LE(e, henniart_bound(awd(pa), n, awd(pb), m)) << n << " " << m;
                }
}

TEST(WeilDeligne, ArtinExponents) {
    EXPECT_EQ(awd(unramified_rep(5)), 0);
    EXPECT_EQ(awd(type_I_rep(6, 1)), 1);
    EXPECT_EQ(awd(WDPiece{0, 1, 4, std::nullopt}), 3);
    EXPECT_EQ(awd(WDPiece{3, 2, 2, std::nullopt}), 6);
    EXPECT_THROW(awd(WDPiece{0, 2, 1, std::nullopt}), std::invalid_argument);
    EXPECT_THROW(type_I_rep(1, 1), std::invalid_argument);
}

TEST(WeilDeligne, ClebschGordan) {
    for (int d = 1; d <= 8; ++d)
        for (int e = 1; e <= 8; ++e) {
            int tot = 0;
            for (int f : clebsch_gordan(d, e)) tot += f;
            EXPECT_EQ(tot, d * e);
        }
    EXPECT_EQ(clebsch_gordan(2, 2), (std::vector<int>{1, 3}));
}

// The closed form for pairs agrees with the sign of the tensor product.
TEST(WeilDeligne, PairEpsilonMatchesTensor) {
    for (int n = 2; n <= 10; ++n)
        for (int m = 1; m <= 10; ++m)
            for (int s1 : {1, -1})
                for (int s2 : {1, -1}) {
                    WDRep a = type_I_trivial(n, s1), u = unramified_rep(m, 1);
                    EXPECT_EQ(pair_epsilon_sign(u, a), epsilon_sign(tensor(u, a))) << n << " " << m;
                    if (m >= 2) {
                        WDRep b = type_I_trivial(m, s2);
                        EXPECT_EQ(pair_epsilon_sign(a, b), epsilon_sign(tensor(a, b))) << n << " " << m;
                    }
                }
    EXPECT_EQ(pair_epsilon_sign(type_I_rep(4, std::nullopt), unramified_rep(2)), 0);
}
