#include <gtest/gtest.h>

#include <random>

#include "explf/elimination.hpp"

using namespace explf;

static const std::string kData = EXPLF_DATA_DIR;

namespace {

RepRecord putative(const std::string& arch, int conductor, Tri sd, int sign) {
    RepRecord r;
    r.arch = KElement::parse(arch);
    r.rank = static_cast<int>(r.arch.dim());
    r.conductor = conductor;
    r.selfdual = sd;
    r.nature = sd == Tri::yes ? Nature::symplectic : Nature::unknown;
    r.local_sign = sign;
    r.name = arch;
    return r;
}

std::vector<Slot> sample_slots() {
    auto k = load_registry(kData + "/knowns_cond1.tsv");
    auto a = load_registry(kData + "/annexe_cond2.tsv");
    std::vector<Slot> s;
    for (auto& r : k.records())
        if (r.arch.motivic_weight() <= 19) s.push_back({r});
    for (auto& r : a.records()) s.push_back({r});
    s.push_back({putative("I19+I11", 2, Tri::yes, 1), 2});
    return s;
}

}  // namespace

TEST(Elimination, GramIsSymmetric) {
    auto slots = sample_slots();
    for (Form f : {Form::Co, Form::C, Form::Cs})
        for (double l : {1.5, 4.0, 9.0}) {
            auto G = gram(f, slots, Odlyzko(l));
            EXPECT_LT((G.entries - G.entries.transpose()).cwiseAbs().maxCoeff(), 1e-15);
        }
}

TEST(Elimination, FormsAreOrdered) {
    auto slots = sample_slots();
    auto co = gram(Form::Co, slots, Odlyzko(3.0)).entries;
    auto c = gram(Form::C, slots, Odlyzko(3.0)).entries;
    EXPECT_TRUE(((co - c).array() >= -1e-15).all());
}

TEST(Elimination, WitnessesReevaluateNegative) {
    std::mt19937 rng(3);
    std::normal_distribution<double> nd;
    int found = 0;
    for (int it = 0; it < 200; ++it) {
        int n = 2 + it % 6;
        Eigen::MatrixXd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = nd(rng);
        Eigen::MatrixXd G = A * A.transpose() / n - 0.4 * Eigen::MatrixXd::Identity(n, n) + 0.2 * (A + A.transpose());
        auto w = find_negative_witness(G);
        if (!w) continue;
        ++found;
        EXPECT_GE(w->t.minCoeff(), 0.0);
        EXPECT_NEAR(w->t.norm(), 1.0, 1e-9);
        EXPECT_LT(w->t.dot(G * w->t), kNegativeThreshold);
        EXPECT_NEAR(w->t.dot(G * w->t), w->value, 1e-12);
        for (int i = 0; i < n; ++i)
            if (std::find(w->support.begin(), w->support.end(), i) == w->support.end()) EXPECT_EQ(w->t(i), 0.0);
    }
    EXPECT_GT(found, 50);
}

TEST(Elimination, CopositiveMatrixHasNoWitness) {
    Eigen::MatrixXd G(3, 3);
    G << 1, -0.5, 2, -0.5, 1, 0.3, 2, 0.3, 0.5;
    EXPECT_FALSE(find_negative_witness(G));
    auto c = find_closest_face(G);
    ASSERT_TRUE(c);
    EXPECT_GT(c->value, 0.0);
}

TEST(Elimination, RequiredIndexAndSupport) {
    Eigen::MatrixXd G(3, 3);
    G << 1, 0, 0, 0, -1, 0, 0, 0, 1;
    WitnessOptions opt;
    opt.required = 0;
    opt.max_support = 1;
    EXPECT_FALSE(find_negative_witness(G, opt));
    opt.max_support = 2;
    auto w = find_negative_witness(G, opt);
    ASSERT_TRUE(w);
    EXPECT_GT(w->t(0), 0);
}

TEST(Elimination, EliminateReportsWitness) {
    auto k = load_registry(kData + "/knowns_cond1.tsv");
    std::vector<RepRecord> knowns{*k.find("1")};
    EliminationConfig cfg{{2.0}, Form::C, 1, false};
    auto r = eliminate(Slot{putative("I13", 1, Tri::yes, 0)}, knowns, cfg);
    EXPECT_TRUE(r.eliminated);
    ASSERT_EQ(r.support.size(), r.weights.size());
    EXPECT_LT(r.value, 0);
}

TEST(Elimination, CsNeedsSigns) {
    std::vector<Slot> s{{putative("I13", 2, Tri::yes, 0)}};
    EXPECT_THROW(gram(Form::Cs, s, Odlyzko(2.0)), std::invalid_argument);
    std::vector<Slot> pair{{putative("I13+I5", 2, Tri::no, 0), 1, true}, {putative("I13", 2, Tri::yes, 1)}};
    EXPECT_THROW(gram(Form::Cs, pair, Odlyzko(2.0)), std::invalid_argument);
    EXPECT_NO_THROW(gram(Form::C, s, Odlyzko(2.0)));
}

TEST(Elimination, TaibiAndParity) {
    auto b = taibi_bounds(KElement::ind(7), Odlyzko(2.0), 2);
    ASSERT_TRUE(b.max_m2);
    EXPECT_LE(*b.max_m2, 1);
    auto b11 = taibi_bounds(KElement::ind(11), Odlyzko(1.5), 2, 1);
    ASSERT_TRUE(b11.joint);
    EXPECT_EQ(*b11.joint, 0);
    auto b14 = taibi_bounds(KElement::parse("I14+eps"), Odlyzko(3.0), 2);
    ASSERT_TRUE(b14.max_m2);
    EXPECT_LE(*b14.max_m2, 1);
    EXPECT_EQ(parity_constraint(KElement::parse("I14+eps"), *b14.max_m2), 0);
    EXPECT_EQ(parity_constraint(KElement::parse("I12+eps"), 3), 2);
    EXPECT_THROW(parity_constraint(KElement::ind(13), 3), std::invalid_argument);
    EXPECT_EQ(parity_constraint(KElement::ind(13), 3, true), 2);
}
