#include <gtest/gtest.h>

#include "explf/arthur.hpp"

using namespace explf;

static const std::string kData = EXPLF_DATA_DIR;

namespace {

Registry full_registry() {
    Registry r = load_registry(kData + "/knowns_cond1.tsv");
    Registry ann = load_registry(kData + "/annexe_cond2.tsv");
    for (auto& x : ann.records()) r.add(x);
    return r;
}

}  // namespace

TEST(Arthur, GroupNames) {
    for (auto f : {GroupFamily::SO3, GroupFamily::SO5_split, GroupFamily::SO7_compact, GroupFamily::SO9_compact,
                   GroupFamily::SO5_case3})
        EXPECT_EQ(parse_group(to_string(f)), f);
    EXPECT_THROW(parse_group("so11"), std::invalid_argument);
}

TEST(Arthur, TargetValidation) {
    EXPECT_THROW((GroupTarget{GroupFamily::SO7_compact, {19, 15}, 2}.validate()), std::invalid_argument);
    EXPECT_THROW((GroupTarget{GroupFamily::SO5_split, {15, 17}, 2}.validate()), std::invalid_argument);
    EXPECT_THROW((GroupTarget{GroupFamily::SO5_split, {16, 5}, 2}.validate()), std::invalid_argument);
    EXPECT_THROW((GroupTarget{GroupFamily::SO3, {13}, 6}.validate()), std::invalid_argument);
    EXPECT_TRUE((GroupTarget{GroupFamily::SO7_compact, {19, 15, 11}, 2}.very_regular()));
    EXPECT_FALSE((GroupTarget{GroupFamily::SO7_compact, {19, 17, 3}, 2}.very_regular()));
}

TEST(Arthur, ParametersObeyInvariants) {
    Registry reg = full_registry();
    auto t = load_dimension_tables(kData);
    for (auto& [key, row] : t.so) {
        if (row.m != 7) continue;
        GroupTarget tg{GroupFamily::SO7_compact, row.weights, 2};
        for (auto& p : enumerate_parameters(tg, reg)) {
            EXPECT_EQ(p.dim(), 6);
            EXPECT_EQ(p.conductor(), 2);
            EXPECT_EQ(p.weights(), row.weights) << p.str();
            EXPECT_NO_THROW(p.validate(6));
        }
    }
}

TEST(Arthur, ValidateRejects) {
    Registry reg = full_registry();
    ArthurSummand d11{*reg.find("Delta_11"), "", 1}, e13{*reg.find("E_13^+"), "", 1}, e9{*reg.find("E_9^-"), "", 1};
    EXPECT_THROW((ArthurParameter{{d11, d11}}.validate(4)), std::logic_error);
    EXPECT_THROW((ArthurParameter{{e13, e9}}.validate(4)), std::logic_error);
    EXPECT_THROW((ArthurParameter{{d11, e13}}.validate(6)), std::logic_error);
    ArthurSummand bad{*reg.find("Delta_11"), "", 2};
    EXPECT_THROW((ArthurParameter{{bad}}.validate(4)), std::logic_error);
    ArthurSummand eta2{std::nullopt, "eta", 2};
    EXPECT_NO_THROW((ArthurParameter{{d11, eta2}}.validate(4)));
    EXPECT_EQ(eta2.conductor(), 2);
    EXPECT_EQ(eta2.weights(), (std::vector<int>{1}));
}

TEST(Arthur, CaseThreeFirstSummandUnramified) {
    Registry reg = full_registry();
    // Delta_15 + E_13: unramified first, admissible.
    auto ok = enumerate_parameters({GroupFamily::SO5_case3, {15, 13}, 2}, reg);
    ASSERT_EQ(ok.size(), 2u);
    for (auto& p : ok) EXPECT_TRUE(p.conjectural);
    // E_13 + Delta_11: ramified summand first, excluded.
    EXPECT_TRUE(enumerate_parameters({GroupFamily::SO5_case3, {13, 11}, 2}, reg).empty());
}

TEST(Arthur, SignedGammaZero) {
    Registry reg = full_registry();
    auto t = load_dimension_tables(kData);
    GroupTarget tg{GroupFamily::SO3, {13}, 2};
    EXPECT_EQ(expected_count(tg, t, 1), 1);
    EXPECT_EQ(expected_count(tg, t, -1), 1);
    auto rep = reconcile(tg, reg, t);
    EXPECT_EQ(rep.status, "consistent");
    EXPECT_TRUE(rep.consistent);
}

TEST(Arthur, ParamodularRemovesOldforms) {
    Registry reg = full_registry();
    auto t = load_dimension_tables(kData);
    // (19,7): Delta_19,7 lifts from level 1 and is subtracted twice.
    GroupTarget tg{GroupFamily::SO5_split, {19, 7}, 2};
    EXPECT_EQ(expected_count(tg, t, std::nullopt, reg), 0);
    EXPECT_THROW(expected_count(tg, t, 1, reg), std::invalid_argument);
    EXPECT_EQ(reconcile(tg, reg, t).status, "consistent");
}

TEST(Arthur, InfersSignFromSignedTable) {
    Registry reg = full_registry();
    RepRecord x = *reg.find("E_19,11^+");
    x.local_sign = 0;
    x.name = "E_19,11^?";
    reg.replace("E_19,11^+", x);
    auto t = load_dimension_tables(kData);
    auto rep = reconcile({GroupFamily::SO7_compact, {19, 15, 11}, 2}, reg, t);
    EXPECT_EQ(rep.status, "sign-inferred");
    ASSERT_EQ(rep.inferred_signs.count("E_19,11^?"), 1u);
    EXPECT_EQ(rep.inferred_signs.at("E_19,11^?"), 1);
}

TEST(Arthur, MissingRowAndSurplus) {
    Registry reg = full_registry();
    auto t = load_dimension_tables(kData);
    auto rep = reconcile({GroupFamily::SO9_compact, {19, 15, 11, 3}, 2}, reg, t);
    EXPECT_TRUE(rep.missing_row);
    EXPECT_EQ(rep.status, "missing-row");
    EXPECT_THROW(expected_count({GroupFamily::SO9_compact, {19, 15, 11, 3}, 2}, t, 1), MissingRow);
    RepRecord extra = *reg.find("E_17^-");
    extra.name = "E_17^-b";
    reg.add(extra);
    auto s = reconcile({GroupFamily::SO3, {17}, 2}, reg, t);
    EXPECT_FALSE(s.consistent);
    EXPECT_EQ(s.status, "surplus");
}
