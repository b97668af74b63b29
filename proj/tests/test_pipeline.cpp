#include <gtest/gtest.h>

#include <sstream>

#include "explf/pipeline.hpp"

using namespace explf;

static const std::string kData = EXPLF_DATA_DIR;

namespace {

std::string reports(const PipelineResult& r) {
    std::ostringstream out;
    write_elimination_report(out, r.step3);
    write_existence_report(out, r.step4);
    write_arthur_report(out, r.step4.arthur);
    write_registry(out, r.updated);
    return out.str();
}

}  // namespace

TEST(Pipeline, LambdaGridParsing) {
    auto g = parse_lambda_grid("1:5:0.5");
    ASSERT_EQ(g.size(), 9u);
    EXPECT_DOUBLE_EQ(g[1], 1.5);
    EXPECT_EQ(parse_lambda_grid("2,3.5"), (std::vector<double>{2.0, 3.5}));
    EXPECT_THROW(parse_lambda_grid("1:5"), std::invalid_argument);
    EXPECT_THROW(parse_lambda_grid("a,b"), std::invalid_argument);
    EXPECT_THROW(parse_lambda_grid("5:1:1"), std::invalid_argument);
}

TEST(Pipeline, ConfigValidation) {
    PipelineConfig c;
    c.weight = 13;
    EXPECT_NO_THROW(c.validate());
    c.lambda_grid = {2.0, 1.0};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.lambda_grid = {};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.lambda_grid = {1.0};
    c.conductor = 6;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.conductor = 3;
    c.weight = 12;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Pipeline, MultiplicitySteps) {
    auto reg = load_registry(kData + "/knowns_cond1.tsv");
    PipelineConfig c;
    c.weight = 11;
    auto m11 = multiplicity_bound(c, KElement::ind(11), reg);
    EXPECT_EQ(m11.m1, 1);
    EXPECT_TRUE(m11.dropped);
    c.weight = 12;
    auto m12 = multiplicity_bound(c, KElement::parse("I12+eps"), reg);
    EXPECT_TRUE(m12.dropped);
    EXPECT_FALSE(m12.selfdual_possible);
    c.weight = 7;
    auto m7 = multiplicity_bound(c, KElement::ind(7), reg);
    EXPECT_FALSE(m7.dropped);
    EXPECT_EQ(m7.bound, 1);
}

TEST(Pipeline, WeightSevenAndNineEndToEnd) {
    auto reg = load_registry(kData + "/knowns_cond1.tsv");
    auto tables = load_dimension_tables(kData);
    PipelineConfig c;
    c.weight = 7;
    auto r7 = run_pipeline(c, reg, tables);
    ASSERT_EQ(r7.step1.candidates.size(), 1u);
    EXPECT_TRUE(r7.updated.contains("E_7^+"));
    EXPECT_FALSE(r7.step4.discrepancy());
    c.weight = 9;
    auto r9 = run_pipeline(c, r7.updated, tables);
    EXPECT_TRUE(r9.updated.contains("E_9^-"));
    EXPECT_EQ(r9.updated.size(), reg.size() + 2);
}

TEST(Pipeline, StepFiveIsIdempotent) {
    auto reg = load_registry(kData + "/knowns_cond1.tsv");
    auto tables = load_dimension_tables(kData);
    PipelineConfig c;
    c.weight = 7;
    auto r = run_pipeline(c, reg, tables);
    Registry again = run_step5(r.step4, r.updated);
    std::ostringstream a, b;
    write_registry(a, r.updated);
    write_registry(b, again);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Pipeline, Deterministic) {
    auto reg = load_registry(kData + "/knowns_cond1.tsv");
    auto tables = load_dimension_tables(kData);
    PipelineConfig c;
    c.weight = 9;
    EXPECT_EQ(reports(run_pipeline(c, reg, tables)), reports(run_pipeline(c, reg, tables)));
}
