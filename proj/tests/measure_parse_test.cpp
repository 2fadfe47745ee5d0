#include <gtest/gtest.h>

#include <cmath>

#include "she/measure_parse.hpp"

using namespace she;

TEST(MeasureParse, Lebesgue) {
    const auto mu = parse_measure("lebesgue");
    EXPECT_TRUE(mu.is_lebesgue());
    EXPECT_EQ(mu.name(), "lebesgue");
    EXPECT_TRUE(parse_measure("  lebesgue\t").is_lebesgue());
}

TEST(MeasureParse, DeltaDefaultsToOrigin) {
    const auto a = parse_measure("delta");
    ASSERT_TRUE(a.is_pure_atomic());
    ASSERT_EQ(a.atoms().size(), 1u);
    EXPECT_EQ(a.atoms()[0].location, 0.0);
    EXPECT_EQ(a.atoms()[0].mass, 1.0);

    const auto b = parse_measure("delta:-1.25");
    EXPECT_EQ(b.atoms()[0].location, -1.25);
}

TEST(MeasureParse, DensitiesEvaluate) {
    const auto d = parse_measure("exp_decay:2");
    ASSERT_EQ(d.densities().size(), 1u);
    EXPECT_NEAR(d.densities()[0].density.f(0.5), std::exp(-1.0), 1e-15);

    const auto ind = parse_measure("indicator: -1 , 2");
    EXPECT_EQ(ind.densities()[0].density.f(1.5), 1.0);
    EXPECT_EQ(ind.densities()[0].density.f(2.5), 0.0);

    const auto g = parse_measure("gaussian_bump:0,1");
    EXPECT_GT(g.densities()[0].density.f(0.0), g.densities()[0].density.f(1.0));

    EXPECT_EQ(parse_measure("exp_growth:1,0.5").densities().size(), 1u);
}

TEST(MeasureParse, Atoms) {
    const auto mu = parse_measure("atoms:(0,1);(1,0.5) ; (-2, 3e-1)");
    ASSERT_EQ(mu.atoms().size(), 3u);
    EXPECT_EQ(mu.atoms()[1].location, 1.0);
    EXPECT_EQ(mu.atoms()[1].mass, 0.5);
    EXPECT_EQ(mu.atoms()[2].location, -2.0);
    EXPECT_DOUBLE_EQ(mu.atoms()[2].mass, 0.3);
    EXPECT_EQ(mu.name(), "atoms:(0,1);(1,0.5) ; (-2, 3e-1)");
}

TEST(MeasureParse, Errors) {
    for (const char* bad : {"", "cauchy", "lebesgue:1", "exp_decay", "exp_decay:", "exp_decay:abc", "exp_decay:1,2",
                            "exp_growth:1", "indicator:1;2", "delta:1x", "atoms:", "atoms:(0,1)(1,2)", "atoms:(0,1", "atoms:0,1",
                            "atoms:(0,1);(1)", "gaussian_bump:0,1e999", "indicator:2,1"})
        EXPECT_THROW(parse_measure(bad), ConfigError) << bad;
}

TEST(MeasureParse, UnknownNameListsAlternatives) {
    try {
        parse_measure("cauchy:1");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("unknown measure 'cauchy'"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("atoms:(loc,mass)"), std::string::npos);
    }
}
