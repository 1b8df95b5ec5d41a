#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include <tsvsim/config_io.hpp>
#include <tsvsim/random_stream.hpp>
#include <tsvsim/stats.hpp>

#include "../support/oracles.hpp"

using namespace tsvsim;

TEST(Binomial, MatchesPascalTriangle) {
    for (unsigned n = 0; n <= 40; ++n) {
        for (unsigned k = 0; k <= n; ++k) {
            ASSERT_EQ(stats::binomial(n, k), oracle::pascal(n, k)) << n << " choose " << k;
        }
    }
    EXPECT_EQ(stats::binomial(5, 7), 0u);
    EXPECT_THROW(stats::binomial(200, 100), std::overflow_error);
}

TEST(NormalCdf, KnownQuantiles) {
    EXPECT_NEAR(stats::normal_cdf(0.0), 0.5, 1e-15);
    EXPECT_NEAR(stats::normal_cdf(1.959963984540054), 0.975, 1e-12);
    EXPECT_NEAR(stats::normal_cdf(3.0, 1.0, 2.0), stats::normal_cdf(1.0), 1e-15);
}

TEST(Kolmogorov, SurvivalReferenceValues) {
    // Classic critical values of the Kolmogorov distribution.
    EXPECT_NEAR(stats::kolmogorov_survival(1.3581), 0.05, 2e-4);
    EXPECT_NEAR(stats::kolmogorov_survival(1.6276), 0.01, 1e-4);
    EXPECT_NEAR(stats::kolmogorov_survival(0.0), 1.0, 1e-12);
}

TEST(Ks, RejectsShiftedAndAcceptsMatched) {
    RandomStream rng(3);
    std::vector<double> u(2000), shifted(2000);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = rng.uniform();
        shifted[i] = 0.8 * rng.uniform();
    }
    EXPECT_GT(stats::ks_uniform(u).p_value, 1e-3);
    EXPECT_LT(stats::ks_uniform(shifted).p_value, 1e-10);
}

TEST(Ks, StatisticOfSingleSample) {
    const std::vector<double> one{0.25};
    EXPECT_NEAR(stats::ks_uniform(one).statistic, 0.75, 1e-15);
}

TEST(Moments, MeanAndSampleSd) {
    const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
    EXPECT_DOUBLE_EQ(stats::mean(x), 5.0);
    EXPECT_NEAR(stats::sample_sd(x), std::sqrt(32.0 / 7.0), 1e-14);
}

TEST(KeyValues, ParsesCommentsBlanksAndWhitespace) {
    const auto kv = parse_key_values("# header\n\n  alpha_deg =  30 \nname=x = y\n", "t");
    EXPECT_EQ(kv.require("alpha_deg"), "30");
    EXPECT_EQ(kv.require("name"), "x = y");
    EXPECT_FALSE(kv.contains("header"));
}

TEST(KeyValues, LaterSetOverrides) {
    KeyValues kv;
    kv.set("a", "1");
    kv.set("a", "2");
    EXPECT_EQ(kv.require("a"), "2");
    EXPECT_EQ(kv.items().size(), 1u);
}

TEST(KeyValues, MalformedLineNamesLineNumber) {
    try {
        parse_key_values("a = 1\nb = 2\nnot a pair\n", "cfg.txt");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.source(), "cfg.txt");
    }
}

TEST(KeyValues, MissingRequiredKeyThrows) {
    KeyValues kv;
    EXPECT_THROW(kv.require("seed"), ParseError);
}

TEST(KeyValues, FormatRoundTrips) {
    KeyValues kv;
    kv.set("x", "1.5");
    kv.set("y", "free");
    const auto back = parse_key_values(format_key_values(kv), "t");
    EXPECT_EQ(back.items(), kv.items());
    // A "# " prefix turns the block into comments.
    EXPECT_TRUE(parse_key_values(format_key_values(kv, "# "), "t").items().empty());
}

TEST(Numbers, FormatDoubleRoundTrips) {
    RandomStream rng(17);
    for (int i = 0; i < 1000; ++i) {
        const double x = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<int>(rng.uniform() * 40) - 20);
        EXPECT_EQ(parse_double(format_double(x), "t", 0, "x"), x);
    }
    EXPECT_EQ(parse_double(format_double(0.1), "t", 0, "x"), 0.1);
}

TEST(Numbers, RejectGarbage) {
    EXPECT_THROW(parse_double("1.5x", "t", 4, "lambda"), ParseError);
    EXPECT_THROW(parse_double("", "t", 4, "lambda"), ParseError);
    EXPECT_THROW(parse_integer("2.5", "t", 4, "n"), ParseError);
    EXPECT_EQ(parse_integer(" 42 ", "t", 4, "n"), 42);
}
