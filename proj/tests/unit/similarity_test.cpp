#include "fdlbp/similarity.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace fdlbp;

namespace {

std::vector<double> random_normalized(std::size_t n, std::mt19937& rng, double zero_fraction = 0.3) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    double total = 0.0;
    for (double& x : v) {
        x = u(rng) < zero_fraction ? 0.0 : u(rng);
        total += x;
    }
    for (double& x : v) {
        x /= total;
    }
    return v;
}

double d(const std::vector<double>& a, const std::vector<double>& b, Measure m, DistanceOptions opt = {}) {
    return distance(std::span<const double>(a), std::span<const double>(b), m, opt);
}

}  // namespace

TEST(Distance, UnitVectorsHandEvaluated) {
    const std::vector<double> a{1, 0};
    const std::vector<double> b{0, 1};
    EXPECT_DOUBLE_EQ(d(a, b, Measure::L1), 2.0);
    EXPECT_DOUBLE_EQ(d(a, b, Measure::Euclidean), std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(d(a, b, Measure::ChiSquare), 2.0);
    EXPECT_DOUBLE_EQ(d(a, b, Measure::Emd), 1.0);
    EXPECT_DOUBLE_EQ(d(a, b, Measure::D1), 1.0);
    EXPECT_DOUBLE_EQ(d(a, b, Measure::Cosine), 1.0);
}

TEST(Distance, SmallVectorsHandEvaluated) {
    const std::vector<double> a{0.5, 0.25, 0.25};
    const std::vector<double> b{0.25, 0.25, 0.5};
    EXPECT_DOUBLE_EQ(d(a, b, Measure::L1), 0.5);
    // CDFs: (0.5, 0.75, 1) vs (0.25, 0.5, 1)
    EXPECT_DOUBLE_EQ(d(a, b, Measure::Emd), 0.5);
    EXPECT_DOUBLE_EQ(d(a, b, Measure::ChiSquare), 2 * 0.0625 / 0.75);
    EXPECT_DOUBLE_EQ(d(a, b, Measure::D1), 2 * 0.25 / 1.75);
    EXPECT_DOUBLE_EQ(d(a, b, Measure::Euclidean), std::sqrt(0.125));
    EXPECT_NEAR(d(a, b, Measure::Cosine), 1.0 - 0.3125 / 0.375, 1e-15);
}

TEST(Distance, IdentityAllMeasures) {
    std::mt19937 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const auto v = random_normalized(300, rng);
        for (Measure m : kAllMeasures) {
            EXPECT_EQ(d(v, v, m), 0.0) << to_string(m);
        }
    }
}

TEST(Distance, Symmetry) {
    std::mt19937 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_normalized(257, rng);
        const auto b = random_normalized(257, rng);
        for (Measure m : kAllMeasures) {
            EXPECT_NEAR(d(a, b, m), d(b, a, m), 1e-12) << to_string(m);
        }
    }
}

TEST(Distance, NonNegativeAndSeparating) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_normalized(64, rng);
        const auto b = random_normalized(64, rng);
        for (Measure m : kAllMeasures) {
            EXPECT_GE(d(a, b, m), 0.0);
        }
        for (Measure m : {Measure::L1, Measure::Euclidean, Measure::ChiSquare, Measure::D1, Measure::Emd}) {
            EXPECT_GT(d(a, b, m), 0.0) << to_string(m);
        }
    }
}

TEST(Distance, TriangleInequality) {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = random_normalized(32, rng);
        const auto b = random_normalized(32, rng);
        const auto c = random_normalized(32, rng);
        for (Measure m : {Measure::L1, Measure::Euclidean}) {
            EXPECT_LE(d(a, c, m), d(a, b, m) + d(b, c, m) + 1e-12);
        }
    }
}

TEST(Distance, ChiSquareDisjointSupportIsTwo) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        auto a = random_normalized(128, rng, 0.0);
        auto b = random_normalized(128, rng, 0.0);
        double sa = 0.0;
        double sb = 0.0;
        for (std::size_t i = 0; i < 128; ++i) {
            (i % 2 == 0 ? b[i] : a[i]) = 0.0;
            sa += a[i];
            sb += b[i];
        }
        for (std::size_t i = 0; i < 128; ++i) {
            a[i] /= sa;
            b[i] /= sb;
        }
        EXPECT_NEAR(d(a, b, Measure::ChiSquare), 2.0, 1e-12);
    }
}

TEST(Distance, ZeroSumTermsSkipped) {
    const std::vector<double> a{0, 0.5, 0.5, 0};
    const std::vector<double> b{0, 0.5, 0.5, 0};
    EXPECT_EQ(d(a, b, Measure::ChiSquare), 0.0);
}

TEST(Distance, CosineZeroNorms) {
    const std::vector<double> z{0, 0, 0};
    const std::vector<double> v{0, 1, 0};
    EXPECT_EQ(d(z, z, Measure::Cosine), 0.0);
    EXPECT_EQ(d(z, v, Measure::Cosine), 1.0);
}

TEST(Distance, EmdPerBlockResets) {
    // Two blocks of two bins. Whole-vector CDFs (1,1,1,1) vs (0,0,1,1);
    // per-block CDFs (1,1 | 0,0) vs (0,0 | 1,1).
    const std::vector<double> h{1.0, 0.0, 0.0, 0.0};
    const std::vector<double> k{0.0, 0.0, 1.0, 0.0};
    EXPECT_DOUBLE_EQ(d(h, k, Measure::Emd), 2.0);
    EXPECT_DOUBLE_EQ(d(h, k, Measure::Emd, DistanceOptions{2}), 4.0);
    // Mass moved inside each block costs the same either way.
    const std::vector<double> f{0.5, 0.0, 0.5, 0.0};
    const std::vector<double> g{0.0, 0.5, 0.0, 0.5};
    EXPECT_DOUBLE_EQ(d(f, g, Measure::Emd), 1.0);
    EXPECT_DOUBLE_EQ(d(f, g, Measure::Emd, DistanceOptions{2}), 1.0);
}

TEST(Distance, FloatAndDoubleAgree) {
    std::mt19937 rng(6);
    const auto a = random_normalized(100, rng);
    const auto b = random_normalized(100, rng);
    const std::vector<float> af(a.begin(), a.end());
    const std::vector<float> bf(b.begin(), b.end());
    const std::vector<double> ad(af.begin(), af.end());
    const std::vector<double> bd(bf.begin(), bf.end());
    for (Measure m : kAllMeasures) {
        EXPECT_EQ(distance(std::span<const float>(af), std::span<const float>(bf), m), d(ad, bd, m));
    }
}

TEST(Distance, CheckedMismatchRejected) {
    FeatureVector a{{0.5, 0.5}, Variant::Fdlbp, 1};
    FeatureVector b{{0.5, 0.5, 0.0}, Variant::Fdlbp, 1};
    FeatureVector c{{0.5, 0.5}, Variant::Fdlbp, 2};
    EXPECT_THROW(distance(a, b, Measure::L1), std::invalid_argument);
    EXPECT_THROW(distance(a, c, Measure::L1), std::invalid_argument);
    EXPECT_EQ(distance(a, a, Measure::L1), 0.0);
}

TEST(Measure, Tokens) {
    const char* tokens[] = {"euclidean", "cosine", "emd", "l1", "d1", "chisq"};
    int i = 0;
    for (Measure m : kAllMeasures) {
        EXPECT_EQ(to_string(m), tokens[i]);
        EXPECT_EQ(parse_measure(tokens[i]), m);
        ++i;
    }
    EXPECT_THROW(parse_measure("hamming"), std::invalid_argument);
}
