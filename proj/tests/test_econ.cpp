#include <random>

#include <gtest/gtest.h>

#include "gridhop/econ.hpp"

using namespace gridhop;
using namespace gridhop::econ;

TEST(Deferral, FiveYearsAtThreeAndAQuarterPercent) {
    EXPECT_NEAR(deferral_cost_reduction(5, 0.0325), 14.8, 0.05);
}

TEST(Deferral, TrivialCases) {
    EXPECT_EQ(deferral_cost_reduction(0, 0.0325), 0.0);
    EXPECT_EQ(deferral_cost_reduction(1, 1.0), 50.0);
    for (int n = 0; n < 30; ++n) EXPECT_EQ(deferral_cost_reduction(n, 0.0), 0.0);
}

TEST(Deferral, IncreasingInYears) {
    for (double d : {0.001, 0.0325, 0.2}) {
        for (int n = 0; n < 40; ++n) EXPECT_LT(deferral_cost_reduction(n, d), deferral_cost_reduction(n + 1, d));
    }
}

TEST(Deferral, RejectsInvalidRates) {
    EXPECT_THROW(deferral_cost_reduction(5, -1.0), InvalidRate);
    EXPECT_THROW(deferral_cost_reduction(5, -2.5), InvalidRate);
    EXPECT_THROW(deferral_cost_reduction(-1, 0.05), InvalidRate);
}

TEST(LossBenefit, FortyFourKilowatts) {
    EXPECT_NEAR(annual_energy_mwh(0.044), 385.44, 1e-9);
    EXPECT_NEAR(loss_reduction_annual_benefit(0.044, 50.0), 19272.0, 1e-9);
    EXPECT_EQ(loss_reduction_annual_benefit(0.0, 50.0), 0.0);
    EXPECT_EQ(loss_reduction_annual_benefit(1.0, 1.0), 8760.0);
}

TEST(Lifetime, TenYearsOfLossReduction) {
    const double pv = lifetime_operational_benefit(loss_reduction_annual_benefit(0.044, 50.0), 10, 0.0325);
    EXPECT_NEAR(pv, 162320.0, 0.005 * 162320.0);
}

TEST(Lifetime, TrivialCases) {
    EXPECT_EQ(lifetime_operational_benefit(0.0, 10, 0.05), 0.0);
    EXPECT_EQ(lifetime_operational_benefit(1.0, 7, 0.0), 7.0);
    EXPECT_THROW(lifetime_operational_benefit(1.0, 7, -1.0), InvalidRate);
}

TEST(Lifetime, ClosedFormMatchesSummation) {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> rate(-0.5, 0.5);
    std::uniform_real_distribution<double> benefit(0.0, 1e6);
    for (int trial = 0; trial < 2000; ++trial) {
        const double d = rate(rng);
        const double b = benefit(rng);
        const int n = static_cast<int>(rng() % 60);
        const double sum = lifetime_operational_benefit(b, n, d);
        const double closed = annuity_present_value(b, n, d);
        ASSERT_NEAR(closed, sum, 1e-9 * std::max(1.0, std::abs(sum))) << d << " " << n;
    }
}

TEST(Lifetime, LinearInBenefit) {
    for (double k : {0.5, 2.0, 100.0}) {
        EXPECT_NEAR(lifetime_operational_benefit(k * 1234.5, 12, 0.04), k * lifetime_operational_benefit(1234.5, 12, 0.04),
                    1e-9 * k * 1e4);
    }
}
