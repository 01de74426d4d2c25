#include <gtest/gtest.h>

#include <random>
#include <vector>

#include <seawater/params.hpp>

using namespace seawater;

namespace {
PhysicalParams equal_masses(double nu) { return {0.9, nu, 1.0, 1.0}; }
} // namespace

TEST(CriticalNus, ReferenceExperimentValues) {
  const CriticalNus c = critical_nus(equal_masses(1.0));
  EXPECT_NEAR(c.nu1, 0.81, 1e-12);
  EXPECT_NEAR(c.nu2, 0.95, 1e-12);
  EXPECT_NEAR(c.nu3, 1.1, 1e-12);
}

TEST(CriticalNus, EqualMassesGiveMidpointForNu2) {
  for (double rho : {0.1, 0.3, 0.5, 0.77, 0.99}) {
    const CriticalNus c = critical_nus({rho, 1.0, 0.4, 0.4});
    EXPECT_NEAR(c.nu2, 0.5 * (1.0 + rho), 1e-15) << rho;
  }
}

TEST(CriticalNus, UnequalMassesHandValues) {
  // rho = 1/2, M_f = 2, M_g = 1: nu1 = (1/4 * 2) / (1 + 1/2) = 1/3,
  // nu2 = (1 + 1) / 3 = 2/3, nu3 = 1 + (1/2 * 2) / 1 = 2.
  const PhysicalParams p{0.5, 1.0, 2.0, 1.0};
  const CriticalNus c = critical_nus(p);
  EXPECT_NEAR(c.nu1, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.nu2, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.nu3, 2.0, 1e-15);
  EXPECT_NEAR(critical_nu1_alternate(p), 1.0 / 3.0, 1e-15);
}

TEST(CriticalNus, OrderingAndAlternateFormOnRandomParameters) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rho_d(1e-3, 1.0 - 1e-3), log_m(-6.0, 6.0);
  for (int i = 0; i < 20000; ++i) {
    const PhysicalParams p{rho_d(rng), 1.0, std::exp(log_m(rng)), std::exp(log_m(rng))};
    const CriticalNus c = critical_nus(p);
    ASSERT_GT(c.nu1, 0.0);
    ASSERT_LT(c.nu1, p.rho);
    ASSERT_LT(p.rho, c.nu2);
    ASSERT_LT(c.nu2, 1.0);
    ASSERT_LT(1.0, c.nu3);
    ASSERT_NEAR(critical_nu1_alternate(p), c.nu1, 1e-12 * c.nu1);
  }
}

TEST(Classify, HalfViscosityIsThreeCircleConfiguration) {
  // 0.5 < nu1 = 0.81: E_G is an annulus around the freshwater disk.
  const ConfigCase c = classify(equal_masses(0.5));
  EXPECT_EQ(c.config, Configuration::Case3);
  EXPECT_EQ(c.boundary, Boundary::None);
}

TEST(Classify, ViscosityTwoIsFourthConfiguration) {
  EXPECT_EQ(classify(equal_masses(2.0)).config, Configuration::Case4);
}

TEST(Classify, MarksCriticalValues) {
  const ConfigCase at2 = classify(equal_masses(0.95));
  EXPECT_EQ(at2.config, Configuration::Case1);
  EXPECT_EQ(at2.boundary, Boundary::AtNu2);
  const ConfigCase at1 = classify(equal_masses(0.81));
  EXPECT_EQ(at1.config, Configuration::Case3);
  EXPECT_EQ(at1.boundary, Boundary::AtNu1);
  const ConfigCase at3 = classify(equal_masses(1.1));
  EXPECT_EQ(at3.config, Configuration::Case4);
  EXPECT_EQ(at3.boundary, Boundary::AtNu3);
  EXPECT_EQ(classify(equal_masses(0.95 + 1e-9)).boundary, Boundary::None);
}

TEST(Classify, IntervalsAroundCriticalValues) {
  EXPECT_EQ(classify(equal_masses(0.8)).config, Configuration::Case3);
  EXPECT_EQ(classify(equal_masses(0.82)).config, Configuration::Case2);
  EXPECT_EQ(classify(equal_masses(0.9)).config, Configuration::Case2);
  EXPECT_EQ(classify(equal_masses(1.0)).config, Configuration::Case1);
  EXPECT_EQ(classify(equal_masses(1.09)).config, Configuration::Case1);
  EXPECT_EQ(classify(equal_masses(1.2)).config, Configuration::Case4);
}

TEST(Classify, TagsPartitionNuIntoOrderedIntervals) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rho_d(0.05, 0.95), mass_d(0.01, 10.0);
  const auto rank = [](Configuration c) {
    switch (c) {
    case Configuration::Case3: return 0;
    case Configuration::Case2: return 1;
    case Configuration::Case1: return 2;
    case Configuration::Case4: return 3;
    }
    return -1;
  };
  for (int trial = 0; trial < 200; ++trial) {
    PhysicalParams p{rho_d(rng), 1.0, mass_d(rng), mass_d(rng)};
    int last = 0;
    for (double nu = 1e-3; nu < 2.0 * critical_nus(p).nu3; nu *= 1.01) {
      p.nu = nu;
      const int r = rank(classify(p).config);
      ASSERT_GE(r, last) << "nu = " << nu;
      last = r;
    }
    EXPECT_EQ(last, 3);
  }
}

TEST(Classify, DependsOnMassRatioOnly) {
  const PhysicalParams a{0.6, 0.7, 1.0, 3.0}, b{0.6, 0.7, 0.01, 0.03};
  EXPECT_EQ(classify(a), classify(b));
}

TEST(PhysicalParams, RejectsOutOfRangeValues) {
  EXPECT_THROW((PhysicalParams{0.0, 1.0, 1.0, 1.0}.validate()), InvalidArgument);
  EXPECT_THROW((PhysicalParams{1.0, 1.0, 1.0, 1.0}.validate()), InvalidArgument);
  EXPECT_THROW((PhysicalParams{0.5, 0.0, 1.0, 1.0}.validate()), InvalidArgument);
  EXPECT_THROW((PhysicalParams{0.5, 1.0, 0.0, 1.0}.validate()), InvalidArgument);
  EXPECT_THROW((PhysicalParams{0.5, 1.0, 1.0, -1.0}.validate()), InvalidArgument);
  EXPECT_THROW(critical_nus({0.5, 1.0, 1.0, 0.0}), InvalidArgument);
  EXPECT_NO_THROW((PhysicalParams{0.5, 1.0, 1.0, 0.0}.validate_coefficients()));
}

TEST(ConfigCase, Names) {
  EXPECT_EQ(to_string(ConfigCase{Configuration::Case4, Boundary::None}), "Case4");
  EXPECT_EQ(to_string(ConfigCase{Configuration::Case1, Boundary::AtNu2}), "Case1/AtNu2");
}
