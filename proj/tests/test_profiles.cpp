#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include <seawater/profiles.hpp>

using namespace seawater;

namespace {

constexpr double kPi = std::numbers::pi;

/// Composite Simpson rule for 2 pi int_0^R h(r) r dr with n (even) intervals.
double polar_simpson(const std::function<double(double)> &h, double r_max, int n) {
  const double step = r_max / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = i * step;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * h(r) * r;
  }
  return 2.0 * kPi * s * step / 3.0;
}

double outer_radius(const StationaryProfile &p) { return p.r3.value_or(p.r2); }

double F(const StationaryProfile &p, double r) { return eval_profile(p, r).f_value; }
double G(const StationaryProfile &p, double r) { return eval_profile(p, r).g_value; }

std::vector<double> interfaces(const StationaryProfile &p) {
  std::vector<double> out{p.r1, p.r2};
  if (p.r3)
    out.push_back(*p.r3);
  return out;
}

/// One representative parameter set per configuration with rho = 0.9 and
/// M_f = M_g (critical values 0.81, 0.95, 1.1).
std::vector<PhysicalParams> one_per_case(double mass = 0.1) {
  return {{0.9, 1.0, mass, mass}, {0.9, 0.9, mass, mass}, {0.9, 0.5, mass, mass},
          {0.9, 2.0, mass, mass}};
}

/// Value of the piece on each side of radius r (left: piece ending at r).
std::pair<double, double> sides(const std::vector<RadialPiece> &pieces, double r) {
  double left = 0.0, right = 0.0;
  for (const auto &pc : pieces) {
    if (pc.r_hi == r)
      left = pc.value(r);
    if (pc.r_lo == r)
      right = pc.value(r);
  }
  return {left, right};
}

} // namespace

TEST(SolveProfile, FirstConfigurationRadii) {
  // rho = 0.9, nu = 1, M_f = M_g = 0.1; reference values from an independent
  // 30-digit evaluation of r1^4 = 16 nu (1-rho) M_g / (pi (nu-rho)) and
  // r2^4 = 16 nu (M_f+M_g) / pi.
  const StationaryProfile p = solve_profile({0.9, 1.0, 0.1, 0.1});
  EXPECT_EQ(p.config.config, Configuration::Case1);
  EXPECT_NEAR(p.r1, 0.844777868117476457, 1e-14);
  EXPECT_NEAR(p.r2, 1.004615851362133355, 1e-14);
  EXPECT_FALSE(p.r3.has_value());
  EXPECT_FALSE(p.c4.has_value());
}

TEST(SolveProfile, ThirdConfigurationMatchesClosedFormRoot) {
  const double rho = 0.9, nu = 0.5, mf = 0.1, mg = 0.1;
  const StationaryProfile p = solve_profile({rho, nu, mf, mg});
  ASSERT_EQ(p.config.config, Configuration::Case3);
  const double closed = 2.0 * std::sqrt(nu / std::sqrt(kPi) *
                                        (std::sqrt(mg / rho + mf / nu) -
                                         std::sqrt((1.0 - nu) * mg / (rho * (rho - nu)))));
  EXPECT_NEAR(p.r1, closed, 1e-13);
  EXPECT_NEAR(p.r1, 0.457009564726742238, 1e-13);
}

TEST(SolveProfile, FourthConfigurationRadii) {
  const StationaryProfile p = solve_profile({0.9, 2.0, 0.1, 0.1});
  ASSERT_EQ(p.config.config, Configuration::Case4);
  EXPECT_NEAR(p.r1, 0.574535663434559522, 1e-13);
  EXPECT_NEAR(p.r2, 0.652931640569205059, 1e-13);
  ASSERT_TRUE(p.r3.has_value());
  EXPECT_NEAR(*p.r3, 1.178390730716444024, 1e-13);
}

TEST(SolveProfile, RadiiCoincideAtNu2) {
  const StationaryProfile p = solve_profile({0.9, 0.95, 0.1, 0.1});
  EXPECT_EQ(p.config.boundary, Boundary::AtNu2);
  EXPECT_NEAR(p.r1, p.r2, 1e-10);
}

TEST(SolveProfile, InnerRadiusVanishesAtNu1AndNu3) {
  for (double nu : {0.81, 1.1}) {
    const StationaryProfile p = solve_profile({0.9, nu, 0.1, 0.1});
    EXPECT_NE(p.config.boundary, Boundary::None);
    EXPECT_EQ(p.r1, 0.0) << nu;
    const auto [mf, mg] = profile_masses(p);
    EXPECT_NEAR(mf, 0.1, 1e-12);
    EXPECT_NEAR(mg, 0.1, 1e-12);
  }
  // At nu3 the outer-disk radius reduces to r2^2 = 4 (1-rho) sqrt(nu M_f / (pi (nu-rho)(nu-1))).
  const StationaryProfile p = solve_profile({0.9, 1.1, 0.1, 0.1});
  EXPECT_NEAR(p.r2 * p.r2, 0.4 * std::sqrt(1.1 * 0.1 / (kPi * 0.2 * 0.1)), 1e-12);
}

TEST(SolveProfile, LimitsAtNu1AndNu3AgreeWithNeighbours) {
  for (double nu : {0.81, 1.1}) {
    const StationaryProfile at = solve_profile({0.9, nu, 0.1, 0.1});
    for (double off : {-1e-9, 1e-9}) {
      const StationaryProfile near = solve_profile({0.9, nu + off, 0.1, 0.1});
      for (double r = 0.0; r < 1.3; r += 0.01) {
        EXPECT_NEAR(F(at, r), F(near, r), 1e-6) << nu << ' ' << off << ' ' << r;
        EXPECT_NEAR(G(at, r), G(near, r), 1e-6) << nu << ' ' << off << ' ' << r;
      }
    }
  }
}

TEST(SolveProfile, CaseTagEqualsClassification) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> rho_d(0.05, 0.95), nu_d(0.02, 4.0), m_d(0.01, 5.0);
  for (int i = 0; i < 500; ++i) {
    const PhysicalParams p{rho_d(rng), nu_d(rng), m_d(rng), m_d(rng)};
    EXPECT_EQ(solve_profile(p).config, classify(p));
  }
}

TEST(SolveProfile, RejectsInvalidParams) {
  EXPECT_THROW(solve_profile({1.5, 1.0, 1.0, 1.0}), InvalidArgument);
}

TEST(ProfileMasses, ClosedFormAndQuadratureOnRandomParameters) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> rho_d(0.05, 0.95), log_nu(-2.0, 1.5), log_m(-4.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const PhysicalParams p{rho_d(rng), std::exp(log_nu(rng)), std::exp(log_m(rng)),
                           std::exp(log_m(rng))};
    const StationaryProfile prof = solve_profile(p);
    const auto [mf, mg] = profile_masses(prof);
    EXPECT_NEAR(mf / p.mass_f, 1.0, 1e-10) << to_string(prof.config);
    EXPECT_NEAR(mg / p.mass_g, 1.0, 1e-10) << to_string(prof.config);
    const double R = outer_radius(prof) * 1.01;
    const double qf = polar_simpson([&](double r) { return F(prof, r); }, R, 200000);
    const double qg = polar_simpson([&](double r) { return G(prof, r); }, R, 200000);
    EXPECT_NEAR(qf / p.mass_f, 1.0, 1e-8) << to_string(prof.config);
    EXPECT_NEAR(qg / p.mass_g, 1.0, 1e-8) << to_string(prof.config);
  }
}

TEST(ProfileMasses, FirstConfigurationSaltwaterMassFormula) {
  const double rho = 0.9, nu = 1.0, mg = 0.1;
  const StationaryProfile p = solve_profile({rho, nu, 0.1, mg});
  const double r1 = p.r1;
  EXPECT_NEAR(kPi * (*p.c2 * r1 * r1 + (rho - nu) * std::pow(r1, 4) / (16.0 * nu * (1.0 - rho))),
              mg, 1e-14);
}

TEST(ProfileMasses, QuadratureDetectsPerturbedConstant) {
  StationaryProfile p = solve_profile({0.9, 1.0, 0.1, 0.1});
  for (auto &pc : p.g_pieces)
    pc.constant *= 2.0;
  const double q = polar_simpson([&](double r) { return G(p, r); }, p.r2, 200000);
  EXPECT_GT(std::abs(q - 0.1), 0.01);
}

TEST(ProfileInvariants, ContinuityAtEveryInterface) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> rho_d(0.05, 0.95), nu_d(0.05, 3.0), m_d(0.05, 2.0);
  for (int i = 0; i < 300; ++i) {
    const StationaryProfile p = solve_profile({rho_d(rng), nu_d(rng), m_d(rng), m_d(rng)});
    for (double r : interfaces(p)) {
      for (const auto *pieces : {&p.f_pieces, &p.g_pieces}) {
        const auto [left, right] = sides(*pieces, r);
        const double scale = std::max({std::abs(left), std::abs(right), 1e-300});
        // A support edge has no right piece: the left value must vanish there.
        EXPECT_LE(std::abs(left - right), 1e-10 * std::max(scale, 1.0))
            << to_string(p.config) << " r = " << r;
      }
    }
  }
}

TEST(ProfileInvariants, NonnegativeAndCompactlySupported) {
  for (const auto &params : one_per_case()) {
    const StationaryProfile p = solve_profile(params);
    for (const auto &pc : p.f_pieces) {
      EXPECT_GE(pc.value(pc.r_lo), -1e-15);
      EXPECT_GE(pc.value(pc.r_hi), -1e-15);
    }
    for (const auto &pc : p.g_pieces) {
      EXPECT_GE(pc.value(pc.r_lo), -1e-15);
      EXPECT_GE(pc.value(pc.r_hi), -1e-15);
    }
    const double R = outer_radius(p);
    EXPECT_EQ(F(p, R * 1.001), 0.0);
    EXPECT_EQ(G(p, R * 1.001), 0.0);
    EXPECT_EQ(F(p, 10.0), 0.0);
  }
}

TEST(ProfileInvariants, SupportTopologyMatchesConfiguration) {
  const auto cases = one_per_case();
  const int n = 10000;
  for (const auto &params : cases) {
    const StationaryProfile p = solve_profile(params);
    const double R = outer_radius(p) * 1.1;
    for (int i = 0; i < n; ++i) {
      const double r = R * (i + 0.5) / n;
      const double f = F(p, r), g = G(p, r);
      const double eps = 1e-9 * R;
      switch (p.config.config) {
      case Configuration::Case1: // G disk(r1) inside F disk(r2)
        if (r < p.r1 - eps) { ASSERT_GT(f, 0.0); ASSERT_GT(g, 0.0); }
        if (r > p.r1 + eps && r < p.r2 - eps) { ASSERT_GT(f, 0.0); ASSERT_EQ(g, 0.0); }
        if (r > p.r2 + eps) { ASSERT_EQ(f, 0.0); ASSERT_EQ(g, 0.0); }
        break;
      case Configuration::Case2: // F disk(r1) inside G disk(r2)
        if (r < p.r1 - eps) { ASSERT_GT(f, 0.0); ASSERT_GT(g, 0.0); }
        if (r > p.r1 + eps && r < p.r2 - eps) { ASSERT_EQ(f, 0.0); ASSERT_GT(g, 0.0); }
        if (r > p.r2 + eps) { ASSERT_EQ(f, 0.0); ASSERT_EQ(g, 0.0); }
        break;
      case Configuration::Case3: // F disk(r2), G annulus(r1, r3)
        if (r < p.r1 - eps) { ASSERT_GT(f, 0.0); ASSERT_EQ(g, 0.0); }
        if (r > p.r1 + eps && r < p.r2 - eps) { ASSERT_GT(f, 0.0); ASSERT_GT(g, 0.0); }
        if (r > p.r2 + eps && r < *p.r3 - eps) { ASSERT_EQ(f, 0.0); ASSERT_GT(g, 0.0); }
        if (r > *p.r3 + eps) { ASSERT_EQ(f, 0.0); ASSERT_EQ(g, 0.0); }
        break;
      case Configuration::Case4: // G disk(r2), F annulus(r1, r3)
        if (r < p.r1 - eps) { ASSERT_EQ(f, 0.0); ASSERT_GT(g, 0.0); }
        if (r > p.r1 + eps && r < p.r2 - eps) { ASSERT_GT(f, 0.0); ASSERT_GT(g, 0.0); }
        if (r > p.r2 + eps && r < *p.r3 - eps) { ASSERT_GT(f, 0.0); ASSERT_EQ(g, 0.0); }
        if (r > *p.r3 + eps) { ASSERT_EQ(f, 0.0); ASSERT_EQ(g, 0.0); }
        break;
      }
    }
  }
}

TEST(ProfileInvariants, Monotonicity) {
  for (double nu : {0.3, 0.5, 0.85, 0.95, 1.0}) {
    const StationaryProfile p = solve_profile({0.9, nu, 0.1, 0.1});
    double prev = F(p, 0.0);
    for (double r = 0.001; r < 1.5; r += 0.001) {
      ASSERT_LE(F(p, r), prev + 1e-15) << nu;
      prev = F(p, r);
    }
  }
  for (double nu : {1.0, 1.05, 1.1, 2.0, 5.0}) {
    const StationaryProfile p = solve_profile({0.9, nu, 0.1, 0.1});
    double prev = G(p, 0.0);
    for (double r = 0.001; r < 1.5; r += 0.001) {
      ASSERT_LE(G(p, r), prev + 1e-15) << nu;
      prev = G(p, r);
    }
  }
}

TEST(ProfileInvariants, SlopeSignsOnIntersection) {
  for (const auto &params : one_per_case()) {
    const StationaryProfile p = solve_profile(params);
    const double a = p.config.config == Configuration::Case1 ||
                             p.config.config == Configuration::Case2
                         ? 0.0
                         : p.r1;
    const double b = p.config.config == Configuration::Case1 ||
                             p.config.config == Configuration::Case2
                         ? p.r1
                         : p.r2;
    const double r = 0.5 * (a + b);
    const auto [df, dg] = eval_profile_slopes(p, r);
    const double nu = params.nu, rho = params.rho;
    if (nu != 1.0)
      EXPECT_EQ(std::signbit(df), std::signbit(nu - 1.0)) << to_string(p.config);
    EXPECT_EQ(std::signbit(dg), std::signbit(rho - nu)) << to_string(p.config);
  }
}

TEST(ProfileInvariants, VanishingFluxes) {
  for (const auto &params : one_per_case()) {
    const StationaryProfile p = solve_profile(params);
    const double rho = params.rho, nu = params.nu;
    const double R = outer_radius(p) * 1.05;
    for (int i = 0; i <= 100000; ++i) {
      const double r = R * i / 100000.0;
      const auto s = eval_profile(p, r);
      const auto [df, dg] = eval_profile_slopes(p, r);
      const double db = r / 4.0; // b = r^2 / 8
      ASSERT_LT(std::abs(s.f_value * (df + dg + db / nu)), 1e-10) << to_string(p.config) << r;
      ASSERT_LT(std::abs(s.g_value * (rho * df + dg + db)), 1e-10) << to_string(p.config) << r;
    }
  }
}

TEST(ProfileInvariants, ContinuousAcrossNu2) {
  const double nu2 = 0.95;
  const StationaryProfile below = solve_profile({0.9, nu2 - 1e-8, 0.1, 0.1});
  const StationaryProfile above = solve_profile({0.9, nu2 + 1e-8, 0.1, 0.1});
  EXPECT_EQ(below.config.config, Configuration::Case2);
  EXPECT_EQ(above.config.config, Configuration::Case1);
  for (double r = 0.0; r < 1.2; r += 1e-3) {
    EXPECT_NEAR(F(below, r), F(above, r), 1e-6);
    EXPECT_NEAR(G(below, r), G(above, r), 1e-6);
  }
}

TEST(CrossSection, EndpointsAndValidation) {
  const StationaryProfile p = solve_profile({0.9, 1.0, 0.1, 0.1});
  const auto s = sample_cross_section(p, 2, p.r2);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].r, 0.0);
  EXPECT_EQ(s[1].r, p.r2);
  EXPECT_DOUBLE_EQ(s[0].f_value, *p.c1);
  EXPECT_DOUBLE_EQ(s[0].g_value, *p.c2);
  EXPECT_GT(*p.c1, 0.0);
  EXPECT_GT(*p.c2, 0.0);
  EXPECT_THROW(sample_cross_section(p, 1, 1.0), InvalidArgument);
  EXPECT_THROW(sample_cross_section(p, 10, 0.0), InvalidArgument);
}

TEST(CrossSection, FirstConfigurationContinuityOfFAtR1) {
  const double rho = 0.9, nu = 1.05;
  const StationaryProfile p = solve_profile({rho, nu, 0.1, 0.1});
  ASSERT_EQ(p.config.config, Configuration::Case1);
  const double r1 = p.r1;
  EXPECT_NEAR(*p.c1 + (nu - 1.0) * r1 * r1 / (8.0 * nu * (1.0 - rho)),
              *p.c3 - r1 * r1 / (8.0 * nu), 1e-14);
}

TEST(CrossSection, TrapezoidMassesOnDenseSampling) {
  for (const auto &params : one_per_case()) {
    const StationaryProfile p = solve_profile(params);
    const double R = outer_radius(p);
    const auto s = sample_cross_section(p, 100000, R);
    double mf = 0.0, mg = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
      const double h = s[i].r - s[i - 1].r;
      mf += 0.5 * h * (s[i].f_value * s[i].r + s[i - 1].f_value * s[i - 1].r);
      mg += 0.5 * h * (s[i].g_value * s[i].r + s[i - 1].g_value * s[i - 1].r);
    }
    EXPECT_NEAR(2.0 * kPi * mf, params.mass_f, 1e-4);
    EXPECT_NEAR(2.0 * kPi * mg, params.mass_g, 1e-4);
  }
}

TEST(CrossSection, CsvRoundTripsValues) {
  const StationaryProfile p = solve_profile({0.9, 2.0, 0.1, 0.1});
  const auto s = sample_cross_section(p, 7, 1.0);
  std::ostringstream os;
  write_cross_section_csv(os, s);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "r,F,G");
  for (const auto &smp : s) {
    ASSERT_TRUE(std::getline(in, line));
    const auto cols = split(line, ',');
    ASSERT_EQ(cols.size(), 3u);
    EXPECT_EQ(parse_double(cols[0]), smp.r);
    EXPECT_EQ(parse_double(cols[1]), smp.f_value);
    EXPECT_EQ(parse_double(cols[2]), smp.g_value);
  }
}

TEST(Barenblatt, CapWithQuarterCurvatureHasMassTwoPiBetaSquared) {
  for (double beta : {0.01, 0.3, 2.0}) {
    const double mass = 2.0 * kPi * beta * beta;
    const BarenblattProfile b = barenblatt_reference(mass, 0.25);
    EXPECT_NEAR(b.height, beta, 1e-14 * std::max(1.0, beta));
    EXPECT_NEAR(b.radius, 2.0 * std::sqrt(beta), 1e-13);
    const double q = polar_simpson(b, b.radius, 200000);
    EXPECT_NEAR(q / mass, 1.0, 1e-9);
  }
}

TEST(Barenblatt, SinglePhaseFreshwaterRadius) {
  const double mass = 0.3, nu = 1.7;
  const BarenblattProfile b = single_phase_f_reference(mass, nu);
  EXPECT_NEAR(std::pow(b.radius, 4), 16.0 * nu * mass / kPi, 1e-13);
  EXPECT_NEAR(b(0.0), std::pow(b.radius, 2) / (8.0 * nu), 1e-14);
  EXPECT_NEAR(polar_simpson(b, b.radius, 200000) / mass, 1.0, 1e-9);
  EXPECT_THROW(barenblatt_reference(0.0, 1.0), InvalidArgument);
}

TEST(Barenblatt, LimitOfFirstConfigurationWithoutSaltwater) {
  const double mf = 0.2, nu = 1.0;
  const StationaryProfile p = solve_profile({0.9, nu, mf, 1e-14});
  const BarenblattProfile b = single_phase_f_reference(mf, nu);
  EXPECT_LT(p.r1, 1e-3);
  EXPECT_NEAR(p.r2, b.radius, 1e-10);
  for (double r = 0.0; r < 1.0; r += 0.01)
    EXPECT_NEAR(F(p, r), b(r), 1e-5);
}
