#include "iqa/error.hpp"
#include "iqa/schedules.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace iqa;

TEST(Path, EndpointsAndMidpoint) {
  const AnnealPath p{0.1, 0.1, 1.0, 1.0, 10.0, 0.01};
  EXPECT_EQ(evaluate_path(p, 0.0).s, 0.1);
  EXPECT_EQ(evaluate_path(p, 0.0).tau, 0.1);
  EXPECT_EQ(evaluate_path(p, 10.0).s, 1.0);
  EXPECT_EQ(evaluate_path(p, 10.0).tau, 1.0);
  const AnnealPath q{0.0, 0.0, 1.0, 1.0, 4.0, 0.1};
  EXPECT_DOUBLE_EQ(evaluate_path(q, 2.0).s, 0.5);
}

TEST(Path, RejectsTimesOutsideRange) {
  const auto p = AnnealPath::linear(4.0, 0.1);
  EXPECT_THROW(evaluate_path(p, -1e-9), DomainError);
  EXPECT_THROW(evaluate_path(p, 4.0 + 1e-9), DomainError);
}

TEST(Path, Validation) {
  EXPECT_THROW((AnnealPath{0.5, 0, 0.4, 1, 1, 0.1}.validate()), DomainError);
  EXPECT_THROW((AnnealPath{0, 0, 1, 1, 1, -1}.validate()), DomainError);
  EXPECT_THROW((AnnealPath{0, 0, 1, 1, 1, 2}.validate()), DomainError);
  EXPECT_THROW((AnnealPath{0, 0, 1, 1, 0, 0.1}.validate()), DomainError);
  EXPECT_NO_THROW(AnnealPath::offset_diagonal(10, 0.01).validate());
}

TEST(Path, OffsetDiagonalPreset) {
  const auto p = AnnealPath::offset_diagonal(10, 0.01);
  EXPECT_EQ(p.s0, 0.1);
  EXPECT_EQ(p.tau0, 0.1);
  EXPECT_EQ(p.s1, 1.0);
  EXPECT_EQ(p.tau1, 1.0);
}

TEST(Gamma, RampExamples) {
  const FieldProfile ramp{ProfileKind::Ramp, 4};
  EXPECT_EQ(gamma(ramp, 1, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(gamma(ramp, 4, 0.125), 0.5);
  EXPECT_EQ(gamma(ramp, 4, 0.25), 0.0);
  EXPECT_EQ(gamma(ramp, 1, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(gamma(ramp, 3, 0.375), 0.5);
}

TEST(Gamma, QuenchExamples) {
  const FieldProfile q{ProfileKind::Quench, 4};
  EXPECT_EQ(gamma(q, 4, 0.0), 0.0);
  EXPECT_EQ(gamma(q, 3, 0.0), 1.0);
  EXPECT_EQ(gamma(q, 3, 0.25 - 1e-12), 1.0);
  EXPECT_EQ(gamma(q, 3, 0.25), 0.0);
  EXPECT_EQ(gamma(q, 1, 0.75), 0.0);
  EXPECT_EQ(gamma(q, 1, 0.7499), 1.0);
}

TEST(Gamma, Homogeneous) {
  const FieldProfile h{ProfileKind::Homogeneous, 3};
  for (int j = 1; j <= 3; ++j) {
    EXPECT_DOUBLE_EQ(gamma(h, j, 0.3), 0.7);
    EXPECT_EQ(gamma(h, j, 1.0), 0.0);
  }
}

TEST(Gamma, SpinIndexOutOfRange) {
  const FieldProfile ramp{ProfileKind::Ramp, 4};
  EXPECT_THROW(gamma(ramp, 0, 0.5), DomainError);
  EXPECT_THROW(gamma(ramp, 5, 0.5), DomainError);
}

TEST(Gamma, ClampsTinyValues) {
  const FieldProfile ramp{ProfileKind::Ramp, 3};
  // One ulp below the field-off point the ramp value is ~1e-16.
  const double tau = std::nextafter(1.0, 0.0);
  EXPECT_EQ(gamma(ramp, 1, tau), 0.0);
  EXPECT_GT(gamma(ramp, 1, 1.0 - 1e-12), 0.0);
}

TEST(FieldOff, Examples) {
  EXPECT_DOUBLE_EQ(field_off_tau({ProfileKind::Ramp, 4}, 4), 0.25);
  EXPECT_DOUBLE_EQ(field_off_tau({ProfileKind::Quench, 4}, 4), 0.0);
  EXPECT_DOUBLE_EQ(field_off_tau({ProfileKind::Ramp, 4}, 1), 1.0);
  EXPECT_THROW(field_off_tau({ProfileKind::Homogeneous, 4}, 1), UnsupportedProfileError);
}

TEST(FieldOff, IsTheFirstZero) {
  for (auto kind : {ProfileKind::Ramp, ProfileKind::Quench}) {
    const FieldProfile prof{kind, 7};
    for (int j = 1; j <= 7; ++j) {
      const double t = field_off_tau(prof, j);
      EXPECT_EQ(gamma(prof, j, t), 0.0);
      if (t > 1e-9)
        EXPECT_GT(gamma(prof, j, t - 1e-9), 0.0);
    }
  }
}

// Continuity, monotonicity and the Lipschitz bound on a fine grid.
TEST(GammaProperty, RampContinuousMonotoneLipschitz) {
  for (int n : {1, 2, 5, 16}) {
    const FieldProfile ramp{ProfileKind::Ramp, n};
    const int steps = 4000;
    for (int j = 1; j <= n; ++j) {
      double prev = gamma(ramp, j, 0.0);
      EXPECT_EQ(prev, 1.0);
      for (int i = 1; i <= steps; ++i) {
        const double tau = static_cast<double>(i) / steps;
        const double g = gamma(ramp, j, tau);
        EXPECT_LE(g, prev + 1e-15);
        EXPECT_LE(std::abs(g - prev), n * (1.0 / steps) + 1e-12);
        EXPECT_GE(g, 0.0);
        EXPECT_LE(g, 1.0);
        prev = g;
      }
      EXPECT_EQ(prev, 0.0);
    }
  }
}

TEST(GammaProperty, FrozenCountAtMultiplesOfOneOverN) {
  for (int n : {1, 3, 4, 10, 33}) {
    const FieldProfile ramp{ProfileKind::Ramp, n};
    for (int k = 0; k <= n; ++k) {
      const double tau = static_cast<double>(k) / n;
      int zeros = 0;
      for (double g : gammas_at(ramp, {0.0, tau}))
        zeros += g == 0.0;
      EXPECT_EQ(zeros, k) << "n=" << n << " k=" << k;
    }
  }
}

TEST(Slope, TotalFieldSlope) {
  EXPECT_DOUBLE_EQ(total_field_slope({ProfileKind::Homogeneous, 6}, 0.3, 1.0), 6.0);
  EXPECT_DOUBLE_EQ(total_field_slope({ProfileKind::Ramp, 6}, 0.3, 1.0), 6.0);
  EXPECT_DOUBLE_EQ(total_field_slope({ProfileKind::Ramp, 6}, 0.3, 0.5), 3.0);
  EXPECT_THROW(total_field_slope({ProfileKind::Quench, 6}, 0.3, 1.0), UnsupportedProfileError);
}

TEST(Profile, Names) {
  EXPECT_EQ(profile_kind_from_string("ramp"), ProfileKind::Ramp);
  EXPECT_EQ(profile_kind_from_string("quench"), ProfileKind::Quench);
  EXPECT_EQ(profile_kind_from_string("homogeneous"), ProfileKind::Homogeneous);
  EXPECT_EQ(to_string(ProfileKind::Quench), "quench");
  EXPECT_THROW(profile_kind_from_string("linear"), Error);
}

TEST(Path, TauFraction) {
  const auto p = AnnealPath::offset_diagonal(10, 0.1);
  EXPECT_NEAR(t_fraction_at_tau(p, 0.55), 0.5, 1e-15);
  EXPECT_LT(t_fraction_at_tau(p, 0.05), 0.0);
}
