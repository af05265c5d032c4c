#include "iqa/error.hpp"
#include "iqa/meanfield.hpp"
#include "iqa/parallel.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

using namespace iqa;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Matrix2cd two_level(double h, double gamma) {
  Eigen::Matrix2cd H;
  H << -h, -gamma, -gamma, h;
  return H;
}

} // namespace

TEST(Saddle, FullFieldOrigin) {
  const auto sol = solve_saddle({0.0, 0.0, 3, kInf});
  EXPECT_EQ(sol.m, 0.0);
  EXPECT_EQ(sol.h, 0.0);
  EXPECT_NEAR(sol.f, -1.0, 1e-15);
}

TEST(Saddle, AllFieldsOffIsFullyOrdered) {
  for (double s : {0.3, 0.7, 1.0}) {
    const auto sol = solve_saddle({s, 1.0, 3, kInf});
    EXPECT_EQ(sol.m, 1.0);
    EXPECT_NEAR(sol.h, 3.0 * s, 1e-14);
    EXPECT_NEAR(sol.f, -s, 1e-14);
  }
}

TEST(Saddle, MatchesBruteForceOracle) {
  const std::vector<std::pair<double, double>> points{
      {0.1, 0.1}, {0.5, 0.5}, {0.9, 0.2}, {1.0, 0.0}, {0.4, 0.05}, {0.8, 0.9}, {0.25, 0.6}};
  for (auto [s, tau] : points) {
    const auto ours = solve_saddle({s, tau, 3, kInf});
    const auto ref = oracle::brute_force_saddle(s, tau, 3);
    EXPECT_NEAR(ours.m, ref.m, 1e-9) << "s=" << s << " tau=" << tau;
    EXPECT_NEAR(ours.f, ref.f, 1e-9) << "s=" << s << " tau=" << tau;
  }
}

TEST(Saddle, ResidualsAndBranchOrdering) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const SaddlePointQuery q{u(rng), u(rng), 3, kInf};
    const auto branches = solve_saddle_branches(q, FieldHistogram::step_fields(q.tau));
    ASSERT_FALSE(branches.empty());
    for (std::size_t b = 0; b < branches.size(); ++b) {
      EXPECT_LT(branches[b].residual, 1e-10);
      EXPECT_GE(branches[b].m, 0.0);
      EXPECT_LE(branches[b].m, 1.0);
      EXPECT_NEAR(branches[b].h, 3.0 * q.s * branches[b].m * branches[b].m, 1e-14);
      if (b > 0)
        EXPECT_LE(branches[b - 1].f, branches[b].f);
    }
  }
}

TEST(Saddle, FiniteBetaApproachesGroundState) {
  for (auto [s, tau] : {std::pair{0.5, 0.5}, {0.9, 0.2}, {1.0, 0.0}}) {
    const auto cold = solve_saddle({s, tau, 3, kInf});
    const auto warm = solve_saddle({s, tau, 3, 1e4});
    EXPECT_NEAR(cold.m, warm.m, 1e-3);
  }
}

TEST(Saddle, HistogramWeights) {
  const std::vector<double> g{1.0, 1.0, 0.0, 0.5};
  const auto hist = FieldHistogram::from_gammas(g);
  double total = 0.0;
  for (auto [gamma, w] : hist.bins)
    total += w;
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_EQ(hist.bins.size(), 3u);
  const auto step = FieldHistogram::step_fields(0.25);
  EXPECT_NEAR(mean_sigma_z(step, 0.0, kInf), 0.0, 1e-15);
  EXPECT_NEAR(mean_sigma_z(step, 1.0, kInf), 0.75 / std::sqrt(2.0) + 0.25, 1e-15);
}

TEST(Saddle, Validation) {
  EXPECT_THROW(solve_saddle({-0.1, 0.0, 3, kInf}), DomainError);
  EXPECT_THROW(solve_saddle({0.5, 1.1, 3, kInf}), DomainError);
  EXPECT_THROW(solve_saddle({0.5, 0.5, 3, 0.0}), DomainError);
}

TEST(SingleSpin, GroundStates) {
  const auto x = single_spin_ground_state(0.0, 1.0);
  EXPECT_NEAR(x.up.real(), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(x.down.real(), std::sqrt(0.5), 1e-15);
  const auto up = single_spin_ground_state(2.0, 0.0);
  EXPECT_EQ(up.sigma_z(), 1.0);
  const auto tilt = single_spin_ground_state(1.0, 1.0);
  EXPECT_NEAR(tilt.sigma_z(), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(tilt.norm(), 1.0, 1e-15);
}

TEST(SingleSpin, GroundStateIsLowestEigenvector) {
  for (auto [h, g] : {std::pair{0.3, 0.7}, {-1.2, 0.4}, {2.0, 2.0}}) {
    const auto st = single_spin_ground_state(h, g);
    Eigen::Vector2cd v(st.up, st.down);
    const Eigen::Matrix2cd H = two_level(h, g);
    const double e = (v.adjoint() * H * v)(0).real();
    EXPECT_NEAR(e, -std::hypot(h, g), 1e-14);
  }
}

TEST(SingleSpin, DegenerateWarns) {
  std::string seen;
  auto old = set_warning_handler([&](std::string_view m) { seen = m; });
  const auto st = single_spin_ground_state(0.0, 0.0);
  set_warning_handler(old);
  EXPECT_EQ(st.sigma_z(), 1.0);
  EXPECT_NE(seen.find("degenerate"), std::string::npos);
}

TEST(Rotate, RabiOscillation) {
  for (double dt : {0.1, 0.7, 2.3}) {
    const auto out = rotate(SpinAmplitudes{}, 0.0, 1.0, dt);
    EXPECT_NEAR(out.sigma_z(), std::cos(2.0 * dt), 1e-14);
  }
  const auto flipped = rotate(SpinAmplitudes{}, 0.0, 1.0, std::numbers::pi / 2);
  EXPECT_NEAR(flipped.sigma_z(), -1.0, 1e-14);
}

TEST(Rotate, MatchesMatrixExponential) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 20; ++i) {
    const double h = n01(rng), g = std::abs(n01(rng)), dt = std::abs(n01(rng));
    SpinAmplitudes in{{n01(rng), n01(rng)}, {n01(rng), n01(rng)}};
    const double nrm = std::sqrt(in.norm());
    in.up /= nrm;
    in.down /= nrm;
    const auto out = rotate(in, h, g, dt);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(two_level(h, g));
    Eigen::Vector2cd phase;
    for (int k = 0; k < 2; ++k)
      phase[k] = std::exp(std::complex<double>(0.0, -dt * es.eigenvalues()[k]));
    const Eigen::Vector2cd ref = es.eigenvectors() * phase.asDiagonal() *
                                 es.eigenvectors().adjoint() * Eigen::Vector2cd(in.up, in.down);
    EXPECT_NEAR(std::abs(out.up - ref[0]), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(out.down - ref[1]), 0.0, 1e-13);
    EXPECT_NEAR(out.norm(), 1.0, 1e-14);
  }
}

TEST(Rotate, ZeroFieldIsIdentity) {
  const SpinAmplitudes in{{0.6, 0.0}, {0.0, 0.8}};
  const auto out = rotate(in, 0.0, 0.0, 5.0);
  EXPECT_EQ(out.up, in.up);
  EXPECT_EQ(out.down, in.down);
}

TEST(Step, FrozenSpinsKeepTheirPopulation) {
  const FieldProfile prof{ProfileKind::Ramp, 10};
  auto state = initial_product_state({0.5, 0.5, 3, kInf}, prof);
  const auto gammas = gammas_at(prof, {0.5, 0.5});
  for (int k = 0; k < 50; ++k) {
    const auto next = step(state, 3, 0.5, gammas, 0.1);
    for (std::size_t j = 0; j < gammas.size(); ++j)
      if (gammas[j] == 0.0)
        EXPECT_NEAR(next.spins[j].sigma_z(), state.spins[j].sigma_z(), 1e-14);
    state = next;
  }
  EXPECT_NEAR(state.t, 5.0, 1e-12);
}

TEST(Step, HomogeneousSpinsStayIdentical) {
  const FieldProfile prof{ProfileKind::Homogeneous, 64};
  auto state = initial_product_state({0.2, 0.2, 3, kInf}, prof);
  for (int k = 0; k < 100; ++k) {
    const double s = 0.2 + 0.008 * k;
    const auto gammas = gammas_at(prof, {s, s});
    state = step(state, 3, s, gammas, 0.05);
  }
  for (const auto& sp : state.spins) {
    EXPECT_EQ(sp.up, state.spins.front().up);
    EXPECT_EQ(sp.down, state.spins.front().down);
  }
}

TEST(Step, RejectsLengthMismatch) {
  const FieldProfile prof{ProfileKind::Ramp, 4};
  const auto state = initial_product_state({0.5, 0.5, 3, kInf}, prof);
  const std::vector<double> g(3, 1.0);
  EXPECT_THROW(step(state, 3, 0.5, g, 0.1), DomainError);
}

TEST(InitialState, SelfConsistent) {
  const FieldProfile prof{ProfileKind::Ramp, 1000};
  const SaddlePointQuery q{0.1, 0.1, 3, kInf};
  const auto state = initial_product_state(q, prof);
  const auto g = gammas_at(prof, {0.1, 0.1});
  const auto sol = solve_saddle(q, std::span<const double>(g));
  EXPECT_NEAR(magnetization(state), sol.m, 1e-10);
  EXPECT_THROW(initial_product_state({0.1, 0.1, 3, 10.0}, prof), DomainError);
}

TEST(Run, InvariantsOnRamp) {
  const AnnealPath path{0.1, 0.1, 1.0, 1.0, 50.0, 0.05};
  const FieldProfile prof{ProfileKind::Ramp, 200};
  const auto traj = run_meanfield(path, prof, {200, 3}, {.sample_stride = 7});
  EXPECT_LT(traj.max_norm_error, 1e-12);
  EXPECT_EQ(traj.samples.front().t, 0.0);
  EXPECT_EQ(traj.samples.back().t, 50.0);
  EXPECT_EQ(traj.samples.back().mz, traj.final_mz);
  for (const auto& smp : traj.samples) {
    EXPECT_LE(std::abs(smp.mz), 1.0 + 1e-12);
    EXPECT_NEAR(smp.energy_density, -std::pow(smp.mz, 3), 1e-15);
  }
}

TEST(Run, StepRefinementIsFirstOrder) {
  const FieldProfile prof{ProfileKind::Ramp, 100};
  auto final_m = [&](double dt) {
    return run_meanfield({0.1, 0.1, 1.0, 1.0, 10.0, dt}, prof, {100, 3}).final_mz;
  };
  const double ref = final_m(0.4 / 1024);
  double prev_err = std::abs(final_m(0.025) - ref);
  for (double dt : {0.0125, 0.00625}) {
    const double err = std::abs(final_m(dt) - ref);
    EXPECT_GT(prev_err / err, 1.5) << "dt=" << dt;
    EXPECT_LT(prev_err / err, 2.5) << "dt=" << dt;
    prev_err = err;
  }
  EXPECT_LT(std::abs(final_m(0.4) - ref), 1e-3);
}

TEST(Run, ThreadCountDoesNotChangeResult) {
  const AnnealPath path{0.1, 0.1, 1.0, 1.0, 20.0, 0.05};
  const FieldProfile prof{ProfileKind::Ramp, 5000};
  const auto serial = run_meanfield(path, prof, {5000, 3});
  WorkerPool pool(3);
  const auto threaded = run_meanfield(path, prof, {5000, 3}, {}, &pool);
  ASSERT_EQ(serial.samples.size(), threaded.samples.size());
  for (std::size_t i = 0; i < serial.samples.size(); ++i)
    EXPECT_EQ(serial.samples[i].mz, threaded.samples[i].mz);
}

TEST(Run, RejectsMismatchedSizes) {
  const auto path = AnnealPath::linear(1.0, 0.1);
  EXPECT_THROW(run_meanfield(path, {ProfileKind::Ramp, 5}, {6, 3}), DomainError);
  EXPECT_THROW(run_meanfield(path, {ProfileKind::Ramp, 5}, {5, 3}, {.sample_stride = 0}),
               DomainError);
}

TEST(StepGrid, LastStepLandsOnT) {
  const AnnealPath p{0, 0, 1, 1, 1.0, 0.3};
  EXPECT_EQ(step_count(p), 4);
  EXPECT_NEAR(step_time(p, 3), 0.9, 1e-15);
  EXPECT_EQ(step_time(p, 4), 1.0);
  EXPECT_EQ(step_count(AnnealPath{0, 0, 1, 1, 1.0, 0.1}), 10);
}

TEST(Reference, MonotoneAndEndsOrdered) {
  const AnnealPath path{0.1, 0.1, 1.0, 1.0, 100.0, 0.01};
  const FieldProfile prof{ProfileKind::Ramp, 500};
  const auto curve = ground_state_reference_curve(path, prof, {500, 3}, 101);
  ASSERT_EQ(curve.size(), 101u);
  EXPECT_EQ(curve.back().t, 100.0);
  EXPECT_EQ(curve.back().mz, 1.0);
  for (std::size_t i = 1; i < curve.size(); ++i)
    EXPECT_GE(curve[i].mz, curve[i - 1].mz - 1e-12);
  EXPECT_THROW(ground_state_reference_curve(path, prof, {500, 3}, 1), DomainError);
}
