#include "iqa/meanfield.hpp"

#include "iqa/error.hpp"
#include "iqa/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace iqa {

void SaddlePointQuery::validate() const {
  if (!(s >= 0.0 && s <= 1.0) || !(tau >= 0.0 && tau <= 1.0))
    throw DomainError("saddle query needs s, tau in [0, 1]");
  if (p < 1)
    throw DomainError("saddle query needs p >= 1");
  if (!(beta > 0.0))
    throw DomainError("saddle query needs beta > 0");
}

FieldHistogram FieldHistogram::from_gammas(std::span<const double> gammas) {
  if (gammas.empty())
    throw DomainError("field list is empty");
  std::map<double, std::size_t> counts;
  for (double g : gammas) {
    if (!(g >= 0.0))
      throw DomainError("transverse fields must be non-negative");
    ++counts[g];
  }
  FieldHistogram out;
  const double n = static_cast<double>(gammas.size());
  for (const auto& [g, c] : counts)
    out.bins.emplace_back(g, static_cast<double>(c) / n);
  return out;
}

FieldHistogram FieldHistogram::step_fields(double tau) {
  FieldHistogram out;
  if (tau < 1.0)
    out.bins.emplace_back(1.0, 1.0 - tau);
  if (tau > 0.0)
    out.bins.emplace_back(0.0, tau);
  return out;
}

namespace {

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// -(1/beta) log(2 cosh(beta * w)) without overflow; -w at beta = infinity.
double neg_log_cosh_over_beta(double w, double beta) {
  const double a = std::abs(w);
  if (std::isinf(beta))
    return -a;
  return -a - std::log1p(std::exp(-2.0 * beta * a)) / beta;
}

double field_of(const SaddlePointQuery& q, double m) {
  return q.p * q.s * std::pow(m, q.p - 1);
}

} // namespace

double mean_sigma_z(const FieldHistogram& fields, double h, double beta) {
  const bool zero_t = std::isinf(beta);
  double total = 0.0;
  for (const auto& [g, w] : fields.bins) {
    double z;
    if (g == 0.0) {
      z = zero_t ? sgn(h) : std::tanh(beta * h);
    } else {
      const double omega = std::hypot(h, g);
      z = h / omega;
      if (!zero_t)
        z *= std::tanh(beta * omega);
    }
    total += w * z;
  }
  return total;
}

double free_energy(const FieldHistogram& fields, const SaddlePointQuery& q, double m, double h) {
  double f = -q.s * std::pow(m, q.p) + h * m;
  for (const auto& [g, w] : fields.bins)
    f += w * neg_log_cosh_over_beta(std::hypot(h, g), q.beta);
  return f;
}

std::vector<SaddleSolution> solve_saddle_branches(const SaddlePointQuery& q,
                                                  const FieldHistogram& fields,
                                                  const SaddleOptions& options) {
  q.validate();
  if (options.grid_points < 3)
    throw DomainError("saddle scan needs at least 3 grid points");
  auto excess = [&](double m) { return mean_sigma_z(fields, field_of(q, m), q.beta) - m; };
  auto make = [&](double m) {
    const double h = field_of(q, m);
    return SaddleSolution{m, h, free_energy(fields, q, m, h), std::abs(excess(m))};
  };

  constexpr double kResidualTol = 1e-10;
  std::vector<SaddleSolution> found;
  const int n = options.grid_points;
  auto grid = [&](int i) { return i == n - 1 ? 1.0 : static_cast<double>(i) / (n - 1); };
  double m_prev = grid(0);
  double g_prev = excess(m_prev);
  if (g_prev == 0.0)
    found.push_back(make(m_prev));
  for (int i = 1; i < n; ++i) {
    const double m_cur = grid(i);
    const double g_cur = excess(m_cur);
    if (g_cur == 0.0) {
      found.push_back(make(m_cur));
    } else if (g_prev != 0.0 && (g_prev < 0.0) != (g_cur < 0.0)) {
      double lo = m_prev, hi = m_cur, g_lo = g_prev;
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
          break;
        const double g_mid = excess(mid);
        if (g_mid == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((g_mid < 0.0) == (g_lo < 0.0)) {
          lo = mid;
          g_lo = g_mid;
        } else {
          hi = mid;
        }
      }
      const SaddleSolution a = make(lo), b = make(hi);
      const SaddleSolution& best = a.residual <= b.residual ? a : b;
      // A sign change across a jump of the sgn term is not a fixed point.
      if (best.residual < kResidualTol)
        found.push_back(best);
    }
    m_prev = m_cur;
    g_prev = g_cur;
  }
  if (found.empty())
    throw NumericError("saddle scan found no fixed point at s = " + std::to_string(q.s) +
                       ", tau = " + std::to_string(q.tau));
  std::stable_sort(found.begin(), found.end(),
                   [](const SaddleSolution& a, const SaddleSolution& b) { return a.f < b.f; });
  return found;
}

SaddleSolution solve_saddle(const SaddlePointQuery& q,
                            std::optional<std::span<const double>> gammas,
                            const SaddleOptions& options) {
  const auto fields =
      gammas ? FieldHistogram::from_gammas(*gammas) : FieldHistogram::step_fields(q.tau);
  return solve_saddle_branches(q, fields, options).front();
}

SpinAmplitudes single_spin_ground_state(double h, double gamma) {
  if (h == 0.0 && gamma == 0.0) {
    emit_warning("degenerate single-spin ground state (h = 0, gamma = 0); choosing |up>");
    return {};
  }
  const double omega = std::hypot(h, gamma);
  const double z = h / omega;
  // <sigma^z> = h/omega and <sigma^x> = gamma/omega >= 0.
  return {std::complex<double>(std::sqrt(0.5 * (1.0 + z)), 0.0),
          std::complex<double>(std::sqrt(0.5 * (1.0 - z)), 0.0)};
}

MeanFieldState initial_product_state(const SaddlePointQuery& q, const FieldProfile& profile) {
  if (!std::isinf(q.beta))
    throw DomainError("initial product state requires beta = infinity");
  const auto gammas = gammas_at(profile, {q.s, q.tau});
  const SaddleSolution sol = solve_saddle(q, std::span<const double>(gammas));
  MeanFieldState state;
  state.h = sol.h;
  state.spins.reserve(gammas.size());
  for (double g : gammas)
    state.spins.push_back(single_spin_ground_state(sol.h, g));
  return state;
}

namespace {

constexpr std::size_t kChunk = 1024;

std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

double chunk_sigma_z(std::span<const SpinAmplitudes> spins, std::size_t c) {
  const std::size_t begin = c * kChunk;
  const std::size_t end = std::min(spins.size(), begin + kChunk);
  double sum = 0.0;
  for (std::size_t i = begin; i < end; ++i)
    sum += spins[i].sigma_z();
  return sum;
}

double combine(std::span<const double> partials, std::size_t n) {
  double total = 0.0;
  for (double v : partials)
    total += v;
  return total / static_cast<double>(n);
}

struct Rotation {
  std::complex<double> d_up, off, d_down;
};

Rotation rotation(double h, double gamma, double dt) {
  const double omega = std::hypot(h, gamma);
  if (omega == 0.0)
    return {{1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
  const double c = std::cos(omega * dt);
  const double sn = std::sin(omega * dt) / omega;
  return {{c, sn * h}, {0.0, sn * gamma}, {c, -sn * h}};
}

SpinAmplitudes apply(const Rotation& r, const SpinAmplitudes& v) {
  return {r.d_up * v.up + r.off * v.down, r.off * v.up + r.d_down * v.down};
}

} // namespace

double magnetization(const MeanFieldState& state) {
  const std::size_t n = state.spins.size();
  if (n == 0)
    throw DomainError("empty mean-field state");
  std::vector<double> partials(chunk_count(n));
  for (std::size_t c = 0; c < partials.size(); ++c)
    partials[c] = chunk_sigma_z(state.spins, c);
  return combine(partials, n);
}

SpinAmplitudes rotate(const SpinAmplitudes& spin, double h, double gamma, double dt) {
  return apply(rotation(h, gamma, dt), spin);
}

MeanFieldState step(const MeanFieldState& state, int p, double s,
                    std::span<const double> gammas, double dt, WorkerPool* pool) {
  const std::size_t n = state.spins.size();
  if (gammas.size() != n)
    throw DomainError("field list length does not match the number of spins");
  const double m = magnetization(state);
  const double h = p * s * std::pow(m, p - 1);
  MeanFieldState next;
  next.t = state.t + dt;
  next.h = h;
  next.spins.resize(n);
  auto work = [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(n, begin + kChunk);
    double cached_gamma = -1.0;
    Rotation r{};
    for (std::size_t i = begin; i < end; ++i) {
      if (gammas[i] != cached_gamma) {
        cached_gamma = gammas[i];
        r = rotation(h, cached_gamma, dt);
      }
      next.spins[i] = apply(r, state.spins[i]);
    }
  };
  if (pool)
    pool->parallel_for(chunk_count(n), work);
  else
    for (std::size_t c = 0; c < chunk_count(n); ++c)
      work(c);
  return next;
}

int step_count(const AnnealPath& path) {
  const double ratio = path.total_time / path.dt;
  return std::max(1, static_cast<int>(std::ceil(ratio - 1e-9)));
}

double step_time(const AnnealPath& path, int k) {
  const int n = step_count(path);
  if (k >= n)
    return path.total_time;
  return std::min(path.total_time, k * path.dt);
}

MagnetizationTrajectory run_meanfield(const AnnealPath& path, const FieldProfile& profile,
                                      const PSpinModel& model, const MeanFieldOptions& options,
                                      WorkerPool* pool) {
  path.validate();
  if (profile.n_spins != model.n_spins)
    throw DomainError("profile and model disagree on N");
  if (options.sample_stride < 1)
    throw DomainError("sample stride must be >= 1");
  const PathPoint start = evaluate_path(path, 0.0);
  MeanFieldState state = initial_product_state(
      SaddlePointQuery{start.s, start.tau, model.p, std::numeric_limits<double>::infinity()},
      profile);

  MagnetizationTrajectory traj;
  const std::size_t n = state.spins.size();
  std::vector<double> partials(chunk_count(n));
  std::vector<double> gammas(n);
  const bool x_is_s = profile.kind == ProfileKind::Homogeneous;

  // Chunk partials are refreshed inside the update pass so m is read once per
  // step without a second sweep over the spins.
  auto refresh = [&](std::size_t c) { partials[c] = chunk_sigma_z(state.spins, c); };
  for (std::size_t c = 0; c < partials.size(); ++c)
    refresh(c);
  double m = combine(partials, n);

  auto record = [&](double t) {
    traj.samples.push_back({t, m, -std::pow(m, model.p)});
  };
  auto track_norm = [&] {
    for (const auto& sp : state.spins)
      traj.max_norm_error = std::max(traj.max_norm_error, std::abs(sp.norm() - 1.0));
  };
  track_norm();
  record(0.0);

  const int steps = step_count(path);
  for (int k = 0; k < steps; ++k) {
    const double t0 = step_time(path, k);
    const double t1 = step_time(path, k + 1);
    const PathPoint pt = evaluate_path(path, t0);
    const double x = x_is_s ? pt.s : pt.tau;
    for (std::size_t i = 0; i < n; ++i)
      gammas[i] = gamma(profile, static_cast<int>(i) + 1, x);
    const double h = model.p * pt.s * std::pow(m, model.p - 1);
    const double dt = t1 - t0;
    auto work = [&](std::size_t c) {
      const std::size_t begin = c * kChunk;
      const std::size_t end = std::min(n, begin + kChunk);
      double cached_gamma = -1.0;
      Rotation r{};
      for (std::size_t i = begin; i < end; ++i) {
        if (gammas[i] != cached_gamma) {
          cached_gamma = gammas[i];
          r = rotation(h, cached_gamma, dt);
        }
        state.spins[i] = apply(r, state.spins[i]);
      }
      refresh(c);
    };
    if (pool)
      pool->parallel_for(partials.size(), work);
    else
      for (std::size_t c = 0; c < partials.size(); ++c)
        work(c);
    state.t = t1;
    state.h = h;
    m = combine(partials, n);
    if ((k + 1) % options.sample_stride == 0 || k + 1 == steps) {
      track_norm();
      record(t1);
    }
  }
  traj.final_mz = m;
  return traj;
}

std::vector<ReferencePoint> ground_state_reference_curve(const AnnealPath& path,
                                                         const FieldProfile& profile,
                                                         const PSpinModel& model, int n_points,
                                                         const SaddleOptions& options) {
  path.validate();
  if (n_points < 2)
    throw DomainError("reference curve needs at least 2 points");
  if (profile.n_spins != model.n_spins)
    throw DomainError("profile and model disagree on N");
  std::vector<ReferencePoint> out;
  out.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double t =
        i == n_points - 1 ? path.total_time : path.total_time * i / (n_points - 1);
    const PathPoint pt = evaluate_path(path, t);
    const auto gammas = gammas_at(profile, pt);
    const SaddleSolution sol =
        solve_saddle(SaddlePointQuery{pt.s, pt.tau, model.p,
                                      std::numeric_limits<double>::infinity()},
                     std::span<const double>(gammas), options);
    out.push_back({t, sol.m});
  }
  return out;
}

} // namespace iqa
