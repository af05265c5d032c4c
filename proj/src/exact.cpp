#include "iqa/exact.hpp"

#include "iqa/error.hpp"
#include "iqa/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace iqa {

double WaveFunction::norm() const {
  double sum = 0.0;
  for (const auto& a : amplitudes)
    sum += std::norm(a);
  return std::sqrt(sum);
}

void WaveFunction::normalize() {
  const double n = norm();
  if (!(n > 0.0))
    throw NumericError("cannot normalize a zero state");
  for (auto& a : amplitudes)
    a /= n;
}

namespace {

std::size_t dimension(int n) {
  if (n < 1 || n > kMaxStateSpins)
    throw CapacityError("state vectors support 1 <= N <= " + std::to_string(kMaxStateSpins));
  return std::size_t{1} << n;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v)
    m = std::max(m, std::abs(x));
  return m;
}

double squared_norm(std::span<const Amplitude> v) {
  double sum = 0.0;
  for (const auto& a : v)
    sum += std::norm(a);
  return sum;
}

// Taylor evaluation of exp(-i dt H) with reusable scratch vectors.
class Stepper {
public:
  Stepper(std::span<const double> energies, double tol)
      : energies_(energies), emax_(max_abs(energies)), tol_(tol), term_(energies.size()),
        next_(energies.size()) {}

  void step(double s, std::span<const double> gammas, double dt, std::vector<Amplitude>& psi) {
    double bound = std::abs(s) * emax_;
    for (double g : gammas)
      bound += std::abs(g);
    const int substeps = std::max(1, static_cast<int>(std::ceil(bound * dt / 0.5)));
    const double h = dt / substeps;
    for (int sub = 0; sub < substeps; ++sub) {
      std::copy(psi.begin(), psi.end(), term_.begin());
      int k = 1;
      for (;; ++k) {
        if (k > kMaxTerms) {
          std::ostringstream msg;
          msg << "exponential series did not converge: |H|dt = " << bound * h << " after "
              << kMaxTerms << " terms";
          throw NumericError(msg.str());
        }
        apply_hamiltonian(energies_, s, gammas, term_, next_);
        // term <- (-i h / k) H term
        const double a = h / k;
        for (std::size_t c = 0; c < psi.size(); ++c) {
          term_[c] = Amplitude(a * next_[c].imag(), -a * next_[c].real());
          psi[c] += term_[c];
        }
        if (std::sqrt(squared_norm(term_)) < tol_)
          break;
      }
    }
  }

private:
  static constexpr int kMaxTerms = 60;
  std::span<const double> energies_;
  double emax_;
  double tol_;
  std::vector<Amplitude> term_;
  std::vector<Amplitude> next_;
};

} // namespace

WaveFunction WaveFunction::plus_x(int n_spins) {
  const std::size_t dim = dimension(n_spins);
  WaveFunction psi;
  psi.n_spins = n_spins;
  psi.amplitudes.assign(dim, Amplitude(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
  return psi;
}

WaveFunction WaveFunction::basis(int n_spins, BasisIndex config) {
  const std::size_t dim = dimension(n_spins);
  if (config >= dim)
    throw DomainError("basis word out of range");
  WaveFunction psi;
  psi.n_spins = n_spins;
  psi.amplitudes.assign(dim, Amplitude{});
  psi.amplitudes[config] = 1.0;
  return psi;
}

WaveFunction WaveFunction::from_real(int n_spins, std::span<const double> values) {
  if (values.size() != dimension(n_spins))
    throw DomainError("amplitude count does not match 2^N");
  WaveFunction psi;
  psi.n_spins = n_spins;
  psi.amplitudes.assign(values.begin(), values.end());
  return psi;
}

void apply_hamiltonian(std::span<const double> energies, double s,
                       std::span<const double> gammas, std::span<const Amplitude> in,
                       std::span<Amplitude> out) {
  const std::size_t dim = energies.size();
  if (in.size() != dim || out.size() != dim || dim != (std::size_t{1} << gammas.size()))
    throw DomainError("apply_hamiltonian: inconsistent dimensions");
  for (std::size_t c = 0; c < dim; ++c)
    out[c] = s * energies[c] * in[c];
  for (std::size_t b = 0; b < gammas.size(); ++b) {
    const double g = gammas[b];
    if (g == 0.0)
      continue;
    const std::size_t stride = std::size_t{1} << b;
    for (std::size_t base = 0; base < dim; base += 2 * stride)
      for (std::size_t i = base; i < base + stride; ++i) {
        out[i] -= g * in[i + stride];
        out[i + stride] -= g * in[i];
      }
  }
}

std::vector<Amplitude> apply_hamiltonian(const WaveFunction& psi, const ProblemModel& model,
                                         double s, std::span<const double> gammas) {
  if (psi.n_spins != n_spins(model) || static_cast<int>(gammas.size()) != psi.n_spins)
    throw DomainError("state, model and fields disagree on N");
  const auto energies = diagonal_energies(model);
  std::vector<Amplitude> out(psi.amplitudes.size());
  apply_hamiltonian(energies, s, gammas, psi.amplitudes, out);
  return out;
}

std::vector<double> magnetizations(const WaveFunction& psi) {
  std::vector<double> m(static_cast<std::size_t>(psi.n_spins), 0.0);
  for (std::size_t c = 0; c < psi.amplitudes.size(); ++c) {
    const double p = std::norm(psi.amplitudes[c]);
    for (int j = 0; j < psi.n_spins; ++j)
      m[static_cast<std::size_t>(j)] += ((c >> j) & 1u) ? p : -p;
  }
  return m;
}

double expected_h0(const WaveFunction& psi, std::span<const double> energies) {
  if (energies.size() != psi.amplitudes.size())
    throw DomainError("energy table does not match the state");
  double e = 0.0;
  for (std::size_t c = 0; c < energies.size(); ++c)
    e += energies[c] * std::norm(psi.amplitudes[c]);
  return e;
}

double expected_h0(const WaveFunction& psi, const ProblemModel& model) {
  return expected_h0(psi, diagonal_energies(model));
}

double energy_fraction(const WaveFunction& psi, std::span<const double> energies) {
  const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
  if (!(*hi > *lo))
    throw DomainError("energy fraction undefined: H0 has zero spectral width");
  return (expected_h0(psi, energies) - *lo) / (*hi - *lo);
}

double energy_fraction(const WaveFunction& psi, const ProblemModel& model) {
  return energy_fraction(psi, diagonal_energies(model));
}

void exponential_step(std::span<const double> energies, double s, std::span<const double> gammas,
                      double dt, std::vector<Amplitude>& psi, double truncation_tol) {
  if (psi.size() != energies.size())
    throw DomainError("state does not match the energy table");
  Stepper(energies, truncation_tol).step(s, gammas, dt, psi);
}

WaveFunction initial_state(const AnnealPath& path, const FieldProfile& profile,
                           const ProblemModel& model, const EigenOptions& eigen) {
  const int n = n_spins(model);
  if (profile.n_spins != n)
    throw DomainError("profile and model disagree on N");
  const PathPoint start = evaluate_path(path, 0.0);
  const auto gammas = gammas_at(profile, start);
  const bool all_on = std::all_of(gammas.begin(), gammas.end(), [](double g) { return g == 1.0; });
  if (start.s == 0.0 && all_on)
    return WaveFunction::plus_x(n);
  const auto energies = diagonal_energies(model);
  return WaveFunction::from_real(n, full_ground_state(energies, n, start.s, gammas, eigen));
}

namespace {

int step_total(const AnnealPath& path) {
  return std::max(1, static_cast<int>(std::ceil(path.total_time / path.dt - 1e-9)));
}

double time_of(const AnnealPath& path, int k, int steps) {
  return k == steps ? path.total_time : k * path.dt;
}

} // namespace

ExactTrajectory propagate(const WaveFunction& psi0, const AnnealPath& path,
                          const FieldProfile& profile, const ProblemModel& model,
                          const ExactOptions& options) {
  path.validate();
  const int n = n_spins(model);
  if (psi0.n_spins != n || profile.n_spins != n)
    throw DomainError("state, profile and model disagree on N");
  if (options.sample_stride < 1)
    throw DomainError("sample_stride must be >= 1");
  const double norm0 = psi0.norm();
  if (std::abs(norm0 - 1.0) > 1e-9)
    throw DomainError("initial state is not normalized");

  const auto energies = diagonal_energies(model);
  const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
  const double width = *hi - *lo;
  const double e_min = *lo;

  ExactTrajectory out;
  WaveFunction psi = psi0;
  auto record = [&](double t) {
    ExactSample smp;
    smp.t = t;
    smp.mz = magnetizations(psi);
    smp.energy = expected_h0(psi, energies);
    smp.energy_fraction = width > 0.0 ? (smp.energy - e_min) / width : 0.0;
    out.samples.push_back(std::move(smp));
  };

  out.freeze_log.resize(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    auto& rec = out.freeze_log[static_cast<std::size_t>(j - 1)];
    rec.spin = j;
    rec.t_off = -1.0;
    if (profile.kind != ProfileKind::Homogeneous) {
      const double u = t_fraction_at_tau(path, field_off_tau(profile, j));
      if (u >= 0.0)
        rec.t_off = u * path.total_time;
    }
  }
  auto log_freezes = [&](double t, std::span<const double> gammas) {
    bool any = false;
    std::vector<double> m;
    for (int j = 0; j < n; ++j) {
      auto& rec = out.freeze_log[static_cast<std::size_t>(j)];
      if (rec.frozen || gammas[static_cast<std::size_t>(j)] != 0.0)
        continue;
      if (!any) {
        m = magnetizations(psi);
        any = true;
      }
      rec.frozen = true;
      rec.t_frozen = t;
      rec.m_frozen = m[static_cast<std::size_t>(j)];
    }
  };

  Stepper stepper(energies, options.truncation_tol);
  const int steps = step_total(path);
  record(0.0);
  for (int k = 0; k < steps; ++k) {
    const double t = time_of(path, k, steps);
    const double t_next = time_of(path, k + 1, steps);
    const PathPoint pt = evaluate_path(path, t);
    const auto gammas = gammas_at(profile, pt);
    log_freezes(t, gammas);
    stepper.step(pt.s, gammas, t_next - t, psi.amplitudes);
    const double nrm = psi.norm();
    out.max_norm_error = std::max(out.max_norm_error, std::abs(nrm - 1.0));
    for (auto& a : psi.amplitudes)
      a /= nrm;
    if ((k + 1) % options.sample_stride == 0 || k + 1 == steps)
      record(t_next);
  }
  log_freezes(path.total_time, gammas_at(profile, evaluate_path(path, path.total_time)));
  out.final_state = std::move(psi);
  return out;
}

} // namespace iqa
