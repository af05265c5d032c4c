#ifndef IQA_EXACT_HPP
#define IQA_EXACT_HPP

#include "iqa/models.hpp"
#include "iqa/operator.hpp"
#include "iqa/schedules.hpp"

#include <complex>
#include <span>
#include <vector>

namespace iqa {

using Amplitude = std::complex<double>;

// State vector over the 2^N sigma^z basis words.
struct WaveFunction {
  int n_spins = 0;
  std::vector<Amplitude> amplitudes;

  double norm() const;
  void normalize();

  // Uniform superposition, every spin along +x.
  static WaveFunction plus_x(int n_spins);
  static WaveFunction basis(int n_spins, BasisIndex config);
  static WaveFunction from_real(int n_spins, std::span<const double> values);
};

inline constexpr int kMaxStateSpins = 24;

// out = (s H0 - sum_j gamma_j X_j) in, given the diagonal of H0.
void apply_hamiltonian(std::span<const double> energies, double s,
                       std::span<const double> gammas, std::span<const Amplitude> in,
                       std::span<Amplitude> out);
std::vector<Amplitude> apply_hamiltonian(const WaveFunction& psi, const ProblemModel& model,
                                         double s, std::span<const double> gammas);

// <sigma^z_j> for j = 1..N.
std::vector<double> magnetizations(const WaveFunction& psi);
double expected_h0(const WaveFunction& psi, std::span<const double> energies);
double expected_h0(const WaveFunction& psi, const ProblemModel& model);
// (<H0> - E_min) / (E_max - E_min). Throws DomainError if H0 is constant.
double energy_fraction(const WaveFunction& psi, std::span<const double> energies);
double energy_fraction(const WaveFunction& psi, const ProblemModel& model);

struct ExactOptions {
  // Record every k-th step; the initial and final states are always kept.
  int sample_stride = 1;
  // Stop the series once a term's norm drops below this.
  double truncation_tol = 1e-12;
  EigenOptions eigen{};
};

// psi <- exp(-i dt H) psi for a fixed H, by a Taylor series on substeps of
// length at most 0.5 / ||H||. Throws NumericError if the series stalls.
void exponential_step(std::span<const double> energies, double s, std::span<const double> gammas,
                      double dt, std::vector<Amplitude>& psi, double truncation_tol = 1e-12);

struct ExactSample {
  double t = 0.0;
  std::vector<double> mz;
  double energy = 0.0;
  double energy_fraction = 0.0;
};

struct FreezeRecord {
  int spin = 0;
  double t_off = 0.0;    // scheduled field-off time, or -1 if never reached
  double t_frozen = 0.0; // first step time at which the field is exactly zero
  double m_frozen = 0.0;
  bool frozen = false;
};

struct ExactTrajectory {
  std::vector<ExactSample> samples;
  std::vector<FreezeRecord> freeze_log;
  WaveFunction final_state;
  double max_norm_error = 0.0;
};

// Ground state at the start of the path: the analytic +x product state when
// s0 = 0 with all fields at 1, the sector-aware ground state otherwise.
WaveFunction initial_state(const AnnealPath& path, const FieldProfile& profile,
                           const ProblemModel& model, const EigenOptions& eigen = {});

// Left-endpoint stepping: each step evolves under H frozen at the start of
// the step.
ExactTrajectory propagate(const WaveFunction& psi, const AnnealPath& path,
                          const FieldProfile& profile, const ProblemModel& model,
                          const ExactOptions& options = {});

} // namespace iqa

#endif
