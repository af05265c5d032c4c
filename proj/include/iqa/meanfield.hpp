#ifndef IQA_MEANFIELD_HPP
#define IQA_MEANFIELD_HPP

#include "iqa/models.hpp"
#include "iqa/schedules.hpp"

#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace iqa {

class WorkerPool;

// Static saddle point of the p-spin free energy in a transverse-field
// configuration. beta = +infinity selects the ground-state equations.
struct SaddlePointQuery {
  double s = 0.0;
  double tau = 0.0;
  int p = 3;
  double beta = std::numeric_limits<double>::infinity();

  void validate() const;
};

struct SaddleSolution {
  double m = 0.0;
  double h = 0.0;
  double f = 0.0;
  // |m - <sigma^z>(h)|; the h equation holds exactly by construction.
  double residual = 0.0;
};

struct SaddleOptions {
  // Uniform scan points on m in [0, 1] used to bracket fixed points.
  int grid_points = 20001;
};

// Distinct transverse fields with their fractions of the spins.
struct FieldHistogram {
  std::vector<std::pair<double, double>> bins; // (gamma, weight), weights sum to 1

  static FieldHistogram from_gammas(std::span<const double> gammas);
  // Step-field specialization: weight 1 - tau at gamma = 1, weight tau at 0.
  static FieldHistogram step_fields(double tau);
};

// Mean <sigma^z> of independent spins in longitudinal field h.
double mean_sigma_z(const FieldHistogram& fields, double h, double beta);
// Free-energy density at (m, h).
double free_energy(const FieldHistogram& fields, const SaddlePointQuery& q, double m, double h);

// Every self-consistent solution with m >= 0, sorted by ascending f.
std::vector<SaddleSolution> solve_saddle_branches(const SaddlePointQuery& q,
                                                  const FieldHistogram& fields,
                                                  const SaddleOptions& options = {});

// Minimum-f solution. Without gammas the step-field weights (1 - tau, tau)
// are used.
SaddleSolution solve_saddle(const SaddlePointQuery& q,
                            std::optional<std::span<const double>> gammas = std::nullopt,
                            const SaddleOptions& options = {});

// |psi_j> = up |up> + down |down> in the sigma^z basis.
struct SpinAmplitudes {
  std::complex<double> up{1.0, 0.0};
  std::complex<double> down{0.0, 0.0};

  double sigma_z() const { return std::norm(up) - std::norm(down); }
  double norm() const { return std::norm(up) + std::norm(down); }
};

struct MeanFieldState {
  double t = 0.0;
  std::vector<SpinAmplitudes> spins;
  double h = 0.0; // mean field used by the most recent step (or the saddle h)
};

// Ground state of -h sigma^z - gamma sigma^x with real, non-negative
// amplitudes. h = gamma = 0 is degenerate: picks |up> and warns.
SpinAmplitudes single_spin_ground_state(double h, double gamma);

// Product of single-spin ground states in the self-consistent field of the
// beta = infinity saddle point at (q.s, q.tau).
MeanFieldState initial_product_state(const SaddlePointQuery& q, const FieldProfile& profile);

// Magnetization (1/N) sum_j <sigma^z_j>, summed in fixed-size chunks in a
// fixed order so the result does not depend on the thread count.
double magnetization(const MeanFieldState& state);

// Exact propagator exp(-i dt (-h sigma^z - gamma sigma^x)) applied to one spin.
SpinAmplitudes rotate(const SpinAmplitudes& spin, double h, double gamma, double dt);

// One left-endpoint step: m and h = p s m^{p-1} from the current state, then
// every spin advanced by its exact 2x2 propagator over dt.
MeanFieldState step(const MeanFieldState& state, int p, double s,
                    std::span<const double> gammas, double dt, WorkerPool* pool = nullptr);

struct MagnetizationSample {
  double t;
  double mz;
  double energy_density;
};

struct MagnetizationTrajectory {
  std::vector<MagnetizationSample> samples;
  double final_mz = 0.0;
  double max_norm_error = 0.0;
};

struct MeanFieldOptions {
  // Record every k-th step (the initial and final states are always kept).
  int sample_stride = 10;
  SaddleOptions saddle{};
};

MagnetizationTrajectory run_meanfield(const AnnealPath& path, const FieldProfile& profile,
                                      const PSpinModel& model,
                                      const MeanFieldOptions& options = {},
                                      WorkerPool* pool = nullptr);

struct ReferencePoint {
  double t;
  double mz;
};

// Instantaneous ground-state magnetization at n_points uniformly spaced times.
std::vector<ReferencePoint> ground_state_reference_curve(const AnnealPath& path,
                                                         const FieldProfile& profile,
                                                         const PSpinModel& model, int n_points,
                                                         const SaddleOptions& options = {});

// Number of steps and the time of step k for a path: t_k = k dt, the last
// step shortened to land on T.
int step_count(const AnnealPath& path);
double step_time(const AnnealPath& path, int k);

} // namespace iqa

#endif
