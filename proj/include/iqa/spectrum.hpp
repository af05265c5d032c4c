#ifndef IQA_SPECTRUM_HPP
#define IQA_SPECTRUM_HPP

#include "iqa/models.hpp"
#include "iqa/operator.hpp"
#include "iqa/schedules.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace iqa {

class WorkerPool;

// Joint sigma^z eigenvalues of the frozen spins. Bit (j-1) of mask marks spin
// j as frozen; the matching bit of values is 1 for +1 and 0 for -1. Bits of
// values outside the mask are always zero.
struct SectorLabel {
  BasisIndex mask = 0;
  BasisIndex values = 0;

  // Same label with the mask reduced to `coarse` (a subset of mask).
  SectorLabel restrict_to(BasisIndex coarse) const { return {coarse, values & coarse}; }
  // One character per spin 1..N: '+', '-' for frozen spins, '.' otherwise.
  std::string to_string(int n_spins) const;

  friend bool operator==(const SectorLabel&, const SectorLabel&) = default;
  friend auto operator<=>(const SectorLabel&, const SectorLabel&) = default;
};

// Spins whose field is exactly zero at the given point. Homogeneous fields
// never vanish individually, so that profile always yields an empty mask.
BasisIndex frozen_mask(const FieldProfile& profile, PathPoint point);
BasisIndex frozen_mask(std::span<const double> gammas);

// Block of s*H0 - sum_j gamma_j X_j with the masked spins clamped to the
// sector values. Every masked spin must have gamma_j = 0.
TransverseIsingOperator sector_operator(std::span<const double> energies, double s,
                                        std::span<const double> gammas,
                                        const SectorLabel& sector);

// Embeds a block vector into the full 2^N basis.
std::vector<double> embed_sector_vector(std::span<const double> block, int n_spins,
                                        const SectorLabel& sector);

struct SpectrumOptions {
  int k_levels = 0;  // 0: min(2^N, 10)
  int n_grid = 0;    // 0: 40 N
  EigenOptions eigen{};
  double bisection_tol = 1e-6;
  double degeneracy_tol = 1e-12;
};

// Lowest min(k, dim) eigenvalues of one block, ascending. Clips k with a
// warning if it exceeds the block dimension.
std::vector<double> sector_spectrum(std::span<const double> energies, double s,
                                    std::span<const double> gammas, const SectorLabel& sector,
                                    int k_levels, const EigenOptions& options = {});

struct Level {
  double energy;
  SectorLabel sector;
};

struct SpectrumSlice {
  double t_over_T = 0.0;
  double s = 0.0;
  double tau = 0.0;
  BasisIndex mask = 0;
  std::vector<Level> levels; // ascending, lowest K across all sectors
};

struct CrossingEvent {
  double t_lo = 0.0; // bracket in t/T
  double t_hi = 0.0;
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  double refined_t = 0.0;
  double refined_tau = 0.0;
  double refined_energy = 0.0;
  SectorLabel sector_a; // lower of the pair at the left end of the bracket
  SectorLabel sector_b;
  int level_rank = 0;   // levels strictly below the crossing at refined_t
  bool involves_ground = false;
};

struct Degeneracy {
  double t_over_T;
  SectorLabel sector_a;
  SectorLabel sector_b;
};

struct SpectrumAnalysis {
  std::vector<SpectrumSlice> slices;
  std::vector<CrossingEvent> events;
  std::vector<Degeneracy> degeneracies;

  std::size_t ground_crossings() const;
};

// Uniform points in t/T in [0, 1] augmented by every field-off breakpoint.
std::vector<double> spectrum_grid(const AnnealPath& path, const FieldProfile& profile,
                                  int n_grid);

std::vector<SpectrumSlice> lowest_levels(const ProblemModel& model, const AnnealPath& path,
                                         const FieldProfile& profile,
                                         const SpectrumOptions& options = {},
                                         WorkerPool* pool = nullptr);

// Exact crossings between sector ground levels among the lowest K, refined by
// bisection. Quench fields jump discontinuously and are rejected.
SpectrumAnalysis analyze_spectrum(const ProblemModel& model, const AnnealPath& path,
                                  const FieldProfile& profile,
                                  const SpectrumOptions& options = {},
                                  WorkerPool* pool = nullptr);

std::vector<CrossingEvent> detect_crossings(const ProblemModel& model, const AnnealPath& path,
                                            const FieldProfile& profile,
                                            const SpectrumOptions& options = {},
                                            WorkerPool* pool = nullptr);

struct AdiabaticBound {
  bool finite = true;
  double value = 0.0;          // max over the grid of (||H0|| + sum|dGamma/ds|) / gap^2
  double at_t_over_T = 0.0;    // argmax, or location of the zero gap
  double h0_norm = 0.0;
  std::optional<CrossingEvent> crossing; // set when the gap closes exactly
};

AdiabaticBound adiabatic_bound(const ProblemModel& model, const AnnealPath& path,
                               const FieldProfile& profile, const SpectrumOptions& options = {},
                               WorkerPool* pool = nullptr);
// Same bound from an existing analysis of the path.
AdiabaticBound adiabatic_bound(const SpectrumAnalysis& analysis, const ProblemModel& model,
                               const AnnealPath& path, const FieldProfile& profile,
                               double degeneracy_tol = 1e-12);

// Ground state of s*H0 - sum gamma_j X_j on the full basis, taken from the
// lowest sector when some fields vanish. Warns on sector or level degeneracy.
std::vector<double> full_ground_state(std::span<const double> energies, int n_spins, double s,
                                      std::span<const double> gammas,
                                      const EigenOptions& options = {});

} // namespace iqa

#endif
