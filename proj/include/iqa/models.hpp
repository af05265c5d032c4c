#ifndef IQA_MODELS_HPP
#define IQA_MODELS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace iqa {

// Basis configurations are bit words: bit (j-1) set means spin j points up
// (sigma^z = +1).
using BasisIndex = std::uint64_t;

struct SpinConfiguration {
  BasisIndex bits = 0;
  int length = 0;
};

inline int spin_value(BasisIndex bits, int j) {
  return ((bits >> (j - 1)) & 1u) ? 1 : -1;
}

// Ferromagnetic p-spin model, H0 = -N m^p.
struct PSpinModel {
  int n_spins = 1;
  int p = 3;
};

enum class DeterministicKind { Fig4, Fig5 };

std::string_view to_string(DeterministicKind kind);

// Two-local Ising problem H0 = -sum_{j<k} J_jk s_j s_k - sum_j h_j s_j.
class SkInstance {
public:
  SkInstance() = default;
  // couplings are in canonical order (1,2), (1,3), ..., (1,N), (2,3), ...
  SkInstance(int n_spins, std::vector<double> couplings, std::vector<double> local_fields,
             std::optional<std::uint64_t> seed = std::nullopt,
             std::optional<DeterministicKind> kind = std::nullopt);

  int n_spins() const noexcept { return n_; }
  // 1-based, j != k, either order.
  double coupling(int j, int k) const;
  double local_field(int j) const;
  const std::vector<double>& couplings() const noexcept { return couplings_; }
  const std::vector<double>& local_fields() const noexcept { return fields_; }
  const std::optional<std::uint64_t>& seed() const noexcept { return seed_; }
  const std::optional<DeterministicKind>& kind() const noexcept { return kind_; }

  static std::size_t pair_index(int n, int j, int k);

  friend bool operator==(const SkInstance&, const SkInstance&) = default;

private:
  int n_ = 0;
  std::vector<double> couplings_;
  std::vector<double> fields_;
  std::optional<std::uint64_t> seed_;
  std::optional<DeterministicKind> kind_;
};

using ProblemModel = std::variant<PSpinModel, SkInstance>;

int n_spins(const ProblemModel& model);

double classical_energy(const PSpinModel& model, SpinConfiguration config);
double classical_energy(const SkInstance& model, SpinConfiguration config);
double classical_energy(const ProblemModel& model, SpinConfiguration config);

// Energies of all 2^N basis configurations, indexed by basis word.
std::vector<double> diagonal_energies(const ProblemModel& model);

inline constexpr int kMaxEnumerationSpins = 24;

struct DiagonalSpectrumSummary {
  double e_min = 0.0;
  double e_max = 0.0;
  BasisIndex argmin_config = 0;
};

DiagonalSpectrumSummary diagonal_extremes(const ProblemModel& model);
DiagonalSpectrumSummary diagonal_extremes(const std::vector<double>& energies);

SkInstance make_deterministic_sk(DeterministicKind kind, int n_spins);

// Couplings and fields drawn i.i.d. from N(0, 1/N), couplings first in
// canonical order, then fields.
SkInstance sample_sk(int n_spins, std::uint64_t seed);

// {"n", "seed", "kind", "J": [[j,k,value],...], "h": [...]}
std::string to_json(const SkInstance& instance);
SkInstance sk_from_json(std::string_view text);

} // namespace iqa

#endif
