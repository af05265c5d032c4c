#include "iqa/models.hpp"

#include "iqa/error.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <limits>
#include <random>

namespace iqa {

std::string_view to_string(DeterministicKind kind) {
  return kind == DeterministicKind::Fig4 ? "fig4" : "fig5";
}

SkInstance::SkInstance(int n_spins, std::vector<double> couplings,
                       std::vector<double> local_fields,
                       std::optional<std::uint64_t> seed,
                       std::optional<DeterministicKind> kind)
    : n_(n_spins), couplings_(std::move(couplings)), fields_(std::move(local_fields)),
      seed_(seed), kind_(kind) {
  if (n_ < 1)
    throw DomainError("instance needs at least one spin");
  const auto n = static_cast<std::size_t>(n_);
  if (couplings_.size() != n * (n - 1) / 2)
    throw DomainError("instance needs exactly N(N-1)/2 couplings");
  if (fields_.size() != n)
    throw DomainError("instance needs exactly N local fields");
}

std::size_t SkInstance::pair_index(int n, int j, int k) {
  if (j > k)
    std::swap(j, k);
  // Offset of row j (1-based) in the packed upper triangle.
  const auto jj = static_cast<std::size_t>(j - 1);
  const auto nn = static_cast<std::size_t>(n);
  return jj * nn - jj * (jj + 1) / 2 + static_cast<std::size_t>(k - j - 1);
}

double SkInstance::coupling(int j, int k) const {
  if (j < 1 || k < 1 || j > n_ || k > n_ || j == k)
    throw DomainError("coupling index out of range");
  return couplings_[pair_index(n_, j, k)];
}

double SkInstance::local_field(int j) const {
  if (j < 1 || j > n_)
    throw DomainError("field index out of range");
  return fields_[static_cast<std::size_t>(j - 1)];
}

int n_spins(const ProblemModel& model) {
  return std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, PSpinModel>)
          return m.n_spins;
        else
          return m.n_spins();
      },
      model);
}

namespace {

void check_length(int n, SpinConfiguration config) {
  if (config.length != n)
    throw DomainError("configuration length " + std::to_string(config.length) +
                      " does not match N = " + std::to_string(n));
}

double pspin_energy(int n, int p, int up) {
  const double m = static_cast<double>(2 * up - n) / n;
  return -n * std::pow(m, p);
}

double sk_energy(const SkInstance& model, BasisIndex bits) {
  const int n = model.n_spins();
  const auto& J = model.couplings();
  double e = 0.0;
  std::size_t idx = 0;
  for (int j = 1; j <= n; ++j) {
    const int sj = spin_value(bits, j);
    e -= model.local_fields()[static_cast<std::size_t>(j - 1)] * sj;
    for (int k = j + 1; k <= n; ++k, ++idx)
      e -= J[idx] * sj * spin_value(bits, k);
  }
  return e;
}

} // namespace

double classical_energy(const PSpinModel& model, SpinConfiguration config) {
  check_length(model.n_spins, config);
  return pspin_energy(model.n_spins, model.p, std::popcount(config.bits));
}

double classical_energy(const SkInstance& model, SpinConfiguration config) {
  check_length(model.n_spins(), config);
  return sk_energy(model, config.bits);
}

double classical_energy(const ProblemModel& model, SpinConfiguration config) {
  return std::visit([&](const auto& m) { return classical_energy(m, config); }, model);
}

std::vector<double> diagonal_energies(const ProblemModel& model) {
  const int n = n_spins(model);
  if (n > kMaxEnumerationSpins)
    throw CapacityError("exhaustive enumeration limited to N <= " +
                        std::to_string(kMaxEnumerationSpins));
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> energies(dim);
  if (const auto* ps = std::get_if<PSpinModel>(&model)) {
    std::vector<double> by_count(static_cast<std::size_t>(n) + 1);
    for (int up = 0; up <= n; ++up)
      by_count[static_cast<std::size_t>(up)] = pspin_energy(n, ps->p, up);
    for (std::size_t c = 0; c < dim; ++c)
      energies[c] = by_count[static_cast<std::size_t>(std::popcount(c))];
    return energies;
  }
  const auto& sk = std::get<SkInstance>(model);
  // Build upward: E(c) = E(c without its top bit) + cost of raising that spin.
  energies[0] = sk_energy(sk, 0);
  for (std::size_t c = 1; c < dim; ++c) {
    const int top = std::bit_width(c); // 1-based spin index of highest set bit
    const BasisIndex prev = c & ~(BasisIndex{1} << (top - 1));
    double local = sk.local_fields()[static_cast<std::size_t>(top - 1)];
    for (int j = 1; j <= n; ++j)
      if (j != top)
        local += sk.coupling(j, top) * spin_value(prev, j);
    energies[c] = energies[prev] - 2.0 * local;
  }
  return energies;
}

DiagonalSpectrumSummary diagonal_extremes(const std::vector<double>& energies) {
  DiagonalSpectrumSummary out{std::numeric_limits<double>::infinity(),
                              -std::numeric_limits<double>::infinity(), 0};
  for (std::size_t c = 0; c < energies.size(); ++c) {
    if (energies[c] < out.e_min) {
      out.e_min = energies[c];
      out.argmin_config = c;
    }
    out.e_max = std::max(out.e_max, energies[c]);
  }
  return out;
}

DiagonalSpectrumSummary diagonal_extremes(const ProblemModel& model) {
  return diagonal_extremes(diagonal_energies(model));
}

SkInstance make_deterministic_sk(DeterministicKind kind, int n_spins) {
  const int required = kind == DeterministicKind::Fig4 ? 4 : 8;
  if (n_spins != required)
    throw DomainError(std::string(to_string(kind)) + " instance requires N = " +
                      std::to_string(required));
  const auto n = static_cast<std::size_t>(n_spins);
  std::vector<double> J;
  J.reserve(n * (n - 1) / 2);
  std::vector<double> h(n);
  for (int j = 1; j <= n_spins; ++j) {
    const double dj = j;
    for (int k = j + 1; k <= n_spins; ++k) {
      const double dk = k;
      if (kind == DeterministicKind::Fig4)
        J.push_back(std::cos(std::pow(dj, 4)) + std::cos(std::pow(dk, 4)));
      else
        J.push_back(std::cos(std::pow(dj, 5) + std::pow(dk, 5)) / 2.0);
    }
    h[static_cast<std::size_t>(j - 1)] =
        kind == DeterministicKind::Fig4 ? std::cos(dj * dj) : std::cos(dj);
  }
  return SkInstance(n_spins, std::move(J), std::move(h), std::nullopt, kind);
}

SkInstance sample_sk(int n_spins, std::uint64_t seed) {
  if (n_spins < 2)
    throw DomainError("random instances need N >= 2");
  const auto n = static_cast<std::size_t>(n_spins);
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(n_spins)));
  std::vector<double> J(n * (n - 1) / 2);
  for (auto& v : J)
    v = gauss(engine);
  std::vector<double> h(n);
  for (auto& v : h)
    v = gauss(engine);
  return SkInstance(n_spins, std::move(J), std::move(h), seed);
}

std::string to_json(const SkInstance& instance) {
  nlohmann::json doc;
  doc["n"] = instance.n_spins();
  doc["seed"] = instance.seed() ? nlohmann::json(*instance.seed()) : nlohmann::json(nullptr);
  if (instance.kind())
    doc["kind"] = std::string(to_string(*instance.kind()));
  auto& J = doc["J"] = nlohmann::json::array();
  for (int j = 1; j <= instance.n_spins(); ++j)
    for (int k = j + 1; k <= instance.n_spins(); ++k)
      J.push_back({j, k, instance.coupling(j, k)});
  doc["h"] = instance.local_fields();
  return doc.dump();
}

SkInstance sk_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed instance document: ") + e.what());
  }
  try {
    const int n = doc.at("n").get<int>();
    if (doc.contains("kind") && !doc.at("kind").is_null() && !doc.contains("J")) {
      const auto kind = doc.at("kind").get<std::string>();
      if (kind == "fig4")
        return make_deterministic_sk(DeterministicKind::Fig4, n);
      if (kind == "fig5")
        return make_deterministic_sk(DeterministicKind::Fig5, n);
      throw DomainError("unknown instance kind '" + kind + "'");
    }
    if (n < 1)
      throw DomainError("instance needs at least one spin");
    const auto nn = static_cast<std::size_t>(n);
    std::vector<double> J(nn * (nn - 1) / 2, 0.0);
    std::vector<bool> seen(J.size(), false);
    for (const auto& entry : doc.at("J")) {
      const int j = entry.at(0).get<int>();
      const int k = entry.at(1).get<int>();
      if (j < 1 || k < 1 || j > n || k > n || j == k)
        throw DomainError("coupling index out of range");
      const auto idx = SkInstance::pair_index(n, j, k);
      if (seen[idx])
        throw DomainError("duplicate coupling entry");
      seen[idx] = true;
      J[idx] = entry.at(2).get<double>();
    }
    auto h = doc.at("h").get<std::vector<double>>();
    std::optional<std::uint64_t> seed;
    if (doc.contains("seed") && !doc.at("seed").is_null())
      seed = doc.at("seed").get<std::uint64_t>();
    std::optional<DeterministicKind> kind;
    if (doc.contains("kind") && !doc.at("kind").is_null())
      kind = doc.at("kind").get<std::string>() == "fig4" ? DeterministicKind::Fig4
                                                       : DeterministicKind::Fig5;
    return SkInstance(n, std::move(J), std::move(h), seed, kind);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed instance document: ") + e.what());
  }
}

} // namespace iqa
