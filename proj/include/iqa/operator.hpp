#ifndef IQA_OPERATOR_HPP
#define IQA_OPERATOR_HPP

#include "iqa/models.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace iqa {

// H = diag(d) - sum_b g_b X_b acting on 2^n amplitudes, where X_b flips bit b
// of the local index. Describes the full Hamiltonian (bit b = spin b+1) or
// one frozen-spin block of it (bits enumerate the free spins only).
class TransverseIsingOperator {
public:
  TransverseIsingOperator(std::vector<double> diagonal, std::vector<double> bit_fields);

  std::size_t dim() const noexcept { return diag_.size(); }
  int bits() const noexcept { return static_cast<int>(fields_.size()); }
  const std::vector<double>& diagonal() const noexcept { return diag_; }
  const std::vector<double>& bit_fields() const noexcept { return fields_; }

  // Upper bound on the operator norm: max|d| + sum|g|.
  double norm_bound() const noexcept { return norm_bound_; }

  void apply(std::span<const double> in, std::span<double> out) const;
  void apply(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;

  Eigen::MatrixXd dense() const;

private:
  std::vector<double> diag_;
  std::vector<double> fields_;
  double norm_bound_ = 0.0;
};

struct EigenOptions {
  // Blocks up to this dimension use a dense symmetric solver.
  std::size_t dense_max_dim = 256;
  double tolerance = 1e-10;
};

// Lowest min(k, dim) eigenvalues, ascending.
std::vector<double> lowest_eigenvalues(const TransverseIsingOperator& op, int k,
                                       const EigenOptions& options = {});

struct GroundState {
  double energy = 0.0;
  std::vector<double> vector;
  // Gap to the next level found; 0 flags a degenerate ground state.
  double gap = 0.0;
};

GroundState ground_state(const TransverseIsingOperator& op, const EigenOptions& options = {});

} // namespace iqa

#endif
