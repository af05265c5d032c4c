#include "iqa/operator.hpp"

#include "iqa/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace iqa {

TransverseIsingOperator::TransverseIsingOperator(std::vector<double> diagonal,
                                                 std::vector<double> bit_fields)
    : diag_(std::move(diagonal)), fields_(std::move(bit_fields)) {
  if (diag_.size() != (std::size_t{1} << fields_.size()))
    throw DomainError("operator diagonal must have 2^bits entries");
  double dmax = 0.0;
  for (double d : diag_)
    dmax = std::max(dmax, std::abs(d));
  double gsum = 0.0;
  for (double g : fields_)
    gsum += std::abs(g);
  norm_bound_ = dmax + gsum;
}

namespace {

template <typename T>
void apply_impl(const std::vector<double>& diag, const std::vector<double>& fields,
                std::span<const T> in, std::span<T> out) {
  const std::size_t dim = diag.size();
  if (in.size() != dim || out.size() != dim)
    throw DomainError("vector length does not match operator dimension");
  for (std::size_t c = 0; c < dim; ++c)
    out[c] = diag[c] * in[c];
  for (std::size_t b = 0; b < fields.size(); ++b) {
    const double g = fields[b];
    if (g == 0.0)
      continue;
    const std::size_t stride = std::size_t{1} << b;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
      T* lo = out.data() + base;
      T* hi = lo + stride;
      const T* in_lo = in.data() + base;
      const T* in_hi = in_lo + stride;
      for (std::size_t i = 0; i < stride; ++i) {
        lo[i] -= g * in_hi[i];
        hi[i] -= g * in_lo[i];
      }
    }
  }
}

// Deterministic, generic start vector for Krylov iterations.
std::vector<double> start_vector(std::size_t dim) {
  std::vector<double> v(dim);
  std::uint64_t x = 0x9e3779b97f4a7c15ULL ^ dim;
  double norm = 0.0;
  for (auto& e : v) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    e = static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
    norm += e * e;
  }
  const double inv = 1.0 / std::sqrt(norm);
  for (auto& e : v)
    e *= inv;
  return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

struct LanczosResult {
  Eigen::VectorXd ritz_values;
  Eigen::MatrixXd ritz_vectors; // in the Krylov basis
  std::vector<std::vector<double>> basis;
};

// Lanczos with full reorthogonalization. Stops once the lowest `want` Ritz
// pairs have residual below tol, or the Krylov space becomes invariant.
LanczosResult lanczos(const TransverseIsingOperator& op, int want, double tol) {
  const std::size_t dim = op.dim();
  const std::size_t max_iter = dim;
  std::vector<std::vector<double>> V;
  std::vector<double> alpha, beta;
  V.push_back(start_vector(dim));
  std::vector<double> w(dim);
  const double scale = std::max(1.0, op.norm_bound());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;

  auto solve_tridiagonal = [&](std::size_t m) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(m));
    Eigen::VectorXd e(static_cast<Eigen::Index>(m > 0 ? m - 1 : 0));
    for (std::size_t i = 0; i < m; ++i)
      d[static_cast<Eigen::Index>(i)] = alpha[i];
    for (std::size_t i = 0; i + 1 < m; ++i)
      e[static_cast<Eigen::Index>(i)] = beta[i];
    tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  };

  for (std::size_t j = 0; j < max_iter; ++j) {
    op.apply(V[j], w);
    const double a = dot(V[j], w);
    alpha.push_back(a);
    for (std::size_t i = 0; i < dim; ++i)
      w[i] -= a * V[j][i] + (j > 0 ? beta[j - 1] * V[j - 1][i] : 0.0);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : V) {
        const double c = dot(v, w);
        for (std::size_t i = 0; i < dim; ++i)
          w[i] -= c * v[i];
      }
    const double b = std::sqrt(dot(w, w));
    const std::size_t m = j + 1;
    const bool invariant = b < 1e-13 * scale || m == max_iter;
    const bool check = invariant || (m >= static_cast<std::size_t>(want) && (m % 8 == 0));
    if (check) {
      solve_tridiagonal(m);
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(want), m);
      bool converged = true;
      for (std::size_t i = 0; i < k && !invariant; ++i) {
        const double resid =
            b * std::abs(tri.eigenvectors()(static_cast<Eigen::Index>(m - 1),
                                            static_cast<Eigen::Index>(i)));
        if (resid > tol) {
          converged = false;
          break;
        }
      }
      if (invariant || converged)
        return {tri.eigenvalues(), tri.eigenvectors(), std::move(V)};
    }
    beta.push_back(b);
    std::vector<double> next(dim);
    for (std::size_t i = 0; i < dim; ++i)
      next[i] = w[i] / b;
    V.push_back(std::move(next));
  }
  throw NumericError("Lanczos iteration did not converge");
}

} // namespace

void TransverseIsingOperator::apply(std::span<const double> in, std::span<double> out) const {
  apply_impl<double>(diag_, fields_, in, out);
}

void TransverseIsingOperator::apply(std::span<const std::complex<double>> in,
                                    std::span<std::complex<double>> out) const {
  apply_impl<std::complex<double>>(diag_, fields_, in, out);
}

Eigen::MatrixXd TransverseIsingOperator::dense() const {
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    m(c, c) = diag_[static_cast<std::size_t>(c)];
    for (std::size_t b = 0; b < fields_.size(); ++b)
      m(c ^ (Eigen::Index{1} << b), c) -= fields_[b];
  }
  return m;
}

std::vector<double> lowest_eigenvalues(const TransverseIsingOperator& op, int k,
                                       const EigenOptions& options) {
  if (k < 1)
    throw DomainError("need at least one eigenvalue");
  const std::size_t dim = op.dim();
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), dim);
  std::vector<double> out;
  if (dim <= options.dense_max_dim) {
    if (dim == 1)
      return {op.diagonal()[0]};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense(), Eigen::EigenvaluesOnly);
    for (std::size_t i = 0; i < take; ++i)
      out.push_back(es.eigenvalues()[static_cast<Eigen::Index>(i)]);
    return out;
  }
  const auto res = lanczos(op, static_cast<int>(take), options.tolerance);
  const auto found = std::min<std::size_t>(take, static_cast<std::size_t>(res.ritz_values.size()));
  for (std::size_t i = 0; i < found; ++i)
    out.push_back(res.ritz_values[static_cast<Eigen::Index>(i)]);
  return out;
}

GroundState ground_state(const TransverseIsingOperator& op, const EigenOptions& options) {
  const std::size_t dim = op.dim();
  GroundState gs;
  if (dim == 1) {
    gs.energy = op.diagonal()[0];
    gs.vector = {1.0};
    gs.gap = std::numeric_limits<double>::infinity();
    return gs;
  }
  if (dim <= options.dense_max_dim) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense());
    gs.energy = es.eigenvalues()[0];
    gs.gap = es.eigenvalues()[1] - es.eigenvalues()[0];
    const Eigen::VectorXd v = es.eigenvectors().col(0);
    gs.vector.assign(v.data(), v.data() + v.size());
  } else {
    const auto res = lanczos(op, 2, options.tolerance);
    gs.energy = res.ritz_values[0];
    gs.gap = res.ritz_values.size() > 1 ? res.ritz_values[1] - res.ritz_values[0]
                                        : std::numeric_limits<double>::infinity();
    gs.vector.assign(dim, 0.0);
    for (std::size_t j = 0; j < res.basis.size() && static_cast<Eigen::Index>(j) < res.ritz_vectors.rows(); ++j) {
      const double c = res.ritz_vectors(static_cast<Eigen::Index>(j), 0);
      for (std::size_t i = 0; i < dim; ++i)
        gs.vector[i] += c * res.basis[j][i];
    }
    double norm = 0.0;
    for (double e : gs.vector)
      norm += e * e;
    const double inv = 1.0 / std::sqrt(norm);
    for (auto& e : gs.vector)
      e *= inv;
  }
  // Fix the sign so the largest component is positive.
  const auto it = std::max_element(gs.vector.begin(), gs.vector.end(),
                                   [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (*it < 0.0)
    for (auto& e : gs.vector)
      e = -e;
  return gs;
}

} // namespace iqa
