// Independent reference implementations used only by the tests.
#ifndef IQA_TEST_ORACLES_HPP
#define IQA_TEST_ORACLES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;

// sigma_x on spin j (1-based) of n, built from Kronecker products. Spin j is
// bit j-1 of the basis index, so spin n is the most significant factor.
inline Mat pauli_x(int n, int j) {
  Mat x(2, 2);
  x << 0, 1, 1, 0;
  Mat out = Mat::Identity(1, 1);
  for (int k = n; k >= 1; --k) {
    const Mat f = k == j ? x : Mat::Identity(2, 2);
    Mat next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index a = 0; a < out.rows(); ++a)
      for (Eigen::Index b = 0; b < out.cols(); ++b)
        next.block(a * 2, b * 2, 2, 2) = out(a, b) * f;
    out = next;
  }
  return out;
}

inline Mat pauli_z(int n, int j) {
  Mat z = Mat::Zero(1 << n, 1 << n);
  for (int c = 0; c < (1 << n); ++c)
    z(c, c) = ((c >> (j - 1)) & 1) ? 1.0 : -1.0;
  return z;
}

// -sum J_jk z_j z_k - sum h_j z_j from explicit spin values.
inline double sk_energy(int n, const std::vector<std::vector<double>>& J,
                        const std::vector<double>& h, int config) {
  std::vector<int> z(n);
  for (int j = 0; j < n; ++j)
    z[j] = ((config >> j) & 1) ? 1 : -1;
  double e = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      e -= J[j][k] * z[j] * z[k];
  for (int j = 0; j < n; ++j)
    e -= h[j] * z[j];
  return e;
}

inline Mat dense_hamiltonian(const std::vector<double>& energies, double s,
                             const std::vector<double>& gammas) {
  const int n = static_cast<int>(gammas.size());
  Mat H = Mat::Zero(1 << n, 1 << n);
  for (int c = 0; c < (1 << n); ++c)
    H(c, c) = s * energies[c];
  for (int j = 1; j <= n; ++j)
    H -= gammas[j - 1] * pauli_x(n, j);
  return H;
}

// exp(-i dt H) psi through the eigendecomposition of H.
inline CVec dense_step(const Mat& H, const CVec& psi, double dt) {
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  const Eigen::MatrixXcd V = es.eigenvectors().cast<std::complex<double>>();
  CVec coeff = V.adjoint() * psi;
  for (Eigen::Index i = 0; i < coeff.size(); ++i)
    coeff[i] *= std::exp(std::complex<double>(0.0, -dt * es.eigenvalues()[i]));
  return V * coeff;
}

inline Eigen::VectorXd dense_spectrum(const Mat& H) {
  return Eigen::SelfAdjointEigenSolver<Mat>(H, Eigen::EigenvaluesOnly).eigenvalues();
}

// Zero-temperature step-field saddle point by brute force: every grid point
// on m in [0, 1] where the self-consistency map changes sign is a fixed
// point; the one with the lowest free energy wins.
struct Saddle {
  double m;
  double h;
  double f;
};

inline Saddle brute_force_saddle(double s, double tau, int p, int points = 1000001) {
  auto field = [&](double m) { return p * s * std::pow(m, p - 1); };
  auto map = [&](double m) {
    const double h = field(m);
    const double sg = h > 0 ? 1.0 : (h < 0 ? -1.0 : 0.0);
    return (1 - tau) * h / std::sqrt(h * h + 1) + tau * sg - m;
  };
  auto fe = [&](double m) {
    const double h = field(m);
    return -s * std::pow(m, p) + h * m - (1 - tau) * std::sqrt(h * h + 1) - tau * std::abs(h);
  };
  Saddle best{0.0, 0.0, 1e300};
  double prev = map(0.0);
  if (prev == 0.0)
    best = {0.0, field(0.0), fe(0.0)};
  for (int i = 1; i < points; ++i) {
    const double m = static_cast<double>(i) / (points - 1);
    const double g = map(m);
    if (g == 0.0 || (g > 0) != (prev > 0)) {
      double lo = static_cast<double>(i - 1) / (points - 1), hi = m;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((map(mid) > 0) == (map(lo) > 0))
          lo = mid;
        else
          hi = mid;
      }
      const double root = 0.5 * (lo + hi);
      // A jump of the sgn term is not a fixed point.
      if (std::abs(map(root)) < 1e-9 && fe(root) < best.f)
        best = {root, field(root), fe(root)};
    }
    prev = g;
  }
  return best;
}

} // namespace oracle

#endif
