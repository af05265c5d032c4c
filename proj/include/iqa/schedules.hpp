#ifndef IQA_SCHEDULES_HPP
#define IQA_SCHEDULES_HPP

#include <string_view>
#include <vector>

namespace iqa {

// Affine annealing path: s(t) and tau(t) move linearly from (s0, tau0) at
// t = 0 to (s1, tau1) at t = total_time, advanced in steps of dt.
struct AnnealPath {
  double s0 = 0.0;
  double tau0 = 0.0;
  double s1 = 1.0;
  double tau1 = 1.0;
  double total_time = 10.0;
  double dt = 0.1;

  // Throws DomainError unless 0 <= s0 <= s1 <= 1, 0 <= tau0 <= tau1 <= 1,
  // total_time > 0 and 0 < dt <= total_time.
  void validate() const;

  // Path with s(t) = tau(t) = t / T.
  static AnnealPath linear(double total_time, double dt);
  // Path with s(t) = tau(t) = 1/10 + 9t/(10T).
  static AnnealPath offset_diagonal(double total_time, double dt);
};

struct PathPoint {
  double s;
  double tau;
};

PathPoint evaluate_path(const AnnealPath& path, double t);

// Fraction t/T at which tau(t) reaches the given value, or a negative number
// if tau never reaches it on [0, T].
double t_fraction_at_tau(const AnnealPath& path, double tau);

enum class ProfileKind { Ramp, Quench, Homogeneous };

std::string_view to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(std::string_view name);

struct FieldProfile {
  ProfileKind kind = ProfileKind::Ramp;
  int n_spins = 1;
};

// Field magnitudes below this are reported as exactly zero.
inline constexpr double kFieldOffThreshold = 1e-15;

// Transverse field on spin j (1-based). For Ramp and Quench the argument is
// tau; for Homogeneous it is s and the result is 1 - s.
double gamma(const FieldProfile& profile, int j, double x);

// All N fields at a point on the path, choosing tau or s by profile kind.
std::vector<double> gammas_at(const FieldProfile& profile, PathPoint point);

// Smallest tau at which Gamma_j vanishes: (N-j+1)/N for Ramp, (N-j)/N for
// Quench. Throws UnsupportedProfileError for Homogeneous.
double field_off_tau(const FieldProfile& profile, int j);

// Sum over spins of |dGamma_j/ds| along a path with the given dtau/ds.
// Ramp: exactly one spin ramps at slope N in tau. Homogeneous: N.
// Quench has no finite derivative and throws UnsupportedProfileError.
double total_field_slope(const FieldProfile& profile, double tau, double dtau_ds);

} // namespace iqa

#endif
