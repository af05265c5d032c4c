#include "iqa/schedules.hpp"

#include "iqa/error.hpp"

#include <cmath>
#include <string>

namespace iqa {

void AnnealPath::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(s0) || !in_unit(s1) || s0 > s1)
    throw DomainError("path requires 0 <= s0 <= s1 <= 1");
  if (!in_unit(tau0) || !in_unit(tau1) || tau0 > tau1)
    throw DomainError("path requires 0 <= tau0 <= tau1 <= 1");
  if (!(total_time > 0.0) || !std::isfinite(total_time))
    throw DomainError("path requires total time T > 0");
  if (!(dt > 0.0) || dt > total_time)
    throw DomainError("path requires 0 < dt <= T");
}

AnnealPath AnnealPath::linear(double total_time, double dt) {
  return AnnealPath{0.0, 0.0, 1.0, 1.0, total_time, dt};
}

AnnealPath AnnealPath::offset_diagonal(double total_time, double dt) {
  return AnnealPath{0.1, 0.1, 1.0, 1.0, total_time, dt};
}

PathPoint evaluate_path(const AnnealPath& path, double t) {
  if (!(t >= 0.0 && t <= path.total_time))
    throw DomainError("time " + std::to_string(t) + " outside [0, T]");
  const double u = t / path.total_time;
  // std::lerp is exact at u = 0 and u = 1.
  return {std::lerp(path.s0, path.s1, u), std::lerp(path.tau0, path.tau1, u)};
}

double t_fraction_at_tau(const AnnealPath& path, double tau) {
  if (path.tau1 == path.tau0)
    return tau == path.tau0 ? 0.0 : -1.0;
  const double u = (tau - path.tau0) / (path.tau1 - path.tau0);
  if (u < 0.0 || u > 1.0)
    return -1.0;
  return u;
}

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
  case ProfileKind::Ramp:
    return "ramp";
  case ProfileKind::Quench:
    return "quench";
  case ProfileKind::Homogeneous:
    return "homogeneous";
  }
  return "unknown";
}

ProfileKind profile_kind_from_string(std::string_view name) {
  if (name == "ramp")
    return ProfileKind::Ramp;
  if (name == "quench")
    return ProfileKind::Quench;
  if (name == "homogeneous")
    return ProfileKind::Homogeneous;
  throw DomainError("unknown profile '" + std::string(name) + "'");
}

namespace {

void check_spin(const FieldProfile& profile, int j) {
  if (profile.n_spins < 1)
    throw DomainError("profile needs at least one spin");
  if (j < 1 || j > profile.n_spins)
    throw DomainError("spin index " + std::to_string(j) + " outside 1.." +
                      std::to_string(profile.n_spins));
}

double clamp_off(double g) { return g < kFieldOffThreshold ? 0.0 : g; }

} // namespace

double gamma(const FieldProfile& profile, int j, double x) {
  check_spin(profile, j);
  const int n = profile.n_spins;
  switch (profile.kind) {
  case ProfileKind::Homogeneous:
    return clamp_off(1.0 - x);
  case ProfileKind::Quench: {
    // Compare N*tau against integers so grid values like tau = k/N land on
    // the intended branch.
    const double u = n * x;
    return u < static_cast<double>(n - j) ? 1.0 : 0.0;
  }
  case ProfileKind::Ramp: {
    const double u = n * x;
    const double lo = static_cast<double>(n - j);
    if (u < lo)
      return 1.0;
    if (u < lo + 1.0)
      return clamp_off((lo + 1.0) - u);
    return 0.0;
  }
  }
  return 0.0;
}

std::vector<double> gammas_at(const FieldProfile& profile, PathPoint point) {
  const double x = profile.kind == ProfileKind::Homogeneous ? point.s : point.tau;
  std::vector<double> out(static_cast<std::size_t>(profile.n_spins));
  for (int j = 1; j <= profile.n_spins; ++j)
    out[static_cast<std::size_t>(j - 1)] = gamma(profile, j, x);
  return out;
}

double field_off_tau(const FieldProfile& profile, int j) {
  check_spin(profile, j);
  const double n = profile.n_spins;
  switch (profile.kind) {
  case ProfileKind::Ramp:
    return (n - j + 1) / n;
  case ProfileKind::Quench:
    return (n - j) / n;
  case ProfileKind::Homogeneous:
    break;
  }
  throw UnsupportedProfileError(
      "homogeneous fields never vanish individually before s = 1");
}

double total_field_slope(const FieldProfile& profile, double tau, double dtau_ds) {
  const double n = profile.n_spins;
  switch (profile.kind) {
  case ProfileKind::Homogeneous:
    return n;
  case ProfileKind::Ramp:
    if (tau < 0.0 || tau > 1.0)
      throw DomainError("tau outside [0, 1]");
    return n * std::abs(dtau_ds);
  case ProfileKind::Quench:
    break;
  }
  throw UnsupportedProfileError("quench fields have no finite derivative");
}

} // namespace iqa
