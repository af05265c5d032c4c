#include "iqa/spectrum.hpp"

#include "iqa/error.hpp"
#include "iqa/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace iqa {

std::string SectorLabel::to_string(int n_spins) const {
  std::string out(static_cast<std::size_t>(n_spins), '.');
  for (int j = 1; j <= n_spins; ++j) {
    const BasisIndex bit = BasisIndex{1} << (j - 1);
    if (mask & bit)
      out[static_cast<std::size_t>(j - 1)] = (values & bit) ? '+' : '-';
  }
  return out;
}

BasisIndex frozen_mask(std::span<const double> gammas) {
  BasisIndex mask = 0;
  for (std::size_t i = 0; i < gammas.size(); ++i)
    if (gammas[i] == 0.0)
      mask |= BasisIndex{1} << i;
  return mask;
}

BasisIndex frozen_mask(const FieldProfile& profile, PathPoint point) {
  if (profile.kind == ProfileKind::Homogeneous)
    return 0;
  if (!(point.tau >= 0.0 && point.tau <= 1.0))
    throw DomainError("tau outside [0, 1]");
  const auto g = gammas_at(profile, point);
  return frozen_mask(g);
}

namespace {

std::vector<int> free_spins(int n, BasisIndex mask) {
  std::vector<int> out;
  for (int j = 1; j <= n; ++j)
    if (!(mask & (BasisIndex{1} << (j - 1))))
      out.push_back(j);
  return out;
}

BasisIndex deposit(std::size_t i, const std::vector<int>& free, BasisIndex values) {
  BasisIndex c = values;
  for (std::size_t b = 0; b < free.size(); ++b)
    if ((i >> b) & 1u)
      c |= BasisIndex{1} << (free[b] - 1);
  return c;
}

// Every sector label with the given mask, values ascending.
std::vector<SectorLabel> sectors_of(BasisIndex mask) {
  std::vector<SectorLabel> out;
  BasisIndex v = 0;
  do {
    out.push_back({mask, v});
    v = (v - mask) & mask;
  } while (v != 0);
  return out;
}

} // namespace

TransverseIsingOperator sector_operator(std::span<const double> energies, double s,
                                        std::span<const double> gammas,
                                        const SectorLabel& sector) {
  const int n = static_cast<int>(gammas.size());
  if (energies.size() != (std::size_t{1} << n))
    throw DomainError("energy table does not match the number of spins");
  if ((sector.values & ~sector.mask) != 0)
    throw DomainError("sector values set outside the frozen mask");
  for (int j = 1; j <= n; ++j)
    if ((sector.mask >> (j - 1)) & 1u)
      if (gammas[static_cast<std::size_t>(j - 1)] != 0.0)
        throw DomainError("frozen spin " + std::to_string(j) + " has a nonzero field");
  const auto free = free_spins(n, sector.mask);
  const std::size_t dim = std::size_t{1} << free.size();
  std::vector<double> diag(dim);
  for (std::size_t i = 0; i < dim; ++i)
    diag[i] = s * energies[deposit(i, free, sector.values)];
  std::vector<double> fields;
  fields.reserve(free.size());
  for (int j : free)
    fields.push_back(gammas[static_cast<std::size_t>(j - 1)]);
  return TransverseIsingOperator(std::move(diag), std::move(fields));
}

std::vector<double> embed_sector_vector(std::span<const double> block, int n_spins,
                                        const SectorLabel& sector) {
  const auto free = free_spins(n_spins, sector.mask);
  if (block.size() != (std::size_t{1} << free.size()))
    throw DomainError("block vector has the wrong length");
  std::vector<double> full(std::size_t{1} << n_spins, 0.0);
  for (std::size_t i = 0; i < block.size(); ++i)
    full[deposit(i, free, sector.values)] = block[i];
  return full;
}

std::vector<double> sector_spectrum(std::span<const double> energies, double s,
                                    std::span<const double> gammas, const SectorLabel& sector,
                                    int k_levels, const EigenOptions& options) {
  const auto op = sector_operator(energies, s, gammas, sector);
  if (k_levels < 1)
    throw DomainError("k_levels must be >= 1");
  if (static_cast<std::size_t>(k_levels) > op.dim()) {
    emit_warning("requested " + std::to_string(k_levels) + " levels from a block of dimension " +
                 std::to_string(op.dim()) + "; clipping");
    k_levels = static_cast<int>(op.dim());
  }
  return lowest_eigenvalues(op, k_levels, options);
}

std::size_t SpectrumAnalysis::ground_crossings() const {
  return static_cast<std::size_t>(std::count_if(
      events.begin(), events.end(), [](const CrossingEvent& e) { return e.involves_ground; }));
}

std::vector<double> spectrum_grid(const AnnealPath& path, const FieldProfile& profile,
                                  int n_grid) {
  if (n_grid < 2)
    throw DomainError("spectrum grid needs at least 2 points");
  std::vector<double> pts;
  for (int i = 0; i < n_grid; ++i)
    pts.push_back(i == n_grid - 1 ? 1.0 : static_cast<double>(i) / (n_grid - 1));
  if (profile.kind != ProfileKind::Homogeneous)
    for (int j = 1; j <= profile.n_spins; ++j) {
      const double u = t_fraction_at_tau(path, field_off_tau(profile, j));
      if (u >= 0.0)
        pts.push_back(u);
    }
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double u : pts)
    if (out.empty() || u - out.back() > 1e-12)
      out.push_back(u);
    else if (u == 1.0 || (u != out.back() && std::abs(u - out.back()) <= 1e-12))
      out.back() = std::max(out.back(), u);
  return out;
}

namespace {

struct Resolved {
  int n = 0;
  int k = 0;
  int n_grid = 0;
  std::vector<double> energies;
};

Resolved resolve(const ProblemModel& model, const AnnealPath& path,
                 const FieldProfile& profile, const SpectrumOptions& options) {
  path.validate();
  Resolved r;
  r.n = n_spins(model);
  if (profile.n_spins != r.n)
    throw DomainError("profile and model disagree on N");
  const long long full = 1LL << r.n;
  r.k = options.k_levels > 0 ? options.k_levels : static_cast<int>(std::min<long long>(full, 10));
  r.n_grid = options.n_grid > 0 ? options.n_grid : 40 * r.n;
  r.energies = diagonal_energies(model);
  return r;
}

struct SectorLevels {
  SectorLabel label;
  std::vector<double> energies;
};

struct PointData {
  double u = 0.0;
  PathPoint pt{};
  std::vector<double> gammas;
  BasisIndex mask = 0;
  std::vector<SectorLevels> sectors;
};

PathPoint point_at(const AnnealPath& path, double u) {
  return evaluate_path(path, u == 1.0 ? path.total_time : u * path.total_time);
}

std::vector<double> fields_for(const FieldProfile& profile, PathPoint pt) {
  return gammas_at(profile, pt);
}

std::vector<SectorLevels> all_sector_levels(const Resolved& r, double s,
                                            std::span<const double> gammas, BasisIndex mask,
                                            const EigenOptions& eig) {
  std::vector<SectorLevels> out;
  for (const auto& label : sectors_of(mask)) {
    const auto op = sector_operator(r.energies, s, gammas, label);
    const int want = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(r.k), op.dim()));
    out.push_back({label, lowest_eigenvalues(op, want, eig)});
  }
  return out;
}

std::vector<Level> merge_levels(const std::vector<SectorLevels>& sectors, int k) {
  std::vector<Level> all;
  for (const auto& sl : sectors)
    for (double e : sl.energies)
      all.push_back({e, sl.label});
  std::sort(all.begin(), all.end(), [](const Level& a, const Level& b) {
    if (a.energy != b.energy)
      return a.energy < b.energy;
    return a.sector < b.sector;
  });
  if (all.size() > static_cast<std::size_t>(k))
    all.resize(static_cast<std::size_t>(k));
  return all;
}

PointData compute_point(const Resolved& r, const AnnealPath& path, const FieldProfile& profile,
                        double u, const EigenOptions& eig) {
  PointData d;
  d.u = u;
  d.pt = point_at(path, u);
  d.gammas = fields_for(profile, d.pt);
  d.mask = profile.kind == ProfileKind::Homogeneous ? 0 : frozen_mask(d.gammas);
  d.sectors = all_sector_levels(r, d.pt.s, d.gammas, d.mask, eig);
  return d;
}

double sector_ground(const Resolved& r, const AnnealPath& path, const FieldProfile& profile,
                     double u, const SectorLabel& label, const EigenOptions& eig) {
  const PathPoint pt = point_at(path, u);
  const auto g = fields_for(profile, pt);
  return lowest_eigenvalues(sector_operator(r.energies, pt.s, g, label), 1, eig).front();
}

void analyze_bracket(const Resolved& r, const AnnealPath& path, const FieldProfile& profile,
                     const SpectrumOptions& options, const PointData& left,
                     const PointData& right, const SpectrumSlice& left_slice,
                     const SpectrumSlice& right_slice, std::vector<CrossingEvent>& events,
                     std::vector<Degeneracy>& degeneracies) {
  const BasisIndex coarse = left.mask;
  std::set<SectorLabel> tracked;
  for (const auto& lv : left_slice.levels)
    tracked.insert(lv.sector);
  for (const auto& lv : right_slice.levels)
    tracked.insert(lv.sector.restrict_to(coarse));
  if (tracked.size() < 2)
    return;

  std::map<SectorLabel, double> e_left, e_right;
  for (const auto& sl : left.sectors)
    if (!sl.energies.empty())
      e_left[sl.label] = sl.energies.front();
  for (const auto& sl : right.sectors) {
    if (sl.energies.empty())
      continue;
    const auto parent = sl.label.restrict_to(coarse);
    auto it = e_right.find(parent);
    if (it == e_right.end())
      e_right.emplace(parent, sl.energies.front());
    else
      it->second = std::min(it->second, sl.energies.front());
  }

  const std::vector<SectorLabel> list(tracked.begin(), tracked.end());
  for (std::size_t a = 0; a < list.size(); ++a)
    for (std::size_t b = a + 1; b < list.size(); ++b) {
      const SectorLabel& A = list[a];
      const SectorLabel& B = list[b];
      const double d_lo = e_left.at(B) - e_left.at(A);
      const double d_hi = e_right.at(B) - e_right.at(A);
      if (std::abs(d_lo) <= options.degeneracy_tol) {
        degeneracies.push_back({left.u, A, B});
        continue;
      }
      if (std::abs(d_hi) <= options.degeneracy_tol) {
        degeneracies.push_back({right.u, A, B});
        continue;
      }
      if ((d_lo < 0.0) == (d_hi < 0.0))
        continue;

      double lo = left.u, hi = right.u;
      const bool lo_negative = d_lo < 0.0;
      double ea = 0.0, eb = 0.0;
      while (hi - lo > options.bisection_tol) {
        const double mid = 0.5 * (lo + hi);
        ea = sector_ground(r, path, profile, mid, A, options.eigen);
        eb = sector_ground(r, path, profile, mid, B, options.eigen);
        if (((eb - ea) < 0.0) == lo_negative)
          lo = mid;
        else
          hi = mid;
      }
      CrossingEvent ev;
      ev.t_lo = left.u;
      ev.t_hi = right.u;
      ev.tau_lo = left.pt.tau;
      ev.tau_hi = right.pt.tau;
      ev.refined_t = 0.5 * (lo + hi);
      const PathPoint pt = point_at(path, ev.refined_t);
      ev.refined_tau = pt.tau;
      const auto g = fields_for(profile, pt);
      ea = lowest_eigenvalues(sector_operator(r.energies, pt.s, g, A), 1, options.eigen).front();
      eb = lowest_eigenvalues(sector_operator(r.energies, pt.s, g, B), 1, options.eigen).front();
      ev.refined_energy = 0.5 * (ea + eb);
      ev.sector_a = d_lo > 0.0 ? A : B;
      ev.sector_b = d_lo > 0.0 ? B : A;
      const double floor = std::min(ea, eb) - 1e-9;
      int rank = 0;
      for (const auto& lv : merge_levels(all_sector_levels(r, pt.s, g, coarse, options.eigen), r.k))
        if (lv.energy < floor)
          ++rank;
      ev.level_rank = rank;
      ev.involves_ground = rank == 0;
      events.push_back(ev);
    }
}

} // namespace

std::vector<SpectrumSlice> lowest_levels(const ProblemModel& model, const AnnealPath& path,
                                         const FieldProfile& profile,
                                         const SpectrumOptions& options, WorkerPool* pool) {
  const Resolved r = resolve(model, path, profile, options);
  const auto grid = spectrum_grid(path, profile, r.n_grid);
  std::vector<SpectrumSlice> slices(grid.size());
  auto work = [&](std::size_t i) {
    const PointData d = compute_point(r, path, profile, grid[i], options.eigen);
    slices[i] = {d.u, d.pt.s, d.pt.tau, d.mask, merge_levels(d.sectors, r.k)};
  };
  if (pool)
    pool->parallel_for(grid.size(), work);
  else
    for (std::size_t i = 0; i < grid.size(); ++i)
      work(i);
  return slices;
}

SpectrumAnalysis analyze_spectrum(const ProblemModel& model, const AnnealPath& path,
                                  const FieldProfile& profile, const SpectrumOptions& options,
                                  WorkerPool* pool) {
  if (profile.kind == ProfileKind::Quench)
    throw UnsupportedProfileError("crossing detection needs continuous fields; quench jumps");
  const Resolved r = resolve(model, path, profile, options);
  const auto grid = spectrum_grid(path, profile, r.n_grid);
  std::vector<PointData> points(grid.size());
  SpectrumAnalysis out;
  out.slices.resize(grid.size());
  auto compute = [&](std::size_t i) {
    points[i] = compute_point(r, path, profile, grid[i], options.eigen);
    out.slices[i] = {points[i].u, points[i].pt.s, points[i].pt.tau, points[i].mask,
                     merge_levels(points[i].sectors, r.k)};
  };
  if (pool)
    pool->parallel_for(grid.size(), compute);
  else
    for (std::size_t i = 0; i < grid.size(); ++i)
      compute(i);

  const std::size_t brackets = grid.size() - 1;
  std::vector<std::vector<CrossingEvent>> ev(brackets);
  std::vector<std::vector<Degeneracy>> dg(brackets);
  auto scan = [&](std::size_t i) {
    analyze_bracket(r, path, profile, options, points[i], points[i + 1], out.slices[i],
                    out.slices[i + 1], ev[i], dg[i]);
  };
  if (pool)
    pool->parallel_for(brackets, scan);
  else
    for (std::size_t i = 0; i < brackets; ++i)
      scan(i);
  for (std::size_t i = 0; i < brackets; ++i) {
    std::sort(ev[i].begin(), ev[i].end(), [](const CrossingEvent& a, const CrossingEvent& b) {
      if (a.refined_t != b.refined_t)
        return a.refined_t < b.refined_t;
      if (a.sector_a != b.sector_a)
        return a.sector_a < b.sector_a;
      return a.sector_b < b.sector_b;
    });
    out.events.insert(out.events.end(), ev[i].begin(), ev[i].end());
    out.degeneracies.insert(out.degeneracies.end(), dg[i].begin(), dg[i].end());
  }
  return out;
}

std::vector<CrossingEvent> detect_crossings(const ProblemModel& model, const AnnealPath& path,
                                            const FieldProfile& profile,
                                            const SpectrumOptions& options, WorkerPool* pool) {
  return analyze_spectrum(model, path, profile, options, pool).events;
}

AdiabaticBound adiabatic_bound(const ProblemModel& model, const AnnealPath& path,
                               const FieldProfile& profile, const SpectrumOptions& options,
                               WorkerPool* pool) {
  if (!(path.s1 > path.s0))
    throw DomainError("adiabatic bound needs s to increase along the path");
  SpectrumOptions opts = options;
  if (opts.k_levels != 0 && opts.k_levels < 2)
    opts.k_levels = 2;
  return adiabatic_bound(analyze_spectrum(model, path, profile, opts, pool), model, path, profile,
                         options.degeneracy_tol);
}

AdiabaticBound adiabatic_bound(const SpectrumAnalysis& analysis, const ProblemModel& model,
                               const AnnealPath& path, const FieldProfile& profile,
                               double degeneracy_tol) {
  if (!(path.s1 > path.s0))
    throw DomainError("adiabatic bound needs s to increase along the path");
  AdiabaticBound out;
  const auto extremes = diagonal_extremes(model);
  out.h0_norm = std::max(std::abs(extremes.e_min), std::abs(extremes.e_max));
  for (const auto& ev : analysis.events)
    if (ev.involves_ground) {
      out.finite = false;
      out.value = std::numeric_limits<double>::infinity();
      out.at_t_over_T = ev.refined_t;
      out.crossing = ev;
      return out;
    }
  const double dtau_ds = (path.tau1 - path.tau0) / (path.s1 - path.s0);
  for (const auto& slice : analysis.slices) {
    if (slice.levels.size() < 2)
      continue;
    const double gap = slice.levels[1].energy - slice.levels[0].energy;
    if (gap <= degeneracy_tol) {
      out.finite = false;
      out.value = std::numeric_limits<double>::infinity();
      out.at_t_over_T = slice.t_over_T;
      return out;
    }
    const double v = (out.h0_norm + total_field_slope(profile, slice.tau, dtau_ds)) / (gap * gap);
    if (v > out.value) {
      out.value = v;
      out.at_t_over_T = slice.t_over_T;
    }
  }
  return out;
}

std::vector<double> full_ground_state(std::span<const double> energies, int n_spins, double s,
                                      std::span<const double> gammas,
                                      const EigenOptions& options) {
  if (static_cast<int>(gammas.size()) != n_spins)
    throw DomainError("field list does not match N");
  const BasisIndex mask = frozen_mask(gammas);
  double best = std::numeric_limits<double>::infinity();
  double runner_up = std::numeric_limits<double>::infinity();
  GroundState best_state;
  SectorLabel best_label;
  for (const auto& label : sectors_of(mask)) {
    auto gs = ground_state(sector_operator(energies, s, gammas, label), options);
    if (gs.energy < best) {
      runner_up = std::min(best, gs.energy + gs.gap);
      best = gs.energy;
      best_label = label;
      best_state = std::move(gs);
    } else {
      runner_up = std::min(runner_up, gs.energy);
    }
  }
  runner_up = std::min(runner_up, best_state.energy + best_state.gap);
  if (runner_up - best <= 1e-12)
    emit_warning("initial ground state is degenerate; picking the lowest sector found first");
  return embed_sector_vector(best_state.vector, n_spins, best_label);
}

} // namespace iqa
