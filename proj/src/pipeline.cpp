#include "iqa/pipeline.hpp"

#include "iqa/error.hpp"
#include "iqa/exact.hpp"
#include "iqa/parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#ifndef IQA_VERSION_STRING
#define IQA_VERSION_STRING "0.0.0"
#endif

namespace iqa {

using nlohmann::ordered_json;

std::string_view library_version() { return IQA_VERSION_STRING; }

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out)
    throw IoError("cannot write " + file.string());
}

void write_json(const std::filesystem::path& file, const ordered_json& j) {
  write_text(file, j.dump(2) + "\n");
}

ordered_json sector_json(const SectorLabel& label, int n) {
  return label.to_string(n);
}

std::vector<std::string> run_meanfield_command(const ResolvedConfig& c, WorkerPool& pool) {
  const PSpinModel model{c.n_spins, c.p};
  MeanFieldOptions opts;
  opts.sample_stride = c.sample_stride;
  const auto traj = run_meanfield(c.path, c.profile, model, opts, &pool);

  std::string csv = "t,m_z,energy_density\n";
  for (const auto& s : traj.samples)
    csv += num(s.t) + "," + num(s.mz) + "," + num(s.energy_density) + "\n";
  write_text(c.output_dir / "trajectory.csv", csv);
  std::vector<std::string> files{"trajectory.csv"};

  ordered_json summary;
  summary["n"] = c.n_spins;
  summary["p"] = c.p;
  summary["profile"] = std::string(to_string(c.profile.kind));
  summary["T"] = c.path.total_time;
  summary["dt"] = c.path.dt;
  summary["initial_mz"] = traj.samples.front().mz;
  summary["final_mz"] = traj.final_mz;
  summary["final_energy_density"] = traj.samples.back().energy_density;
  summary["max_norm_error"] = traj.max_norm_error;
  if (c.reference_points > 0) {
    const auto curve =
        ground_state_reference_curve(c.path, c.profile, model, c.reference_points, opts.saddle);
    std::string ref = "t,m_z\n";
    ordered_json arr = ordered_json::array();
    for (const auto& pt : curve) {
      ref += num(pt.t) + "," + num(pt.mz) + "\n";
      arr.push_back({pt.t, pt.mz});
    }
    write_text(c.output_dir / "reference.csv", ref);
    files.push_back("reference.csv");
    summary["reference_curve"] = arr;
  }
  write_json(c.output_dir / "meanfield.json", summary);
  files.push_back("meanfield.json");
  return files;
}

std::vector<std::string> run_exact_command(const ResolvedConfig& c) {
  const ProblemModel model = build_model(c);
  ExactOptions opts;
  opts.sample_stride = c.sample_stride;
  opts.eigen = c.spectrum.eigen;
  const auto psi0 = initial_state(c.path, c.profile, model, opts.eigen);
  const auto traj = propagate(psi0, c.path, c.profile, model, opts);

  std::string csv = "t";
  for (int j = 1; j <= c.n_spins; ++j)
    csv += ",m_" + std::to_string(j);
  csv += ",energy,energy_fraction\n";
  for (const auto& s : traj.samples) {
    csv += num(s.t);
    for (double m : s.mz)
      csv += "," + num(m);
    csv += "," + num(s.energy) + "," + num(s.energy_fraction) + "\n";
  }
  write_text(c.output_dir / "trajectory.csv", csv);

  const auto ext = diagonal_extremes(model);
  ordered_json log;
  log["n"] = c.n_spins;
  log["T"] = c.path.total_time;
  log["dt"] = c.path.dt;
  log["e_min"] = ext.e_min;
  log["e_max"] = ext.e_max;
  log["final_energy"] = traj.samples.back().energy;
  log["final_energy_fraction"] = traj.samples.back().energy_fraction;
  log["max_norm_error"] = traj.max_norm_error;
  ordered_json spins = ordered_json::array();
  for (const auto& f : traj.freeze_log) {
    ordered_json s;
    s["spin"] = f.spin;
    s["frozen"] = f.frozen;
    s["t_off"] = f.t_off >= 0.0 ? ordered_json(f.t_off) : ordered_json(nullptr);
    s["t_frozen"] = f.frozen ? ordered_json(f.t_frozen) : ordered_json(nullptr);
    s["m_frozen"] = f.frozen ? ordered_json(f.m_frozen) : ordered_json(nullptr);
    spins.push_back(s);
  }
  log["spins"] = spins;
  write_json(c.output_dir / "freeze_log.json", log);
  return {"trajectory.csv", "freeze_log.json"};
}

ordered_json event_json(const CrossingEvent& e, int n) {
  ordered_json j;
  j["t_lo"] = e.t_lo;
  j["t_hi"] = e.t_hi;
  j["tau_lo"] = e.tau_lo;
  j["tau_hi"] = e.tau_hi;
  j["refined_t_over_T"] = e.refined_t;
  j["refined_tau"] = e.refined_tau;
  j["refined_energy"] = e.refined_energy;
  j["sector_a"] = sector_json(e.sector_a, n);
  j["sector_b"] = sector_json(e.sector_b, n);
  j["level_rank"] = e.level_rank;
  j["involves_ground"] = e.involves_ground;
  return j;
}

std::vector<std::string> run_spectrum_command(const ResolvedConfig& c, WorkerPool& pool) {
  const ProblemModel model = build_model(c);
  const int n = c.n_spins;
  const auto analysis = analyze_spectrum(model, c.path, c.profile, c.spectrum, &pool);

  std::string csv = "t_over_T,level_rank,energy,sector_bits\n";
  for (const auto& slice : analysis.slices)
    for (std::size_t r = 0; r < slice.levels.size(); ++r)
      csv += num(slice.t_over_T) + "," + std::to_string(r) + "," + num(slice.levels[r].energy) +
             "," + slice.levels[r].sector.to_string(n) + "\n";
  write_text(c.output_dir / "levels.csv", csv);

  ordered_json j;
  j["n"] = n;
  j["profile"] = std::string(to_string(c.profile.kind));
  j["grid_points"] = analysis.slices.size();
  j["ground_crossings"] = analysis.ground_crossings();
  j["inclusive_crossings"] = analysis.events.size();
  ordered_json events = ordered_json::array();
  for (const auto& e : analysis.events)
    events.push_back(event_json(e, n));
  j["events"] = events;
  ordered_json degs = ordered_json::array();
  for (const auto& d : analysis.degeneracies)
    degs.push_back({{"t_over_T", d.t_over_T},
                    {"sector_a", sector_json(d.sector_a, n)},
                    {"sector_b", sector_json(d.sector_b, n)}});
  j["degeneracies"] = degs;
  if (c.path.s1 > c.path.s0) {
    const auto bound = adiabatic_bound(analysis, model, c.path, c.profile, c.spectrum.degeneracy_tol);
    ordered_json b;
    b["finite"] = bound.finite;
    b["value"] = bound.finite ? ordered_json(bound.value) : ordered_json(nullptr);
    b["at_t_over_T"] = bound.at_t_over_T;
    b["h0_norm"] = bound.h0_norm;
    j["adiabatic_bound"] = b;
  }
  write_json(c.output_dir / "crossings.json", j);
  return {"levels.csv", "crossings.json"};
}

std::vector<std::string> run_fraction_command(const ResolvedConfig& c, WorkerPool& pool) {
  RecordStore store(c.output_dir, config_hash(c.ensemble, "fraction"));
  const auto result = crossing_fraction(c.ensemble, &pool, &store);
  std::string csv = "N,f,ci_low,ci_high,n_ok\n";
  for (const auto& p : result.points)
    csv += std::to_string(p.n_spins) + "," + num(p.fraction) + "," + num(p.ci.low) + "," +
           num(p.ci.high) + "," + std::to_string(p.n_ok) + "\n";
  write_text(c.output_dir / "fraction.csv", csv);
  ordered_json j = ordered_json::array();
  for (const auto& p : result.points)
    j.push_back({{"n", p.n_spins},
                 {"f", p.fraction},
                 {"ci_low", p.ci.low},
                 {"ci_high", p.ci.high},
                 {"n_ok", p.n_ok},
                 {"n_crossing", p.n_crossing},
                 {"n_failed", p.n_failed}});
  write_json(c.output_dir / "fraction.json", {{"points", j}});
  return {"fraction.csv", "fraction.json", "records.jsonl"};
}

std::vector<std::string> run_compare_command(const ResolvedConfig& c, WorkerPool& pool) {
  EnsembleConfig cfg = c.ensemble;
  cfg.exact.eigen = c.spectrum.eigen;
  RecordStore store(c.output_dir, config_hash(cfg, "compare"));
  const auto result = final_energy_comparison(cfg, &pool, &store);
  std::string csv = "T,protocol,mean_fraction,n_instances\n";
  for (const auto& p : result.points)
    csv += num(p.total_time) + "," + p.protocol + "," + num(p.mean_fraction) + "," +
           std::to_string(p.n_instances) + "\n";
  write_text(c.output_dir / "compare.csv", csv);
  ordered_json j;
  j["n"] = cfg.n_values.front();
  j["screened"] = result.screened.size();
  j["qualifying"] = result.n_qualifying;
  ordered_json plateaus = ordered_json::array();
  for (const auto& p : result.plateaus)
    plateaus.push_back({{"protocol", p.protocol}, {"value", p.value}, {"change", p.change}});
  j["plateaus"] = plateaus;
  write_json(c.output_dir / "compare.json", j);
  return {"compare.csv", "compare.json", "records.jsonl"};
}

std::vector<std::string> run_saddle_command(const ResolvedConfig& c) {
  const auto branches = solve_saddle_branches(c.saddle, FieldHistogram::step_fields(c.saddle.tau));
  const auto& best = branches.front();
  ordered_json j;
  j["s"] = c.saddle.s;
  j["tau"] = c.saddle.tau;
  j["p"] = c.saddle.p;
  j["beta"] = std::isinf(c.saddle.beta) ? ordered_json("inf") : ordered_json(c.saddle.beta);
  j["m"] = best.m;
  j["h"] = best.h;
  j["f"] = best.f;
  j["residual"] = best.residual;
  ordered_json all = ordered_json::array();
  for (const auto& b : branches)
    all.push_back({{"m", b.m}, {"h", b.h}, {"f", b.f}, {"residual", b.residual}});
  j["branches"] = all;
  write_json(c.output_dir / "summary.json", j);
  return {"summary.json"};
}

} // namespace

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error) || dynamic_cast<const DomainError*>(&error) ||
      dynamic_cast<const UnsupportedProfileError*>(&error) ||
      dynamic_cast<const CapacityError*>(&error))
    return 2;
  return 3;
}

std::string_view error_kind(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error))
    return "config";
  if (dynamic_cast<const DomainError*>(&error))
    return "domain";
  if (dynamic_cast<const UnsupportedProfileError*>(&error))
    return "unsupported_profile";
  if (dynamic_cast<const CapacityError*>(&error))
    return "capacity";
  if (dynamic_cast<const NumericError*>(&error))
    return "numeric";
  if (dynamic_cast<const IoError*>(&error))
    return "io";
  return "internal";
}

void write_error_file(const std::filesystem::path& dir, const RunResult& result) {
  if (dir.empty())
    return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    return;
  ordered_json j;
  j["status"] = "error";
  j["exit_code"] = result.exit_code;
  j["kind"] = result.error_kind;
  j["key"] = result.error_key.empty() ? ordered_json(nullptr) : ordered_json(result.error_key);
  j["message"] = result.message;
  std::ofstream out(dir / "error.json", std::ios::binary | std::ios::trunc);
  out << j.dump(2) << "\n";
}

RunResult run_pipeline(const RunConfig& config) {
  RunResult result;
  const auto start = std::chrono::steady_clock::now();
  try {
    const ResolvedConfig c = config.resolve();
    result.output_dir = c.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(c.output_dir, ec);
    if (ec)
      throw IoError("cannot create " + c.output_dir.string() + ": " + ec.message());
    std::filesystem::remove(c.output_dir / "error.json", ec);

    WorkerPool pool(resolve_thread_count(c.threads));
    std::vector<std::string> files;
    switch (c.command) {
    case Command::Meanfield:
      files = run_meanfield_command(c, pool);
      break;
    case Command::Exact:
      files = run_exact_command(c);
      break;
    case Command::Spectrum:
      files = run_spectrum_command(c, pool);
      break;
    case Command::EnsembleFraction:
      files = run_fraction_command(c, pool);
      break;
    case Command::EnsembleCompare:
      files = run_compare_command(c, pool);
      break;
    case Command::Saddle:
      files = run_saddle_command(c);
      break;
    }

    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(resolved_hash(c)));
    ordered_json run;
    run["command"] = std::string(to_string(c.command));
    run["version"] = std::string(library_version());
    run["config_hash"] = hash;
    run["config"] = ordered_json::parse(values_to_json(c.values));
    run["config_ini"] = values_to_ini(c.values);
    run["threads"] = pool.size();
    run["outputs"] = files;
    run["wall_time"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(c.output_dir / "run.json", run);
  } catch (const std::exception& e) {
    result.exit_code = exit_code_for(e);
    result.error_kind = std::string(error_kind(e));
    if (const auto* ce = dynamic_cast<const ConfigError*>(&e))
      result.error_key = ce->key();
    result.message = e.what();
    if (result.output_dir.empty()) {
      try {
        RunConfig fallback(config.command());
        result.output_dir = fallback.resolve().output_dir;
        if (!config.get("output_dir").empty()) {
          RunConfig only_dir(config.command());
          only_dir.set("output_dir", config.get("output_dir"));
          result.output_dir = only_dir.resolve().output_dir;
        }
      } catch (const std::exception&) {
      }
    }
    write_error_file(result.output_dir, result);
  }
  return result;
}

} // namespace iqa
