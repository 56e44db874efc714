#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "degenwave/errors.hpp"
#include "degenwave/output.hpp"
#include "degenwave/pipeline.hpp"

namespace fs = std::filesystem;
using namespace degenwave;
using nlohmann::json;

namespace {

// CSV plus a .meta.json sidecar, or a single JSON document when output.format = "json".
void emit_series(const RunConfig& cfg, const std::string& stem, const std::string& csv, json as_json) {
  const fs::path dir = resolve_out_dir(cfg);
  if (cfg.output.format == "json") {
    as_json["config_hash"] = config_hash(cfg);
    write_json(dir / (stem + ".json"), as_json);
  } else {
    write_file(dir / (stem + ".csv"), csv);
    write_json(dir / (stem + ".meta.json"), artifact_meta(stem + ".csv", cfg));
  }
}

void report(const RunConfig& cfg, const std::string& name, const json& summary) {
  write_json(resolve_out_dir(cfg) / name, summary);
  std::cout << summary.dump(2) << "\n";
}

int cmd_check(const RunConfig& cfg) {
  std::cout << run_check(cfg).dump(2) << "\n";
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  const SimulationTrace trace = run_simulation(cfg);
  emit_series(cfg, "trace", trace_csv(trace), trace_json(trace));
  std::cout << json{{"records", trace.size()},
                    {"energy_initial", trace.energy.front()},
                    {"energy_final", trace.energy.back()},
                    {"config_hash", trace.config_hash},
                    {"out_dir", resolve_out_dir(cfg).generic_string()}}
                   .dump(2)
            << "\n";
  return 0;
}

int cmd_spectrum(const RunConfig& cfg) {
  const SpectrumResult r = run_spectrum(cfg);
  json re = json::array(), im = json::array();
  for (const auto& z : r.spectrum.eigenvalues) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  emit_series(cfg, "eigenvalues", eigenvalues_csv(r.spectrum), {{"re", re}, {"im", im}});
  report(cfg, "spectrum.json",
         {{"abscissa", r.spectrum.abscissa},
          {"max_residual", r.spectrum.max_residual},
          {"dof", r.dof},
          {"band", kDampingBand},
          {"band_min_damping", r.band_damping},
          {"config_hash", config_hash(cfg)}});
  return 0;
}

int cmd_resolvent(const RunConfig& cfg) {
  const ResolventSweep sweep = run_resolvent(cfg);
  emit_series(cfg, "resolvent", resolvent_csv(sweep), {{"lambda", sweep.lambdas}, {"resolvent_norm", sweep.norms}});
  json summary = to_json(sweep);
  summary["m"] = cfg.discretization.m;
  summary["config_hash"] = config_hash(cfg);
  report(cfg, "resolvent_fit.json", summary);
  return 0;
}

int cmd_fit(const RunConfig& cfg, const std::optional<fs::path>& trace_path) {
  const auto path = trace_path ? trace_path : cfg.analysis.trace_file;
  if (!path)
    throw Error(ErrorCode::MissingKey, "key `analysis.trace_file` (or --trace) is required by fit; accepted: a trace "
                                       "CSV written by simulate");
  const SimulationTrace trace = read_trace_csv(*path);
  json summary = to_json(run_fit(cfg, trace));
  summary["trace"] = path->generic_string();
  summary["config_hash"] = config_hash(cfg);
  report(cfg, "fit.json", summary);
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  const auto rows = run_sweep(cfg);
  std::string csv = "m,exponent,C\n";
  json ms = json::array(), exps = json::array(), cs = json::array(), details = json::array();
  for (const auto& r : rows) {
    csv += format_number(r.m) + ',' + format_number(r.sweep.fitted_exponent) + ',' + format_number(r.sweep.fitted_C) +
           '\n';
    ms.push_back(r.m);
    exps.push_back(r.sweep.fitted_exponent);
    cs.push_back(r.sweep.fitted_C);
    json d = to_json(r.sweep);
    d["m"] = r.m;
    details.push_back(d);
  }
  emit_series(cfg, "sweep", csv, {{"m", ms}, {"exponent", exps}, {"C", cs}});
  json summary = {{"m", ms}, {"exponent", exps}, {"C", cs}, {"config_hash", config_hash(cfg)}};
  write_json(resolve_out_dir(cfg) / "sweep_report.json",
             {{"runs", details}, {"config_hash", config_hash(cfg)}});
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degenerate wave / memory heat transmission laboratory"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<fs::path> trace_path;

  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "TOML run configuration")->required();
    return sub;
  };
  auto* check = add("check", "report coefficient hypotheses and kernel data as JSON");
  auto* sim = add("simulate", "time-step the system and write the energy trace");
  auto* spec = add("spectrum", "dense spectrum of the discrete generator");
  auto* res = add("resolvent", "resolvent-norm sweep and growth exponent");
  auto* fit = add("fit", "fit an energy decay law to a trace CSV");
  fit->add_option("-t,--trace", trace_path, "trace CSV (overrides analysis.trace_file)");
  auto* sweep = add("sweep", "resolvent growth exponents over analysis.sweep_m");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const RunConfig cfg = load_config(config_path);
    if (check->parsed()) return cmd_check(cfg);
    if (sim->parsed()) return cmd_simulate(cfg);
    if (spec->parsed()) return cmd_spectrum(cfg);
    if (res->parsed()) return cmd_resolvent(cfg);
    if (fit->parsed()) return cmd_fit(cfg, trace_path);
    if (sweep->parsed()) return cmd_sweep(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_validation_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
