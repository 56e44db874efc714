#include "degenwave/pipeline.hpp"

#include <exception>
#include <thread>

#include "degenwave/errors.hpp"
#include "degenwave/output.hpp"

namespace degenwave {

CoefficientModel make_model(const RunConfig& config) {
  const auto& c = config.coefficients;
  if (c.coefficient_table) return CoefficientModel::from_csv(*c.coefficient_table);
  return CoefficientModel::power_law(c.a_exponent, c.b_amplitude, c.b_exponent);
}

MemoryKernel make_kernel(const RunConfig& config) { return MemoryKernel::exponential(config.kernel.kernel_k); }

Mesh make_mesh(const RunConfig& config, Workload workload, const CoefficientModel& model, const MemoryKernel& kernel) {
  const MeshSize size = resolve_mesh_size(config, workload);
  const double grading = config.discretization.wave_grading.value_or(default_wave_grading(characterize(model).K_a));
  return build_mesh(size.wave_cells, grading, size.heat_cells,
                    truncate_history(kernel, config.kernel.history_eps_tail, config.kernel.history_nodes));
}

GeneratorSystem make_system(const RunConfig& config, Workload workload, std::optional<double> m_override) {
  const CoefficientModel model = make_model(config);
  const MemoryKernel kernel = make_kernel(config);
  const Mesh mesh = make_mesh(config, workload, model, kernel);
  return assemble_system(model, kernel, mesh, m_override.value_or(config.discretization.m), config.discretization.c);
}

nlohmann::json run_check(const RunConfig& config) {
  const CoefficientModel model = make_model(config);
  const MemoryKernel kernel = make_kernel(config);
  const HistoryGrid grid = truncate_history(kernel, config.kernel.history_eps_tail, config.kernel.history_nodes);
  return {{"coefficients", to_json(check_hypotheses(model))},
          {"kernel", to_json(kernel, grid)},
          {"config_hash", config_hash(config)}};
}

SimulationTrace run_simulation(const RunConfig& config) {
  const GeneratorSystem system = make_system(config, Workload::Simulate);
  const DiscreteState initial = project_initial_data(parse_preset(config.evolution.preset), system);
  SimulationSettings settings;
  settings.dt = config.evolution.dt.value_or(0.0);
  settings.t_final = config.evolution.t_final;
  settings.record_stride = config.evolution.record_stride;
  SimulationTrace trace = simulate(system, system.flatten(initial), settings);
  trace.config_hash = config_hash(config);
  return trace;
}

SpectrumResult run_spectrum(const RunConfig& config) {
  const GeneratorSystem system = make_system(config, Workload::Spectrum);
  SpectrumResult r;
  r.dof = system.dim();
  r.spectrum = spectral_abscissa(system);
  r.band_damping = band_min_damping(r.spectrum, kDampingBand);
  return r;
}

ResolventSweep run_resolvent(const RunConfig& config, std::optional<double> m_override) {
  const GeneratorSystem system = make_system(config, Workload::Resolvent, m_override);
  const GeneratorResolvent problem(system);
  const auto grid = log_spaced(config.analysis.lambda_min, config.analysis.lambda_max, config.analysis.lambda_points);
  ResolventOptions options;
  if (m_override) options.threads = 1;
  return resolvent_growth(problem, grid, options);
}

DecayFit run_fit(const RunConfig& config, const SimulationTrace& trace) {
  if (trace.times.empty()) throw Error(ErrorCode::EmptyWindow, "trace is empty");
  const double t_end = trace.times.back();
  const double lo = config.analysis.fit_t_lo.value_or(0.5 * t_end);
  const double hi = config.analysis.fit_t_hi.value_or(t_end);
  return fit_decay(trace.times, trace.energy, lo, hi, parse_decay_kind(config.analysis.fit_kind));
}

std::vector<SweepRow> run_sweep(const RunConfig& config) {
  const auto& ms = config.analysis.sweep_m;
  std::vector<SweepRow> rows(ms.size());
  std::vector<std::exception_ptr> errors(ms.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), unsigned(ms.size())));
  auto job = [&](std::size_t i) {
    try {
      rows[i] = {ms[i], run_resolvent(config, ms[i])};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  for (std::size_t start = 0; start < ms.size(); start += workers) {
    std::vector<std::thread> pool;
    for (std::size_t i = start; i < std::min(ms.size(), start + workers); ++i) pool.emplace_back(job, i);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

}  // namespace degenwave
