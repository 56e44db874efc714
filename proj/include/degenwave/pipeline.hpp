#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "degenwave/config.hpp"
#include "degenwave/decay_fit.hpp"
#include "degenwave/discretization.hpp"
#include "degenwave/evolution.hpp"
#include "degenwave/resolvent.hpp"
#include "degenwave/spectrum.hpp"

namespace degenwave {

CoefficientModel make_model(const RunConfig& config);
MemoryKernel make_kernel(const RunConfig& config);
Mesh make_mesh(const RunConfig& config, Workload workload, const CoefficientModel& model, const MemoryKernel& kernel);
/// m_override replaces discretization.m (used by sweep).
GeneratorSystem make_system(const RunConfig& config, Workload workload, std::optional<double> m_override = {});

/// CoefficientReport and kernel report.
nlohmann::json run_check(const RunConfig& config);

SimulationTrace run_simulation(const RunConfig& config);

struct SpectrumResult {
  Spectrum spectrum;
  Index dof = 0;
  double band_damping = 0.0;  // min |Re lambda| over |Im lambda| <= 40
};
SpectrumResult run_spectrum(const RunConfig& config);

ResolventSweep run_resolvent(const RunConfig& config, std::optional<double> m_override = {});

/// Window defaults to [t_final/2, t_final] of the trace.
DecayFit run_fit(const RunConfig& config, const SimulationTrace& trace);

struct SweepRow {
  double m;
  ResolventSweep sweep;
};
/// One resolvent sweep per analysis.sweep_m entry, run concurrently.
std::vector<SweepRow> run_sweep(const RunConfig& config);

inline constexpr double kDampingBand = 40.0;

}  // namespace degenwave
