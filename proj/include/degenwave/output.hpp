#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "degenwave/coefficients.hpp"
#include "degenwave/config.hpp"
#include "degenwave/decay_fit.hpp"
#include "degenwave/evolution.hpp"
#include "degenwave/kernel.hpp"
#include "degenwave/resolvent.hpp"
#include "degenwave/spectrum.hpp"

namespace degenwave {

/// printf %.17g.
std::string format_number(double value);

/// DEGENWAVE_OUT when set and non-empty, else output.out_dir.
std::filesystem::path resolve_out_dir(const RunConfig& config);

/// Writes bytes verbatim, creating parent directories. IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);
/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

std::string trace_csv(const SimulationTrace& trace);
nlohmann::json trace_json(const SimulationTrace& trace);
/// Reads the CSV written by trace_csv. ParseError on a malformed file.
SimulationTrace parse_trace_csv(std::string_view text);
SimulationTrace read_trace_csv(const std::filesystem::path& path);

std::string eigenvalues_csv(const Spectrum& spectrum);
std::string resolvent_csv(const ResolventSweep& sweep);

nlohmann::json to_json(const CoefficientReport& report);
nlohmann::json to_json(const MemoryKernel& kernel, const HistoryGrid& grid);
nlohmann::json to_json(const DecayFit& fit);
nlohmann::json to_json(const ResolventSweep& sweep);

/// Sidecar for a CSV artifact: {artifact, config_hash, config}.
nlohmann::json artifact_meta(const std::string& artifact, const RunConfig& config);

}  // namespace degenwave
