#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <vector>

#include "nlir/interferometer.hpp"
#include "nlir/retrieval.hpp"

namespace nlir::config {

struct GasConfig {
    double pressure_torr = 0.0;
    double temperature_k = 296.0;
    std::filesystem::path line_list;  // resolved against the config file's directory
    double self_fraction = 1.0;
    double partition_ratio = 1.0;
    double molar_mass_g_mol = 0.0;  // 0 = take it from the line list
    dispersion::GasIndexModel visible_index;
};

struct RetrievalConfig {
    double min_visibility = 0.02;
    double min_reference_visibility = 0.05;
    double confidence = 0.95;
    int max_iterations = 200;
};

struct RunConfig {
    interferometer::InstrumentConfig instrument;
    std::optional<GasConfig> gas;
    RetrievalConfig retrieval;
    bool noise_enabled = true;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir;  // resolved against the config file's directory
};

/// Strict JSON (comments allowed). Every physical key carries its unit in the name,
/// unknown keys are rejected, and every failure is a ConfigError naming the key path.
/// Relative paths are resolved against `base_dir`.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Gas state (line list loaded) for the configured gas. Throws ConfigError when the
/// configuration has no gas section.
interferometer::GasState load_gas_state(const RunConfig& config);

/// Tabulated gap response covering the detector's idler band, with the detector
/// resolution applied to the line spectrum.
interferometer::GapResponse gap_response(const RunConfig& config, const interferometer::GasState& gas);

/// Visible gap indices (signal, pump) for the configured gas, 1 without gas.
std::pair<double, double> visible_gap_indices(const RunConfig& config);

/// Seed of the vacuum reference noise stream, decorrelated from the sample seed.
std::uint64_t reference_seed(std::uint64_t seed);

struct SimulateOptions {
    bool vacuum = false;
    /// Overrides the configured seed.
    std::optional<std::uint64_t> seed;
    /// False writes the noiseless map even when the config enables noise.
    bool noise = true;
};

/// Sample (gas in the gap) or vacuum map for the configuration. A vacuum map draws
/// its noise from reference_seed(seed). Line-list warnings are appended to `warnings`.
interferometer::InterferogramMap simulate(const RunConfig& config, const SimulateOptions& options = {},
                                          std::vector<std::string>* warnings = nullptr);

/// Retrieval options from the configuration, with the gas visible indices applied to
/// the sample model.
retrieval::RetrievalOptions retrieval_options(const RunConfig& config);

}  // namespace nlir::config
