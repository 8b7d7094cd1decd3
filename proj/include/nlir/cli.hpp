#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nlir::cli {

/// Stable process exit codes.
enum ExitCode : int { exit_ok = 0, exit_io = 1, exit_config = 2, exit_incompatible = 3 };

struct SimulateArgs {
    std::filesystem::path config;
    bool vacuum = false;
    std::optional<std::uint64_t> seed;
    bool no_noise = false;
    std::optional<std::filesystem::path> output;
};

struct RetrieveArgs {
    std::filesystem::path config;
    std::filesystem::path sample;
    std::filesystem::path reference;
    std::optional<std::filesystem::path> output;
};

struct AbsorptionArgs {
    std::filesystem::path lines;
    double pressure_torr = 0.0;
    double temperature_k = 296.0;
    double wn_min = 0.0;
    double wn_max = 0.0;
    double wn_step = 0.0;
    double self_fraction = 1.0;
    double partition_ratio = 1.0;
    double resolution_fwhm_wn = 0.0;
    double molar_mass_g_mol = 0.0;
    std::filesystem::path output;
};

struct KkArgs {
    std::filesystem::path input;
    double baseline = 0.0;
    std::filesystem::path output;
};

struct ExportArgs {
    std::filesystem::path map;
    std::optional<std::filesystem::path> csv;
    std::optional<std::filesystem::path> pgm;
};

/// Each command reports progress on `out`, diagnostics on `err`, and returns an ExitCode.
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_retrieve(const RetrieveArgs& args, std::ostream& out, std::ostream& err);
int cmd_absorption(const AbsorptionArgs& args, std::ostream& out, std::ostream& err);
int cmd_kk(const KkArgs& args, std::ostream& out, std::ostream& err);
int cmd_export(const ExportArgs& args, std::ostream& out, std::ostream& err);

/// Full command line (argv[0] included) to exit code.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);


}  // namespace nlir::cli
