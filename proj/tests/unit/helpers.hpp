#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "nlir/config.hpp"

namespace test {

inline constexpr double pi = 3.14159265358979323846;

inline std::filesystem::path source_dir() { return NLIR_SOURCE_DIR; }

inline nlir::config::RunConfig default_config() {
    return nlir::config::load_run_config(source_dir() / "configs" / "default.jsonc");
}

/// Fresh empty directory under the system temp dir, unique per name.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("nlir_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& p, const std::string& body) {
    std::ofstream f(p, std::ios::binary);
    f << body;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace test
