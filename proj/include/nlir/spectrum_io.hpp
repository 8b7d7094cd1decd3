#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nlir::spectrum_io {

/// Two-column CSV: a header naming both columns, then one "x,y" row per sample at
/// full precision. `#` lines are comments.
struct TwoColumn {
    std::string x_name;
    std::string y_name;
    std::vector<double> x;
    std::vector<double> y;
};

inline constexpr std::string_view wavenumber_column = "nu_cm-1";
inline constexpr std::string_view alpha_column = "alpha_cm-1";
inline constexpr std::string_view index_column = "n_minus_1";

std::string format_two_column(const TwoColumn& table);
TwoColumn parse_two_column(std::string_view text);

/// Reads a two-column file and checks the header names.
TwoColumn read_two_column(const std::string& path, std::string_view x_name, std::string_view y_name);

}  // namespace nlir::spectrum_io
