#pragma once

#include <span>
#include <string>
#include <vector>

namespace nlir::kk {

struct IndexSpectrum {
    std::vector<double> grid_wn;
    std::vector<double> n_minus_1;
    double baseline = 0.0;
    std::vector<std::string> warnings;
};

/// Refractive index implied by an absorption spectrum over a finite uniform band:
///
///   n(nu) - 1 = baseline + 1/(2 pi^2) PV int alpha(nu') / (nu'^2 - nu^2) dnu'
///
/// with alpha and nu in cm^-1. The principal value uses the alternating-point rule:
/// only samples of opposite index parity to the evaluation point contribute, each
/// with weight 2h. Absorption outside the band is represented by `baseline`.
IndexSpectrum kk_index_from_absorption(std::span<const double> alpha_cm, std::span<const double> grid_wn,
                                       double baseline);

/// Row-major N x N matrix M with (n - 1 - baseline)_i = sum_j M_ij alpha_j, for error
/// propagation.
std::vector<double> kk_operator(std::span<const double> grid_wn);

/// Throws unless the grid is uniform, strictly increasing and at least 8 points long.
void check_grid(std::span<const double> grid_wn);

}  // namespace nlir::kk
