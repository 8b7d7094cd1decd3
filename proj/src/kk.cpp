#include "nlir/kk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlir/constants.hpp"
#include "nlir/error.hpp"

namespace nlir::kk {

namespace {
constexpr std::size_t kMinPoints = 8;
constexpr double kUniformTolerance = 1e-6;
constexpr double kEdgeFraction = 0.01;

double kernel_scale() { return 1.0 / (2.0 * constants::pi * constants::pi); }
}  // namespace

void check_grid(std::span<const double> grid) {
    if (grid.size() < kMinPoints) throw DomainError("KK grid needs at least 8 points");
    const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
    if (!(h > 0.0)) throw DomainError("KK grid must be strictly increasing");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double step = grid[i] - grid[i - 1];
        if (!(step > 0.0)) throw DomainError("KK grid must be strictly increasing");
        if (std::abs(step - h) > kUniformTolerance * h) {
            std::ostringstream msg;
            msg << "KK grid is not uniform at index " << i << " (step " << step << " vs mean " << h << ")";
            throw DomainError(msg.str());
        }
    }
    if (!(grid.front() > 0.0)) throw DomainError("KK grid must lie at positive wavenumbers");
}

IndexSpectrum kk_index_from_absorption(std::span<const double> alpha, std::span<const double> grid,
                                       double baseline) {
    check_grid(grid);
    if (alpha.size() != grid.size()) throw DomainError("KK: absorption and grid lengths differ");
    IndexSpectrum out;
    out.grid_wn.assign(grid.begin(), grid.end());
    out.baseline = baseline;
    double peak = 0.0;
    for (double a : alpha) {
        if (a < 0.0) throw DomainError("KK: absorption must be non-negative");
        peak = std::max(peak, a);
    }
    if (peak > 0.0 && std::max(alpha.front(), alpha.back()) >= kEdgeFraction * peak) {
        out.warnings.push_back("absorption at the band edge exceeds 1% of the peak; truncation error likely");
    }

    const std::size_t n = grid.size();
    const double h = (grid.back() - grid.front()) / static_cast<double>(n - 1);
    const double weight = 2.0 * h * kernel_scale();
    out.n_minus_1.assign(n, baseline);
    for (std::size_t i = 0; i < n; ++i) {
        const double nu2 = grid[i] * grid[i];
        double acc = 0.0;
        for (std::size_t j = (i + 1) % 2; j < n; j += 2) {
            acc += alpha[j] / (grid[j] * grid[j] - nu2);
        }
        out.n_minus_1[i] += weight * acc;
    }
    return out;
}

std::vector<double> kk_operator(std::span<const double> grid) {
    check_grid(grid);
    const std::size_t n = grid.size();
    const double h = (grid.back() - grid.front()) / static_cast<double>(n - 1);
    const double weight = 2.0 * h * kernel_scale();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double nu2 = grid[i] * grid[i];
        for (std::size_t j = (i + 1) % 2; j < n; j += 2) {
            m[i * n + j] = weight / (grid[j] * grid[j] - nu2);
        }
    }
    return m;
}

}  // namespace nlir::kk
