#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nlir::dispersion {

/// Functional forms a coefficient file may declare. Wavelengths are in micrometres.
///   constant : n = A
///   sellmeier: n^2 = A + sum_k B_k lambda^2 / (lambda^2 - C_k) - D lambda^2
///   pole     : n^2 = A + sum_k B_k / (lambda^2 - C_k) - D lambda^2
enum class SellmeierForm { constant, sellmeier, pole };

struct SellmeierTerm {
    double strength = 0.0;       // B_k
    double resonance_um2 = 0.0;  // C_k
};

/// Refractive-index model with an explicit validity window. Evaluation outside the
/// window throws; the model never extrapolates.
struct SellmeierModel {
    SellmeierForm form = SellmeierForm::constant;
    double a = 1.0;
    std::vector<SellmeierTerm> terms;
    double d_um2 = 0.0;
    double min_um = 0.0;
    double max_um = 0.0;

    static SellmeierModel constant_index(double n, double min_um = 0.1, double max_um = 100.0);

    bool in_range(double lambda_um) const noexcept;
    double index(double lambda_um) const;
};

struct UniaxialCrystalIndex {
    std::string name;
    SellmeierModel ordinary;
    SellmeierModel extraordinary;
    double cut_angle_rad = 0.0;

    /// Throws DomainError unless the cut angle lies in (0, pi/2].
    void validate() const;
};

/// Extraordinary-wave index for propagation at `axis_angle_rad` to the optic axis:
/// 1/n^2 = cos^2/n_o^2 + sin^2/n_e^2.
double uniaxial_index(const UniaxialCrystalIndex& crystal, double lambda_um, double axis_angle_rad);

/// Visible-range gas index at a reference state, scaled linearly in pressure.
struct GasIndexModel {
    double n0 = 1.0;
    double p0_torr = 760.0;
    double t0_k = 273.0;

    void validate() const;
};

/// n(P, T) = 1 + P (n0 - 1) / (P0 (1 + (T - T0)/T0)).
double gas_index(const GasIndexModel& model, double pressure_torr, double temperature_k);

/// k = 2 pi n / lambda, in radians per unit of `lambda`.
double wavevector(double n, double lambda);

/// Parses the coefficient-file format documented in docs/formats.md. The cut angle is
/// not part of the file and is left at zero.
UniaxialCrystalIndex parse_crystal_coefficients(std::string_view text);
UniaxialCrystalIndex load_crystal_coefficients(const std::filesystem::path& path);

}  // namespace nlir::dispersion
