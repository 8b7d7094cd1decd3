#include "nlir/lineshape.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "nlir/constants.hpp"
#include "nlir/error.hpp"

namespace nlir::lineshape {

void SpectralLine::validate() const {
    if (!(center_wn > 0.0)) throw DomainError("line centre must be positive");
    if (!(intensity >= 0.0)) throw DomainError("line intensity must be non-negative");
    if (!(gamma_self >= 0.0) || !(gamma_air >= 0.0)) throw DomainError("broadening half-widths must be non-negative");
}

void LineList::sort() {
    std::stable_sort(lines.begin(), lines.end(),
                     [](const SpectralLine& a, const SpectralLine& b) { return a.center_wn < b.center_wn; });
}

double doppler_halfwidth(double center_wn, double temperature_k, double molar_mass_g_mol) {
    if (!(center_wn > 0.0) || !(temperature_k > 0.0) || !(molar_mass_g_mol > 0.0)) {
        throw DomainError("doppler_halfwidth: inputs must be positive");
    }
    const double mass_kg = molar_mass_g_mol * 1e-3 / 6.02214076e23;
    const double v = std::sqrt(2.0 * std::numbers::ln2 * constants::boltzmann_j_k * temperature_k / mass_kg);
    return center_wn * v / constants::speed_of_light_m_s;
}

double lorentz_halfwidth(const SpectralLine& line, double pressure_torr, double self_fraction,
                         double temperature_k) {
    if (pressure_torr < 0.0) throw DomainError("lorentz_halfwidth: negative pressure");
    if (!(self_fraction >= 0.0 && self_fraction <= 1.0)) throw DomainError("lorentz_halfwidth: mole fraction outside [0, 1]");
    if (!(temperature_k > 0.0)) throw DomainError("lorentz_halfwidth: temperature must be positive");
    const double mix = self_fraction * line.gamma_self + (1.0 - self_fraction) * line.gamma_air;
    const double thermal = std::pow(constants::reference_temperature_k / temperature_k, line.temperature_exponent);
    return pressure_torr / constants::torr_per_atm * thermal * mix;
}

namespace {

// Weideman's rational approximation of w(z) with N = 40 terms. Coefficients come from
// a 2N-point discrete Fourier transform of the mapped integrand.
constexpr int kWeidemanTerms = 40;

struct WeidemanTable {
    double scale = 0.0;
    std::array<double, kWeidemanTerms> coeffs{};

    WeidemanTable() {
        const int n = kWeidemanTerms;
        const int m = 2 * n;
        scale = std::sqrt(n / std::sqrt(2.0));
        std::array<double, 4 * kWeidemanTerms> f{};
        // f[0] corresponds to k = -m and is zero; f[i] to k = i - m.
        for (int i = 1; i < 2 * m; ++i) {
            const int k = i - m;
            const double theta = k * constants::pi / m;
            const double t = scale * std::tan(theta / 2.0);
            f[static_cast<std::size_t>(i)] = std::exp(-t * t) * (scale * scale + t * t);
        }
        // fftshift, then the real part of the DFT divided by 2m.
        std::array<double, 4 * kWeidemanTerms> shifted{};
        for (int i = 0; i < 2 * m; ++i) {
            shifted[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>((i + m) % (2 * m))];
        }
        for (int j = 1; j <= n; ++j) {
            double acc = 0.0;
            for (int i = 0; i < 2 * m; ++i) {
                acc += shifted[static_cast<std::size_t>(i)] * std::cos(constants::two_pi * i * j / (2.0 * m));
            }
            coeffs[static_cast<std::size_t>(j - 1)] = acc / (2.0 * m);
        }
    }
};

const WeidemanTable& weideman() {
    static const WeidemanTable table;
    return table;
}

std::complex<double> faddeeva_continued_fraction(std::complex<double> z) {
    // Laplace continued fraction, accurate for |z| >= 15 with a few dozen levels.
    std::complex<double> tail = z;
    for (int k = 24; k >= 1; --k) {
        tail = z - (0.5 * k) / tail;
    }
    return std::complex<double>(0.0, 1.0 / std::sqrt(constants::pi)) / tail;
}

}  // namespace

std::complex<double> faddeeva(std::complex<double> z) {
    if (z.imag() < 0.0) throw DomainError("faddeeva: only the upper half-plane is supported");
    if (std::abs(z.real()) + z.imag() >= 15.0) return faddeeva_continued_fraction(z);
    const auto& t = weideman();
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> denom = t.scale - i * z;
    const std::complex<double> zz = (t.scale + i * z) / denom;
    std::complex<double> p = 0.0;
    for (int k = kWeidemanTerms - 1; k >= 0; --k) p = p * zz + t.coeffs[static_cast<std::size_t>(k)];
    return 2.0 * p / (denom * denom) + (1.0 / std::sqrt(constants::pi)) / denom;
}

double voigt_profile(double wn, double center_wn, double gamma_d, double gamma_l) {
    if (!(gamma_d >= 0.0) || !(gamma_l >= 0.0)) throw DomainError("voigt_profile: negative width");
    if (gamma_d == 0.0 && gamma_l == 0.0) throw DomainError("voigt_profile: both widths are zero");
    const double x = std::abs(wn - center_wn);
    if (gamma_l == 0.0) {
        const double u = x / gamma_d;
        return std::sqrt(std::numbers::ln2 / constants::pi) / gamma_d * std::exp(-std::numbers::ln2 * u * u);
    }
    if (gamma_d == 0.0) {
        return gamma_l / (constants::pi * (x * x + gamma_l * gamma_l));
    }
    const double sigma = gamma_d / std::sqrt(2.0 * std::numbers::ln2);
    const double norm = sigma * std::sqrt(2.0);
    const auto w = faddeeva({x / norm, gamma_l / norm});
    return w.real() / (sigma * std::sqrt(constants::two_pi));
}

double number_density(double pressure_torr, double temperature_k) {
    if (pressure_torr < 0.0) throw DomainError("number_density: negative pressure");
    if (!(temperature_k > 0.0)) throw DomainError("number_density: temperature must be positive");
    // m^-3 -> cm^-3
    return pressure_torr * constants::pascal_per_torr / (constants::boltzmann_j_k * temperature_k) * 1e-6;
}

double intensity_at_temperature(const SpectralLine& line, double temperature_k, double partition_ratio) {
    if (!(temperature_k > 0.0)) throw DomainError("temperature must be positive");
    const double c2 = constants::second_radiation_cm_k;
    const double tref = constants::reference_temperature_k;
    const double boltzmann = std::exp(-c2 * line.lower_energy / temperature_k) / std::exp(-c2 * line.lower_energy / tref);
    const double stimulated = -std::expm1(-c2 * line.center_wn / temperature_k) / -std::expm1(-c2 * line.center_wn / tref);
    return line.intensity * partition_ratio * boltzmann * stimulated;
}

std::vector<double> absorption_spectrum(const LineList& list, std::span<const double> grid_wn,
                                        double pressure_torr, double temperature_k,
                                        const AbsorptionOptions& options) {
    for (std::size_t i = 1; i < grid_wn.size(); ++i) {
        if (!(grid_wn[i] > grid_wn[i - 1])) throw DomainError("absorption_spectrum: grid must be strictly increasing");
    }
    if (pressure_torr < 0.0) throw DomainError("absorption_spectrum: negative pressure");
    std::vector<double> alpha(grid_wn.size(), 0.0);
    if (list.lines.empty()) return alpha;

    const double mass = options.molar_mass_g_mol > 0.0 ? options.molar_mass_g_mol : list.molar_mass_g_mol;
    const double density = number_density(pressure_torr, temperature_k);
    for (const auto& line : list.lines) {
        line.validate();
        const double gd0 = doppler_halfwidth(line.center_wn, temperature_k, mass);
        const double gd = std::hypot(gd0, options.instrument_hwhm_wn);
        const double gl = lorentz_halfwidth(line, pressure_torr, options.self_fraction, temperature_k);
        const double strength = density * intensity_at_temperature(line, temperature_k, options.partition_ratio);
        if (strength == 0.0) continue;
        // Far wings are dropped, but never inside the Gaussian core.
        const double cutoff = std::max(options.wing_cutoff_wn, 8.0 * gd);
        const auto lo = std::lower_bound(grid_wn.begin(), grid_wn.end(), line.center_wn - cutoff);
        const auto hi = std::upper_bound(grid_wn.begin(), grid_wn.end(), line.center_wn + cutoff);
        for (auto it = lo; it != hi; ++it) {
            const auto idx = static_cast<std::size_t>(it - grid_wn.begin());
            alpha[idx] += strength * voigt_profile(*it, line.center_wn, gd, gl);
        }
    }
    return alpha;
}

LineList synthetic_band(const BandSpec& spec) {
    if (!(spec.origin_wn > 0.0) || !(spec.rotational_constant_wn > 0.0) || spec.max_j < 1) {
        throw DomainError("synthetic_band: invalid band parameters");
    }
    LineList list;
    list.molecule = spec.molecule;
    list.molar_mass_g_mol = spec.molar_mass_g_mol;
    const double c2 = constants::second_radiation_cm_k;
    const double t = constants::reference_temperature_k;
    const double b = spec.rotational_constant_wn;
    double total = 0.0;
    auto add = [&](double center, double weight, double elower) {
        SpectralLine l;
        l.molecule_id = 2;
        l.isotope_id = 1;
        l.center_wn = center;
        l.intensity = weight;
        l.gamma_air = spec.gamma_air;
        l.gamma_self = spec.gamma_self;
        l.lower_energy = elower;
        l.temperature_exponent = spec.temperature_exponent;
        list.lines.push_back(l);
        total += weight;
    };
    for (int j = 0; j <= spec.max_j; ++j) {
        if (spec.even_j_only && j % 2 != 0) continue;
        const double elower = b * j * (j + 1);
        const double pop = std::exp(-c2 * elower / t);
        add(spec.origin_wn + 2.0 * b * (j + 1), (j + 1) * pop, elower);  // R(J)
        if (j > 0) add(spec.origin_wn - 2.0 * b * j, j * pop, elower);  // P(J)
    }
    for (auto& l : list.lines) l.intensity *= spec.band_intensity / total;
    list.sort();
    return list;
}

}  // namespace nlir::lineshape
