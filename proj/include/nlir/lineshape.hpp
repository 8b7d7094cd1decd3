#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nlir::lineshape {

/// One absorption line in HITRAN conventions (wavenumbers in cm^-1, widths per atm).
struct SpectralLine {
    int molecule_id = 0;
    int isotope_id = 0;
    double center_wn = 0.0;          // nu0, cm^-1
    double intensity = 0.0;          // S at 296 K, cm^-1/(molecule cm^-2)
    double gamma_air = 0.0;          // cm^-1/atm HWHM
    double gamma_self = 0.0;         // cm^-1/atm HWHM
    double lower_energy = 0.0;       // E'', cm^-1
    double temperature_exponent = 0.0;

    void validate() const;
    friend bool operator==(const SpectralLine&, const SpectralLine&) = default;
};

/// Lines are kept sorted by ascending centre.
struct LineList {
    std::string molecule;
    std::vector<SpectralLine> lines;
    double molar_mass_g_mol = 0.0;
    std::vector<std::string> warnings;

    void sort();
    bool empty() const noexcept { return lines.empty(); }
};

/// Doppler HWHM (cm^-1): (nu0/c) sqrt(2 ln2 k_B T / m).
double doppler_halfwidth(double center_wn, double temperature_k, double molar_mass_g_mol);

/// Collisional HWHM (cm^-1) for a self/air mixture at the given total pressure.
double lorentz_halfwidth(const SpectralLine& line, double pressure_torr, double self_fraction,
                         double temperature_k);

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im z >= 0.
std::complex<double> faddeeva(std::complex<double> z);

/// Area-normalised Voigt density (cm) with Gaussian HWHM `gamma_d` and Lorentzian HWHM `gamma_l`.
double voigt_profile(double wn, double center_wn, double gamma_d, double gamma_l);

/// Ideal-gas number density in molecule/cm^3.
double number_density(double pressure_torr, double temperature_k);

/// S(T) from the 296 K value. `partition_ratio` is Q(296)/Q(T).
double intensity_at_temperature(const SpectralLine& line, double temperature_k, double partition_ratio);

struct AbsorptionOptions {
    double self_fraction = 1.0;
    double wing_cutoff_wn = 25.0;
    /// Extra Gaussian HWHM (cm^-1) convolved into every line, e.g. a spectrometer
    /// response. Gaussians add in quadrature with the Doppler width.
    double instrument_hwhm_wn = 0.0;
    double partition_ratio = 1.0;
    /// Overrides the line list's molar mass when positive.
    double molar_mass_g_mol = 0.0;
};

/// Bouguer absorption coefficient alpha(nu) in cm^-1 over a strictly increasing grid.
std::vector<double> absorption_spectrum(const LineList& list, std::span<const double> grid_wn,
                                        double pressure_torr, double temperature_k,
                                        const AbsorptionOptions& options = {});

/// Rigid-rotor parallel band (P and R branches) used to synthesise CO2-like test
/// spectra when no HITRAN file is at hand.
struct BandSpec {
    std::string molecule = "CO2-like";
    double molar_mass_g_mol = 43.99;
    double origin_wn = 2349.143;
    double rotational_constant_wn = 0.3902;
    double band_intensity = 9.5e-17;  // sum of S over all lines at 296 K
    int max_j = 80;
    bool even_j_only = true;
    double gamma_air = 0.07;
    double gamma_self = 0.1;
    double temperature_exponent = 0.75;
};

LineList synthetic_band(const BandSpec& spec);

// HITRAN .par records ------------------------------------------------------

struct HitranRecord {
    SpectralLine line;
    bool gamma_self_defaulted = false;
};

inline constexpr std::size_t hitran_record_length = 160;

/// Decodes one 160-column HITRAN 2004+ record. Fortran `D` exponents are accepted.
HitranRecord parse_hitran_record(std::string_view record);

/// Writes the fields this toolkit uses into a 160-column record; unused columns are
/// zero-filled with the HITRAN widths.
std::string format_hitran_record(const SpectralLine& line);

/// Parses a whole .par file. Errors carry the 1-based record number.
LineList parse_hitran(std::string_view text, std::string molecule = {}, double molar_mass_g_mol = 0.0);

// CSV line lists -----------------------------------------------------------

/// Header names understood by parse_line_csv. nu0 and S are mandatory.
inline constexpr std::string_view csv_center = "nu0_cm-1";
inline constexpr std::string_view csv_intensity = "S_cm/molecule";
inline constexpr std::string_view csv_gamma_air = "gamma_air_cm-1/atm";
inline constexpr std::string_view csv_gamma_self = "gamma_self_cm-1/atm";
inline constexpr std::string_view csv_lower_energy = "elower_cm-1";
inline constexpr std::string_view csv_temperature_exponent = "n_air";

LineList parse_line_csv(std::string_view text);
std::string format_line_csv(const LineList& list);

/// Loads .par files as HITRAN and everything else as CSV.
LineList load_line_list(const std::string& path);

}  // namespace nlir::lineshape
