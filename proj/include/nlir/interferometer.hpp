#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlir/dispersion.hpp"
#include "nlir/lineshape.hpp"

namespace nlir::interferometer {

struct PumpSpec {
    double wavelength_nm = 532.0;
    double waist_mm = 2.0;
    /// Propagation angle of the (extraordinary) pump to the crystal optic axis.
    double axis_angle_rad = 0.0;
};

struct Geometry {
    double crystal_mm = 0.5;  // L
    double gap_mm = 25.0;     // L_m

    void validate() const;
};

struct NoiseModel {
    double mean_counts = 1e4;  // counts at unit intensity
    double read_sigma = 0.0;   // Gaussian read noise, counts
};

/// Spectrometer + camera. Rows of a map are camera rows (angle), columns are
/// wavelengths.
struct DetectorSpec {
    double focal_mm = 500.0;
    double pitch_um = 13.0;
    int angle_pixels = 513;
    int wavelength_pixels = 512;
    double wavelength_min_nm = 601.5;
    double wavelength_max_nm = 613.7;
    /// Spectral resolution (FWHM, signal wavelength).
    double resolution_fwhm_nm = 0.0;
    NoiseModel noise;

    void validate() const;
};

struct InstrumentConfig {
    PumpSpec pump;
    dispersion::UniaxialCrystalIndex crystal;
    Geometry geometry;
    DetectorSpec detector;

    void validate() const;
};

// Wavelengths and angles ----------------------------------------------------

/// Energy conservation: 1/lambda_s = 1/lambda_p - 1/lambda_i.
double signal_wavelength(double pump_nm, double idler_nm);
double idler_wavelength(double pump_nm, double signal_nm);

/// Paraxial transverse-momentum balance k_s theta_s = k_i theta_i.
double conjugate_angle(double signal_k, double idler_k, double signal_angle_rad);

/// Longitudinal mismatch in one crystal, delta = (k_p - k_s cos th_s - k_i cos th_i) L,
/// with internal angles from paraxial Snell refraction of the external signal angle.
double phase_mismatch_crystal(double signal_nm, double angle_rad, const dispersion::UniaxialCrystalIndex& crystal,
                              const PumpSpec& pump, const Geometry& geometry);

/// Gas indices in the gap between the crystals.
struct GapIndices {
    double signal = 1.0;
    double pump = 1.0;
    double idler = 1.0;
};

/// Same construction over the gap: delta_m = (k_p - k_s cos th_s - k_i cos th_i) L_m.
double phase_gap(double signal_nm, double angle_rad, double pump_nm, const GapIndices& gap, const Geometry& geometry);

/// Pump angle to the optic axis that makes delta vanish for collinear emission at `signal_nm`.
double phase_matching_angle(const dispersion::UniaxialCrystalIndex& crystal, double pump_nm, double signal_nm);

/// a >= 10 L_m max{theta_s, theta_i}, the wide-pump condition.
bool quasi_collinear(const PumpSpec& pump, const Geometry& geometry, double max_signal_angle_rad,
                     double max_idler_angle_rad);

// Detector mapping ------------------------------------------------------------

/// theta = (index - centre) pitch / f, centre = (pixels - 1) / 2.
double pixel_to_angle(int index, const DetectorSpec& detector);
std::vector<double> angle_axis(const DetectorSpec& detector);
std::vector<double> wavelength_axis(const DetectorSpec& detector);

// Gas ---------------------------------------------------------------------------

/// Optical response of the gap medium: visible indices for signal and pump, and
/// idler index and absorption as functions of idler wavenumber. Either uniform over
/// all wavelengths or tabulated on a uniform wavenumber grid (linear interpolation).
class GapResponse {
public:
    static GapResponse vacuum();
    static GapResponse uniform(double idler_index, double alpha_cm, double signal_index = 1.0,
                               double pump_index = 1.0);
    static GapResponse tabulated(std::vector<double> idler_wn, std::vector<double> idler_index,
                                 std::vector<double> alpha_cm, double signal_index, double pump_index);

    double signal_index() const noexcept { return signal_index_; }
    double pump_index() const noexcept { return pump_index_; }
    bool is_uniform() const noexcept { return grid_wn_.empty(); }
    bool covers(double idler_nm) const noexcept;

    /// Throws DomainError outside the tabulated band.
    double idler_index(double idler_nm) const;
    double alpha_cm(double idler_nm) const;

    std::span<const double> grid_wn() const noexcept { return grid_wn_; }
    std::span<const double> idler_index_table() const noexcept { return index_; }
    std::span<const double> alpha_table() const noexcept { return alpha_; }

    nlohmann::json describe() const;

private:
    double interpolate(const std::vector<double>& table, double idler_nm) const;

    double signal_index_ = 1.0;
    double pump_index_ = 1.0;
    double uniform_index_ = 1.0;
    double uniform_alpha_ = 0.0;
    std::vector<double> grid_wn_;
    std::vector<double> index_;
    std::vector<double> alpha_;
};

struct GasState {
    double pressure_torr = 0.0;
    double temperature_k = 300.0;
    lineshape::LineList lines;
    dispersion::GasIndexModel visible_index;
    double self_fraction = 1.0;
    double partition_ratio = 1.0;
};

struct GasResponseOptions {
    /// Spectral resolution applied to the line spectrum (FWHM, cm^-1).
    double resolution_fwhm_wn = 0.0;
    /// Upper bound on tabulation points; the grid step is coarsened to respect it.
    std::size_t max_points = 20000;
};

/// Tabulates the gap response over [wn_min, wn_max] (idler wavenumbers) plus a margin:
/// alpha from the line list at the given resolution, idler index from the
/// Kramers-Kronig transform of that alpha on top of the non-resonant gas index, and
/// visible indices from the pressure law.
GapResponse gas_response(const GasState& gas, double wn_min, double wn_max, const GasResponseOptions& options = {});

/// Converts a signal-wavelength FWHM into the equivalent wavenumber FWHM (cm^-1).
/// Signal and idler share the same wavenumber width since nu_i = nu_p - nu_s.
double signal_fwhm_to_wn(double fwhm_nm, double signal_nm);

// Forward model ---------------------------------------------------------------

/// Two-crystal intensity along one detector column (fixed signal wavelength). The crystal part and
/// the envelope are precomputed; the gap phase is re-evaluated per idler index, which
/// is what the fitting code varies.
class CrossSectionModel {
public:
    CrossSectionModel(const InstrumentConfig& config, double signal_nm, std::span<const double> angles_rad,
                      double gap_signal_index, double gap_pump_index);

    double signal_nm() const noexcept { return signal_nm_; }
    double idler_nm() const noexcept { return idler_nm_; }
    double gap_mm() const noexcept { return gap_um_ * 1e-3; }
    std::size_t size() const noexcept { return envelope_.size(); }

    /// sinc^2(delta/2) per angle.
    std::span<const double> envelope() const noexcept { return envelope_; }
    std::span<const double> crystal_phase() const noexcept { return crystal_phase_; }

    double gap_phase(std::size_t j, double idler_index) const;
    double total_phase(std::size_t j, double idler_index) const { return crystal_phase_[j] + gap_phase(j, idler_index); }

    /// |tau| = exp(-alpha L_m).
    double transmission(double alpha_cm) const;

    /// amplitude * 1/2 sinc^2(delta/2) (1 + |tau| cos(delta + delta_m)).
    void intensity(double idler_index, double alpha_cm, double amplitude, std::span<double> out) const;
    std::vector<double> intensity(double idler_index, double alpha_cm, double amplitude = 1.0) const;

    /// 1/2 sinc^2 (1 + cos) without any gap transmission factor.
    std::vector<double> vacuum_intensity() const;

private:
    double signal_nm_ = 0.0;
    double idler_nm_ = 0.0;
    double gap_um_ = 0.0;
    double gap_signal_index_ = 1.0;
    double gap_pump_index_ = 1.0;
    double visible_excess_ = 0.0;  // 2 pi [(n_p - 1)/lambda_p - (n_s - 1)/lambda_s], rad/um
    std::vector<double> envelope_;
    std::vector<double> crystal_phase_;
    std::vector<double> transverse_k_;    // q = k_s theta_s, rad/um
    std::vector<double> signal_tilt_;     // k_s^m (1 - cos theta_s^m), rad/um
};

struct InterferogramMap {
    std::vector<double> wavelength_nm;  // signal, columns
    std::vector<double> angle_rad;      // external, rows
    std::vector<double> intensity;      // row-major rows x cols
    nlohmann::json metadata = nlohmann::json::object();

    std::size_t rows() const noexcept { return angle_rad.size(); }
    std::size_t cols() const noexcept { return wavelength_nm.size(); }
    double& at(std::size_t row, std::size_t col) { return intensity[row * cols() + col]; }
    double at(std::size_t row, std::size_t col) const { return intensity[row * cols() + col]; }
    std::vector<double> column(std::size_t col) const;

    /// Throws unless axes are strictly increasing and sizes agree.
    void validate() const;
};

nlohmann::json to_json(const InstrumentConfig& config);

/// Noiseless two-crystal map with |tau| = exp(-alpha L_m).
InterferogramMap intensity_map(const InstrumentConfig& config, const GapResponse& gas);

/// Noiseless single-pass map, no gap medium (1/2 sinc^2 (1 + cos)).
InterferogramMap vacuum_map(const InstrumentConfig& config);

/// Convolves every row along wavelength with a unit-area Gaussian of the given FWHM.
InterferogramMap apply_instrument(InterferogramMap map, double fwhm_nm);

/// Poisson counts with mean intensity * mean_counts plus Gaussian read noise,
/// clamped at zero. Deterministic for a given seed.
InterferogramMap add_noise(InterferogramMap map, const NoiseModel& noise, std::uint64_t seed);

}  // namespace nlir::interferometer
