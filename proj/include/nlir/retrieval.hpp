#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nlir/interferometer.hpp"
#include "nlir/lm.hpp"

namespace nlir::retrieval {

// Direct estimators -------------------------------------------------------------

/// Fringe contrast (I_max - I_min)/(I_max + I_min) of a cross-section after dividing
/// out its envelope. With no envelope a degree-4 polynomial in angle index stands in
/// for the mean level. Extrema are located per half-fringe (hysteresis crossings of
/// the mean level), refined by a three-point parabola and combined by median.
double visibility(std::span<const double> cross_section, std::span<const double> envelope = {});

enum class AlphaStatus { ok, negative_absorption, opaque };

struct AlphaEstimate {
    double alpha_cm = 0.0;  // +inf when opaque
    AlphaStatus status = AlphaStatus::ok;
};

/// alpha = -ln(V / V_ref) / L_m. V > V_ref yields a negative alpha flagged as an anomaly.
AlphaEstimate alpha_from_visibility(double v, double v_ref, double gap_mm);

/// Half-width of the single-fringe unwrap window in index, lambda_i / (2 L_m).
double unwrap_halfwidth(double idler_nm, double gap_mm);

/// n = n_ref + dphi lambda_i / (2 pi L_m) with dphi = phi_ref - phi_sample, the sign
/// for which a denser gas lowers the gap phase.
double fringe_shift_to_index(double phase_shift_rad, double idler_nm, double gap_mm, double n_ref);

struct FringePhase {
    double phase_rad = 0.0;  // offset of the data fringes relative to the model phase
    double visibility = 0.0;
    double amplitude = 0.0;
};

/// Linear quadrature projection of a cross-section onto env, env cos(phi), env sin(phi)
/// with phi the model phase at `idler_index`.
FringePhase fringe_phase(const interferometer::CrossSectionModel& model, std::span<const double> data,
                         double idler_index = 1.0);

// Model fits ---------------------------------------------------------------------

struct FitResult {
    double n = 1.0;
    double alpha_cm = 0.0;
    double amplitude = 0.0;
    /// 2 x 2 block over (n, alpha).
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
    double sigma_n = 0.0;
    double sigma_alpha = 0.0;
    double ci_n = 0.0;
    double ci_alpha = 0.0;
    double confidence = 0.95;
    double residual_norm = 0.0;
    double reduced_chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
    bool n_indeterminate = false;
    bool near_unwrap_boundary = false;
    std::vector<std::string> warnings;
};

enum class Weighting { uniform, poisson };

struct FitOptions {
    LmOptions lm;
    /// Below this (envelope-normalised, relative to the model) visibility the phase
    /// is unconstrained and n is reported as indeterminate.
    double min_visibility = 0.02;
    /// alpha is capped at -ln(visibility_floor) / L_m.
    double visibility_floor = 1e-4;
    Weighting weighting = Weighting::uniform;
    double read_sigma = 0.0;
    /// Offsets tried across the unwrap window before the local fit.
    int phase_scan = 16;
};

/// Fits the two-crystal angular profile with free idler index, alpha and an amplitude
/// scale; every other quantity is fixed by `model`.
FitResult fit_cross_section(const interferometer::CrossSectionModel& model, std::span<const double> data,
                            double n0, double alpha0, const FitOptions& options = {});

// Spectra ------------------------------------------------------------------------

struct SkippedColumn {
    std::size_t column = 0;
    double signal_nm = 0.0;
    std::string reason;
};

struct RetrievedSpectrum {
    std::vector<double> idler_nm;  // ascending
    std::vector<double> n;
    std::vector<double> sigma_n;
    std::vector<double> alpha_cm;
    std::vector<double> sigma_alpha;
    std::vector<bool> converged;
    std::vector<FitResult> sample_fits;
    std::vector<FitResult> reference_fits;
    std::vector<SkippedColumn> skipped;
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return idler_nm.size(); }
};

struct RetrievalOptions {
    FitOptions fit;
    /// Visible gap indices assumed for the sample; the reference is always vacuum.
    double gap_signal_index = 1.0;
    double gap_pump_index = 1.0;
    /// Columns whose reference visibility falls below this are skipped.
    double min_reference_visibility = 0.05;
    /// Poisson weights when the sample map carries a noise record.
    bool auto_weighting = true;
};

/// Per column: the reference is fitted with the vacuum model and the sample with the
/// gas model. Reported n = n_sample - (n_reference - 1) and alpha = alpha_sample -
/// alpha_reference, which removes any model mismatch common to both maps.
RetrievedSpectrum retrieve_spectrum(const interferometer::InterferogramMap& sample,
                                    const interferometer::InterferogramMap& reference,
                                    const interferometer::InstrumentConfig& config,
                                    const RetrievalOptions& options = {});

struct SpectrumSummary {
    double peak_alpha_cm = 0.0;
    double peak_idler_nm = 0.0;
    double fwhm_nm = 0.0;
    bool fwhm_resolved = false;  // both half-maximum crossings lie inside the band
    std::size_t points = 0;
    std::size_t skipped = 0;
};

SpectrumSummary summarize(const RetrievedSpectrum& spectrum);
std::string format_summary(const SpectrumSummary& summary);

/// CSV columns: idler_nm, n, sigma_n, alpha_cm-1, sigma_alpha_cm-1, converged.
std::string spectrum_to_csv(const RetrievedSpectrum& spectrum);
RetrievedSpectrum spectrum_from_csv(std::string_view text);

struct KkComparison {
    std::vector<double> idler_nm;
    std::vector<double> n_retrieved;
    std::vector<double> n_kk;
    std::vector<double> sigma_combined;
    std::size_t within = 0;
    double fraction_within = 0.0;
};

/// Kramers-Kronig index implied by the retrieved alpha (resampled onto a uniform
/// wavenumber grid) against the retrieved n. The KK uncertainty is propagated from
/// sigma_alpha through the linear resample-transform-interpolate chain.
KkComparison kk_consistency(const RetrievedSpectrum& spectrum, double baseline, double coverage_sigma = 1.0);

}  // namespace nlir::retrieval
