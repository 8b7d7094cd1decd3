#include "nlir/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nlir/constants.hpp"
#include "nlir/error.hpp"
#include "nlir/kk.hpp"

namespace nlir::interferometer {

using constants::two_pi;

namespace {

constexpr double kParaxialLimit = 0.1;

double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

/// k (1 - cos theta), written to avoid cancellation.
double tilt(double k, double theta) {
    const double s = std::sin(0.5 * theta);
    return 2.0 * k * s * s;
}

double um(double nm) { return nm * 1e-3; }

/// Gap mismatch per unit length (rad/um) in the excess form: the vacuum collinear
/// terms cancel exactly by energy conservation, leaving index excesses and tilts.
double gap_mismatch_per_um(double visible_excess, double idler_um, double idler_index, double signal_tilt,
                           double transverse_k) {
    const double ki = two_pi * idler_index / idler_um;
    const double theta_i = transverse_k / ki;
    return visible_excess - two_pi * (idler_index - 1.0) / idler_um + signal_tilt + tilt(ki, theta_i);
}

}  // namespace

void Geometry::validate() const {
    if (!(crystal_mm > 0.0)) throw DomainError("crystal thickness must be positive");
    if (!(gap_mm > 0.0)) throw DomainError("gap length must be positive");
}

void DetectorSpec::validate() const {
    if (!(focal_mm > 0.0) || !(pitch_um > 0.0)) throw DomainError("detector focal length and pitch must be positive");
    if (angle_pixels < 2 || wavelength_pixels < 2) throw DomainError("detector needs at least 2 pixels per axis");
    if (!(wavelength_min_nm > 0.0) || !(wavelength_max_nm > wavelength_min_nm)) {
        throw DomainError("detector wavelength span must be positive and increasing");
    }
    if (!(resolution_fwhm_nm >= 0.0)) throw DomainError("resolution FWHM must be non-negative");
    if (!(noise.mean_counts > 0.0) || !(noise.read_sigma >= 0.0)) throw DomainError("invalid noise model");
}

void InstrumentConfig::validate() const {
    if (!(pump.wavelength_nm > 0.0) || !(pump.waist_mm > 0.0)) throw DomainError("pump wavelength and waist must be positive");
    crystal.validate();
    geometry.validate();
    detector.validate();
}

double signal_wavelength(double pump_nm, double idler_nm) {
    if (!(pump_nm > 0.0)) throw DomainError("pump wavelength must be positive");
    if (!(idler_nm > pump_nm)) throw DomainError("idler wavelength must exceed the pump wavelength");
    return 1.0 / (1.0 / pump_nm - 1.0 / idler_nm);
}

double idler_wavelength(double pump_nm, double signal_nm) {
    if (!(pump_nm > 0.0)) throw DomainError("pump wavelength must be positive");
    if (!(signal_nm > pump_nm)) throw DomainError("signal wavelength must exceed the pump wavelength");
    return 1.0 / (1.0 / pump_nm - 1.0 / signal_nm);
}

double conjugate_angle(double signal_k, double idler_k, double signal_angle_rad) {
    if (!(std::abs(signal_angle_rad) < kParaxialLimit)) throw DomainError("conjugate_angle: non-paraxial signal angle");
    if (!(signal_k > 0.0) || !(idler_k > 0.0)) throw DomainError("conjugate_angle: wavevectors must be positive");
    return signal_k * signal_angle_rad / idler_k;
}

double phase_mismatch_crystal(double signal_nm, double angle_rad, const dispersion::UniaxialCrystalIndex& crystal,
                              const PumpSpec& pump, const Geometry& geometry) {
    const double idler_nm = idler_wavelength(pump.wavelength_nm, signal_nm);
    const double ns = crystal.ordinary.index(um(signal_nm));
    const double ni = crystal.ordinary.index(um(idler_nm));
    const double np = dispersion::uniaxial_index(crystal, um(pump.wavelength_nm), pump.axis_angle_rad);
    const double ks = dispersion::wavevector(ns, um(signal_nm));
    const double ki = dispersion::wavevector(ni, um(idler_nm));
    const double kp = dispersion::wavevector(np, um(pump.wavelength_nm));
    if (!(std::abs(angle_rad) < kParaxialLimit)) throw DomainError("phase_mismatch_crystal: non-paraxial angle");
    const double theta_s = angle_rad / ns;
    const double theta_i = conjugate_angle(ks, ki, theta_s);
    return (kp - ks - ki + tilt(ks, theta_s) + tilt(ki, theta_i)) * geometry.crystal_mm * 1e3;
}

double phase_gap(double signal_nm, double angle_rad, double pump_nm, const GapIndices& gap, const Geometry& geometry) {
    const double idler_nm = idler_wavelength(pump_nm, signal_nm);
    if (!(gap.signal >= 1.0) || !(gap.pump >= 1.0) || !(gap.idler >= 1.0)) {
        throw DomainError("phase_gap: gap indices below 1");
    }
    if (!(std::abs(angle_rad) < kParaxialLimit)) throw DomainError("phase_gap: non-paraxial angle");
    const double ks = dispersion::wavevector(gap.signal, um(signal_nm));
    const double theta_s = angle_rad / gap.signal;
    const double visible = two_pi * ((gap.pump - 1.0) / um(pump_nm) - (gap.signal - 1.0) / um(signal_nm));
    return gap_mismatch_per_um(visible, um(idler_nm), gap.idler, tilt(ks, theta_s), ks * theta_s) * geometry.gap_mm * 1e3;
}

double phase_matching_angle(const dispersion::UniaxialCrystalIndex& crystal, double pump_nm, double signal_nm) {
    const double idler_nm = idler_wavelength(pump_nm, signal_nm);
    const double ns = crystal.ordinary.index(um(signal_nm));
    const double ni = crystal.ordinary.index(um(idler_nm));
    const double no = crystal.ordinary.index(um(pump_nm));
    const double ne = crystal.extraordinary.index(um(pump_nm));
    const double target = pump_nm * (ns / signal_nm + ni / idler_nm);
    const double s2 = (1.0 / (target * target) - 1.0 / (no * no)) / (1.0 / (ne * ne) - 1.0 / (no * no));
    if (!(s2 >= 0.0 && s2 <= 1.0)) throw DomainError("no collinear type-I phase matching for these wavelengths");
    return std::asin(std::sqrt(s2));
}

bool quasi_collinear(const PumpSpec& pump, const Geometry& geometry, double max_signal_angle_rad,
                     double max_idler_angle_rad) {
    const double theta = std::max(std::abs(max_signal_angle_rad), std::abs(max_idler_angle_rad));
    return pump.waist_mm >= 10.0 * geometry.gap_mm * theta;
}

double pixel_to_angle(int index, const DetectorSpec& detector) {
    if (index < 0 || index >= detector.angle_pixels) throw DomainError("pixel index outside the sensor");
    const double centre = 0.5 * (detector.angle_pixels - 1);
    return (index - centre) * detector.pitch_um * 1e-3 / detector.focal_mm;
}

std::vector<double> angle_axis(const DetectorSpec& detector) {
    std::vector<double> out(static_cast<std::size_t>(detector.angle_pixels));
    for (int i = 0; i < detector.angle_pixels; ++i) out[static_cast<std::size_t>(i)] = pixel_to_angle(i, detector);
    return out;
}

std::vector<double> wavelength_axis(const DetectorSpec& detector) {
    const auto n = static_cast<std::size_t>(detector.wavelength_pixels);
    std::vector<double> out(n);
    const double step = (detector.wavelength_max_nm - detector.wavelength_min_nm) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = detector.wavelength_min_nm + step * static_cast<double>(i);
    out.back() = detector.wavelength_max_nm;
    return out;
}

// GapResponse -------------------------------------------------------------------

GapResponse GapResponse::vacuum() { return uniform(1.0, 0.0); }

GapResponse GapResponse::uniform(double idler_index, double alpha_cm, double signal_index, double pump_index) {
    if (!(idler_index >= 1.0) || !(signal_index >= 1.0) || !(pump_index >= 1.0)) {
        throw DomainError("gap indices must be at least 1");
    }
    if (!(alpha_cm >= 0.0)) throw DomainError("gap absorption must be non-negative");
    GapResponse g;
    g.uniform_index_ = idler_index;
    g.uniform_alpha_ = alpha_cm;
    g.signal_index_ = signal_index;
    g.pump_index_ = pump_index;
    return g;
}

GapResponse GapResponse::tabulated(std::vector<double> idler_wn, std::vector<double> idler_index,
                                   std::vector<double> alpha_cm, double signal_index, double pump_index) {
    if (idler_wn.size() < 2 || idler_index.size() != idler_wn.size() || alpha_cm.size() != idler_wn.size()) {
        throw DomainError("tabulated gap response needs matching tables of at least 2 points");
    }
    for (std::size_t i = 1; i < idler_wn.size(); ++i) {
        if (!(idler_wn[i] > idler_wn[i - 1])) throw DomainError("gap response grid must be strictly increasing");
    }
    GapResponse g;
    g.grid_wn_ = std::move(idler_wn);
    g.index_ = std::move(idler_index);
    g.alpha_ = std::move(alpha_cm);
    g.signal_index_ = signal_index;
    g.pump_index_ = pump_index;
    return g;
}

bool GapResponse::covers(double idler_nm) const noexcept {
    if (is_uniform()) return true;
    const double wn = 1e7 / idler_nm;
    return wn >= grid_wn_.front() && wn <= grid_wn_.back();
}

double GapResponse::interpolate(const std::vector<double>& table, double idler_nm) const {
    if (!covers(idler_nm)) {
        std::ostringstream msg;
        msg << "gas response undefined at idler wavelength " << idler_nm << " nm";
        throw DomainError(msg.str());
    }
    const double wn = 1e7 / idler_nm;
    auto hi = std::upper_bound(grid_wn_.begin(), grid_wn_.end(), wn);
    if (hi == grid_wn_.end()) return table.back();
    if (hi == grid_wn_.begin()) return table.front();
    const auto i = static_cast<std::size_t>(hi - grid_wn_.begin());
    const double t = (wn - grid_wn_[i - 1]) / (grid_wn_[i] - grid_wn_[i - 1]);
    return table[i - 1] + t * (table[i] - table[i - 1]);
}

double GapResponse::idler_index(double idler_nm) const {
    return is_uniform() ? uniform_index_ : interpolate(index_, idler_nm);
}

double GapResponse::alpha_cm(double idler_nm) const {
    return is_uniform() ? uniform_alpha_ : interpolate(alpha_, idler_nm);
}

nlohmann::json GapResponse::describe() const {
    nlohmann::json j;
    j["signal_index"] = signal_index_;
    j["pump_index"] = pump_index_;
    if (is_uniform()) {
        j["kind"] = "uniform";
        j["idler_index"] = uniform_index_;
        j["alpha_cm-1"] = uniform_alpha_;
    } else {
        j["kind"] = "tabulated";
        j["grid_min_cm-1"] = grid_wn_.front();
        j["grid_max_cm-1"] = grid_wn_.back();
        j["grid_points"] = grid_wn_.size();
        j["alpha_peak_cm-1"] = *std::max_element(alpha_.begin(), alpha_.end());
    }
    return j;
}

double signal_fwhm_to_wn(double fwhm_nm, double signal_nm) {
    if (!(fwhm_nm >= 0.0) || !(signal_nm > 0.0)) throw DomainError("invalid resolution conversion");
    return 1e7 * fwhm_nm / (signal_nm * signal_nm);
}

GapResponse gas_response(const GasState& gas, double wn_min, double wn_max, const GasResponseOptions& options) {
    if (!(wn_max > wn_min) || !(wn_min > 0.0)) throw DomainError("gas_response: invalid wavenumber band");
    if (!(options.resolution_fwhm_wn >= 0.0)) throw DomainError("gas_response: negative resolution");
    const double n_visible = dispersion::gas_index(gas.visible_index, gas.pressure_torr, gas.temperature_k);

    const double hwhm = 0.5 * options.resolution_fwhm_wn;
    const double margin = 25.0 + 10.0 * hwhm;
    const double lo = std::max(wn_min - margin, 0.5 * wn_min);
    const double hi = wn_max + margin;
    const std::size_t max_points = std::max<std::size_t>(options.max_points, 16);
    double step = hwhm > 0.0 ? options.resolution_fwhm_wn / 10.0 : (hi - lo) / static_cast<double>(max_points - 1);
    auto points = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
    if (points > max_points) points = max_points;
    points = std::max<std::size_t>(points, 16);
    step = (hi - lo) / static_cast<double>(points - 1);
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) grid[i] = lo + step * static_cast<double>(i);

    lineshape::AbsorptionOptions abs_opts;
    abs_opts.self_fraction = gas.self_fraction;
    abs_opts.partition_ratio = gas.partition_ratio;
    abs_opts.instrument_hwhm_wn = hwhm;
    auto alpha = lineshape::absorption_spectrum(gas.lines, grid, gas.pressure_torr, gas.temperature_k, abs_opts);
    auto index = kk::kk_index_from_absorption(alpha, grid, n_visible - 1.0);
    for (auto& v : index.n_minus_1) v += 1.0;
    return GapResponse::tabulated(std::move(grid), std::move(index.n_minus_1), std::move(alpha), n_visible, n_visible);
}

// CrossSectionModel ---------------------------------------------------------------

CrossSectionModel::CrossSectionModel(const InstrumentConfig& config, double signal_nm, std::span<const double> angles,
                                     double gap_signal_index, double gap_pump_index)
    : signal_nm_(signal_nm),
      idler_nm_(idler_wavelength(config.pump.wavelength_nm, signal_nm)),
      gap_um_(config.geometry.gap_mm * 1e3),
      gap_signal_index_(gap_signal_index),
      gap_pump_index_(gap_pump_index) {
    if (!(gap_signal_index >= 1.0) || !(gap_pump_index >= 1.0)) throw DomainError("gap indices below 1");
    const double ls = um(signal_nm_);
    const double li = um(idler_nm_);
    const double lp = um(config.pump.wavelength_nm);
    const double ns = config.crystal.ordinary.index(ls);
    const double ni = config.crystal.ordinary.index(li);
    const double np = dispersion::uniaxial_index(config.crystal, lp, config.pump.axis_angle_rad);
    const double ks = dispersion::wavevector(ns, ls);
    const double ki = dispersion::wavevector(ni, li);
    const double kp = dispersion::wavevector(np, lp);
    const double crystal_um = config.geometry.crystal_mm * 1e3;
    const double ks_gap = dispersion::wavevector(gap_signal_index, ls);

    visible_excess_ = two_pi * ((gap_pump_index - 1.0) / lp - (gap_signal_index - 1.0) / ls);
    envelope_.resize(angles.size());
    crystal_phase_.resize(angles.size());
    transverse_k_.resize(angles.size());
    signal_tilt_.resize(angles.size());
    for (std::size_t j = 0; j < angles.size(); ++j) {
        const double theta = angles[j];
        if (!(std::abs(theta) < kParaxialLimit)) throw DomainError("cross-section angle outside the paraxial range");
        const double ts = theta / ns;
        const double ti = conjugate_angle(ks, ki, ts);
        const double delta = (kp - ks - ki + tilt(ks, ts) + tilt(ki, ti)) * crystal_um;
        crystal_phase_[j] = delta;
        const double s = sinc(0.5 * delta);
        envelope_[j] = s * s;
        const double ts_gap = theta / gap_signal_index;
        transverse_k_[j] = ks_gap * ts_gap;
        signal_tilt_[j] = tilt(ks_gap, ts_gap);
    }
}

double CrossSectionModel::gap_phase(std::size_t j, double idler_index) const {
    return gap_mismatch_per_um(visible_excess_, um(idler_nm_), idler_index, signal_tilt_[j], transverse_k_[j]) * gap_um_;
}

double CrossSectionModel::transmission(double alpha_cm) const { return std::exp(-alpha_cm * gap_um_ * 1e-4); }

void CrossSectionModel::intensity(double idler_index, double alpha_cm, double amplitude, std::span<double> out) const {
    if (out.size() != size()) throw DomainError("CrossSectionModel::intensity: output size mismatch");
    const double tau = transmission(alpha_cm);
    for (std::size_t j = 0; j < size(); ++j) {
        out[j] = 0.5 * amplitude * envelope_[j] * (1.0 + tau * std::cos(total_phase(j, idler_index)));
    }
}

std::vector<double> CrossSectionModel::intensity(double idler_index, double alpha_cm, double amplitude) const {
    std::vector<double> out(size());
    intensity(idler_index, alpha_cm, amplitude, out);
    return out;
}

std::vector<double> CrossSectionModel::vacuum_intensity() const {
    std::vector<double> out(size());
    for (std::size_t j = 0; j < size(); ++j) {
        out[j] = 0.5 * 1.0 * envelope_[j] * (1.0 + std::cos(total_phase(j, 1.0)));
    }
    return out;
}

// Maps -------------------------------------------------------------------------------

std::vector<double> InterferogramMap::column(std::size_t col) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, col);
    return out;
}

void InterferogramMap::validate() const {
    auto increasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (!(v[i] > v[i - 1])) return false;
        }
        return !v.empty();
    };
    if (!increasing(wavelength_nm)) throw DomainError("map wavelength axis must be strictly increasing");
    if (!increasing(angle_rad)) throw DomainError("map angle axis must be strictly increasing");
    if (intensity.size() != rows() * cols()) throw DomainError("map intensity size does not match its axes");
}

namespace {

nlohmann::json sellmeier_json(const dispersion::SellmeierModel& m) {
    nlohmann::json j;
    switch (m.form) {
        case dispersion::SellmeierForm::constant: j["form"] = "constant"; break;
        case dispersion::SellmeierForm::sellmeier: j["form"] = "sellmeier"; break;
        case dispersion::SellmeierForm::pole: j["form"] = "pole"; break;
    }
    j["A"] = m.a;
    j["D"] = m.d_um2;
    auto terms = nlohmann::json::array();
    for (const auto& t : m.terms) terms.push_back({t.strength, t.resonance_um2});
    j["terms"] = terms;
    j["min_um"] = m.min_um;
    j["max_um"] = m.max_um;
    return j;
}

InterferogramMap blank_map(const InstrumentConfig& config) {
    config.validate();
    InterferogramMap map;
    map.wavelength_nm = wavelength_axis(config.detector);
    map.angle_rad = angle_axis(config.detector);
    map.intensity.assign(map.rows() * map.cols(), 0.0);
    map.metadata["format"] = "nlir-map";
    map.metadata["angle_convention"] = "external";
    map.metadata["intensity_units"] = "envelope peak = 1";
    map.metadata["config"] = to_json(config);
    map.metadata["seed"] = nullptr;
    map.metadata["noise"] = nullptr;
    map.metadata["instrument_fwhm_nm"] = 0.0;
    return map;
}

}  // namespace

nlohmann::json to_json(const InstrumentConfig& c) {
    nlohmann::json j;
    j["pump"] = {{"wavelength_nm", c.pump.wavelength_nm},
                 {"waist_mm", c.pump.waist_mm},
                 {"axis_angle_rad", c.pump.axis_angle_rad}};
    j["crystal"] = {{"name", c.crystal.name},
                    {"cut_angle_rad", c.crystal.cut_angle_rad},
                    {"ordinary", sellmeier_json(c.crystal.ordinary)},
                    {"extraordinary", sellmeier_json(c.crystal.extraordinary)}};
    j["geometry"] = {{"crystal_thickness_mm", c.geometry.crystal_mm}, {"gap_mm", c.geometry.gap_mm}};
    const auto& d = c.detector;
    j["detector"] = {{"focal_length_mm", d.focal_mm},
                     {"pixel_pitch_um", d.pitch_um},
                     {"angle_pixels", d.angle_pixels},
                     {"wavelength_pixels", d.wavelength_pixels},
                     {"wavelength_min_nm", d.wavelength_min_nm},
                     {"wavelength_max_nm", d.wavelength_max_nm},
                     {"resolution_fwhm_nm", d.resolution_fwhm_nm},
                     {"mean_counts", d.noise.mean_counts},
                     {"read_noise_counts", d.noise.read_sigma}};
    return j;
}

InterferogramMap intensity_map(const InstrumentConfig& config, const GapResponse& gas) {
    auto map = blank_map(config);
    map.metadata["gas"] = gas.describe();
    std::vector<double> col(map.rows());
    for (std::size_t c = 0; c < map.cols(); ++c) {
        const CrossSectionModel model(config, map.wavelength_nm[c], map.angle_rad, gas.signal_index(), gas.pump_index());
        const double idler = model.idler_nm();
        model.intensity(gas.idler_index(idler), gas.alpha_cm(idler), 1.0, col);
        for (std::size_t r = 0; r < map.rows(); ++r) map.at(r, c) = col[r];
    }
    return map;
}

InterferogramMap vacuum_map(const InstrumentConfig& config) {
    auto map = blank_map(config);
    map.metadata["gas"] = GapResponse::vacuum().describe();
    for (std::size_t c = 0; c < map.cols(); ++c) {
        const CrossSectionModel model(config, map.wavelength_nm[c], map.angle_rad, 1.0, 1.0);
        const auto col = model.vacuum_intensity();
        for (std::size_t r = 0; r < map.rows(); ++r) map.at(r, c) = col[r];
    }
    return map;
}

InterferogramMap apply_instrument(InterferogramMap map, double fwhm_nm) {
    if (!(fwhm_nm >= 0.0)) throw DomainError("apply_instrument: negative FWHM");
    map.validate();
    if (fwhm_nm == 0.0) return map;
    const double sigma = fwhm_nm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double reach = 5.0 * sigma;
    const auto& wl = map.wavelength_nm;
    const std::size_t n = map.cols();
    // Per-output-column kernel, renormalised where it is truncated by the sensor edge.
    std::vector<std::size_t> first(n), last(n);
    std::vector<std::vector<double>> weights(n);
    for (std::size_t c = 0; c < n; ++c) {
        first[c] = static_cast<std::size_t>(std::lower_bound(wl.begin(), wl.end(), wl[c] - reach) - wl.begin());
        last[c] = static_cast<std::size_t>(std::upper_bound(wl.begin(), wl.end(), wl[c] + reach) - wl.begin());
        double total = 0.0;
        for (std::size_t k = first[c]; k < last[c]; ++k) {
            const double u = (wl[k] - wl[c]) / sigma;
            weights[c].push_back(std::exp(-0.5 * u * u));
            total += weights[c].back();
        }
        for (auto& w : weights[c]) w /= total;
    }
    std::vector<double> out(map.intensity.size(), 0.0);
    for (std::size_t r = 0; r < map.rows(); ++r) {
        const double* row = &map.intensity[r * n];
        for (std::size_t c = 0; c < n; ++c) {
            double acc = 0.0;
            for (std::size_t k = first[c]; k < last[c]; ++k) acc += weights[c][k - first[c]] * row[k];
            out[r * n + c] = acc;
        }
    }
    map.intensity = std::move(out);
    map.metadata["instrument_fwhm_nm"] = fwhm_nm;
    return map;
}

InterferogramMap add_noise(InterferogramMap map, const NoiseModel& noise, std::uint64_t seed) {
    if (!(noise.mean_counts > 0.0) || !(noise.read_sigma >= 0.0)) throw DomainError("add_noise: invalid noise model");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> read(0.0, 1.0);
    for (auto& v : map.intensity) {
        const double mean = std::max(v, 0.0) * noise.mean_counts;
        double counts = 0.0;
        if (mean > 0.0) {
            std::poisson_distribution<long long> shot(mean);
            counts = static_cast<double>(shot(rng));
        }
        if (noise.read_sigma > 0.0) counts += noise.read_sigma * read(rng);
        v = std::max(counts, 0.0);
    }
    map.metadata["seed"] = seed;
    map.metadata["noise"] = {{"mean_counts", noise.mean_counts}, {"read_noise_counts", noise.read_sigma}};
    return map;
}

}  // namespace nlir::interferometer
