#include "nlir/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "nlir/constants.hpp"
#include "nlir/error.hpp"
#include "nlir/kk.hpp"
#include "text.hpp"

namespace nlir::retrieval {

using constants::two_pi;
using interferometer::CrossSectionModel;
using interferometer::InterferogramMap;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kVisibilitySlack = 1e-2;

double median(std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

double percentile(std::vector<double> v, double q) {
    const auto k = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

/// Vertex value of the parabola through three equally spaced samples; the middle
/// sample when the vertex would fall outside the bracket.
double refine_extremum(double y0, double y1, double y2) {
    const double curvature = y0 - 2.0 * y1 + y2;
    if (curvature == 0.0) return y1;
    const double offset = 0.5 * (y0 - y2) / curvature;
    if (std::abs(offset) > 1.0) return y1;
    return y1 - (y2 - y0) * (y2 - y0) / (8.0 * curvature);
}

/// Mean level from a least-squares degree-4 polynomial in normalised pixel index.
std::vector<double> polynomial_level(std::span<const double> y) {
    const auto n = static_cast<Eigen::Index>(y.size());
    Eigen::MatrixXd a(n, 5);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = n > 1 ? 2.0 * static_cast<double>(i) / static_cast<double>(n - 1) - 1.0 : 0.0;
        double p = 1.0;
        for (int k = 0; k < 5; ++k) {
            a(i, k) = p;
            p *= x;
        }
        b[i] = y[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    const Eigen::VectorXd level = a * c;
    return {level.data(), level.data() + n};
}

std::vector<double> inverse_sigma(std::span<const double> reference, const FitOptions& o) {
    std::vector<double> w(reference.size(), 1.0);
    if (o.weighting == Weighting::poisson) {
        for (std::size_t j = 0; j < reference.size(); ++j) {
            w[j] = 1.0 / std::sqrt(std::max(reference[j], 1.0) + o.read_sigma * o.read_sigma);
        }
    }
    return w;
}

/// Best amplitude for a fixed shape under weights w (linear least squares).
double best_amplitude(std::span<const double> shape, std::span<const double> data, std::span<const double> w) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < shape.size(); ++j) {
        const double ww = w[j] * w[j];
        num += ww * shape[j] * data[j];
        den += ww * shape[j] * shape[j];
    }
    return den > 0.0 ? num / den : 0.0;
}

double weighted_cost(std::span<const double> model, std::span<const double> data, std::span<const double> w) {
    double s = 0.0;
    for (std::size_t j = 0; j < model.size(); ++j) {
        const double r = (model[j] - data[j]) * w[j];
        s += r * r;
    }
    return s;
}

struct LmRun {
    LmResult lm;
    double n0 = 1.0;
};

LmRun run_fit(const CrossSectionModel& model, std::span<const double> data, std::span<const double> w, double n0,
              double dn0, double alpha0, double amp0, const FitOptions& o, double dn_scale) {
    std::vector<double> scratch(model.size());
    const ResidualFn fn = [&](std::span<const double> p, std::span<double> r) {
        model.intensity(n0 + p[0], p[1], p[2], scratch);
        for (std::size_t j = 0; j < scratch.size(); ++j) r[j] = (scratch[j] - data[j]) * w[j];
    };
    LmOptions lm = o.lm;
    if (lm.typical.empty()) lm.typical = {dn_scale, 0.01, std::max(std::abs(amp0), 1e-300)};
    return {levenberg_marquardt(fn, {dn0, alpha0, amp0}, model.size(), lm), n0};
}

}  // namespace

// Direct estimators -------------------------------------------------------------------

double visibility(std::span<const double> cs, std::span<const double> envelope) {
    if (cs.size() < 5) throw DomainError("visibility: cross-section needs at least 5 samples");
    bool any = false;
    for (double v : cs) {
        if (!std::isfinite(v)) throw DomainError("visibility: non-finite sample");
        any = any || v != 0.0;
    }
    if (!any) throw DomainError("visibility: all-zero cross-section");
    if (!envelope.empty() && envelope.size() != cs.size()) throw DomainError("visibility: envelope size mismatch");

    const std::vector<double> level =
        envelope.empty() ? polynomial_level(cs) : std::vector<double>(envelope.begin(), envelope.end());
    const double level_max = *std::max_element(level.begin(), level.end());
    if (!(level_max > 0.0)) throw DomainError("visibility: envelope is not positive");
    std::vector<double> y;
    y.reserve(cs.size());
    for (std::size_t j = 0; j < cs.size(); ++j) {
        if (level[j] > 0.05 * level_max) y.push_back(cs[j] / level[j]);
    }
    if (y.size() < 5) throw DomainError("visibility: envelope leaves fewer than 5 usable samples");

    const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
    const double ymin = *lo_it, ymax = *hi_it;
    if (ymax - ymin <= 1e-9 * std::max(std::abs(ymax), std::abs(ymin))) return 0.0;

    double p_lo = percentile(y, 0.05), p_hi = percentile(y, 0.95);
    if (!(p_hi > p_lo)) {
        p_lo = ymin;
        p_hi = ymax;
    }
    const double mid = 0.5 * (p_lo + p_hi);
    const double band = 0.3 * 0.5 * (p_hi - p_lo);

    // Half-fringe segments between hysteresis crossings of the mean level.
    struct Segment {
        std::size_t begin;
        int sign;
    };
    std::vector<Segment> segments;
    int state = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const int s = y[i] > mid + band ? 1 : (y[i] < mid - band ? -1 : 0);
        if (s != 0 && s != state) {
            segments.push_back({i, s});
            state = s;
        }
    }
    std::vector<double> maxima, minima;
    for (std::size_t k = 1; k + 1 < segments.size(); ++k) {
        const std::size_t b = segments[k].begin;
        const std::size_t e = segments[k + 1].begin;
        std::size_t best = b;
        for (std::size_t i = b; i < e; ++i) {
            if (segments[k].sign > 0 ? y[i] > y[best] : y[i] < y[best]) best = i;
        }
        const double v = (best > 0 && best + 1 < y.size()) ? refine_extremum(y[best - 1], y[best], y[best + 1]) : y[best];
        (segments[k].sign > 0 ? maxima : minima).push_back(v);
    }
    if (maxima.size() < 2 || minima.size() < 2) throw DomainError("visibility: fewer than 2 fringe periods");
    const double imax = median(std::move(maxima));
    const double imin = median(std::move(minima));
    if (!(imax + imin > 0.0)) throw DomainError("visibility: non-positive fringe level");
    return (imax - imin) / (imax + imin);
}

AlphaEstimate alpha_from_visibility(double v, double v_ref, double gap_mm) {
    if (!(gap_mm > 0.0)) throw DomainError("alpha_from_visibility: gap length must be positive");
    // Interpolated extrema can overshoot a perfect contrast slightly.
    if (!(v_ref > 0.0 && v_ref <= 1.0 + kVisibilitySlack)) {
        throw DomainError("alpha_from_visibility: reference visibility must lie in (0, 1]");
    }
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("alpha_from_visibility: visibility must be non-negative");
    if (v == 0.0) return {std::numeric_limits<double>::infinity(), AlphaStatus::opaque};
    const double alpha = -std::log(v / v_ref) / (gap_mm * 0.1);
    return {alpha, v > v_ref ? AlphaStatus::negative_absorption : AlphaStatus::ok};
}

double unwrap_halfwidth(double idler_nm, double gap_mm) {
    if (!(idler_nm > 0.0) || !(gap_mm > 0.0)) throw DomainError("unwrap_halfwidth: lengths must be positive");
    return idler_nm * 1e-6 / (2.0 * gap_mm);
}

double fringe_shift_to_index(double phase_shift_rad, double idler_nm, double gap_mm, double n_ref) {
    if (!(idler_nm > 0.0) || !(gap_mm > 0.0)) throw DomainError("fringe_shift_to_index: lengths must be positive");
    return n_ref + phase_shift_rad * (idler_nm * 1e-6) / (two_pi * gap_mm);
}

FringePhase fringe_phase(const CrossSectionModel& model, std::span<const double> data, double idler_index) {
    if (data.size() != model.size()) throw DomainError("fringe_phase: data size does not match the model");
    const auto n = static_cast<Eigen::Index>(data.size());
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    const auto env = model.envelope();
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i);
        const double phi = model.total_phase(j, idler_index);
        a(i, 0) = env[j];
        a(i, 1) = env[j] * std::cos(phi);
        a(i, 2) = env[j] * std::sin(phi);
        b[i] = data[j];
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
    if (!(c[0] > 0.0)) throw DomainError("fringe_phase: non-positive mean level");
    // data ~ c0 env (1 + V cos(phi + psi)) => c1 = c0 V cos psi, c2 = -c0 V sin psi.
    return {std::atan2(-c[2], c[1]), std::hypot(c[1], c[2]) / c[0], 2.0 * c[0]};
}

// Fits --------------------------------------------------------------------------------

FitResult fit_cross_section(const CrossSectionModel& model, std::span<const double> data, double n0, double alpha0,
                            const FitOptions& o) {
    if (data.size() != model.size()) throw DomainError("fit_cross_section: data size does not match the model");
    if (!std::isfinite(n0) || !std::isfinite(alpha0)) throw DomainError("fit_cross_section: non-finite start");
    for (double v : data) {
        if (!std::isfinite(v)) throw DomainError("fit_cross_section: non-finite data");
    }
    FitResult out;
    out.confidence = o.lm.confidence;
    const double gap_cm = model.gap_mm() * 0.1;
    const double alpha_cap = -std::log(o.visibility_floor) / gap_cm;
    const double halfwidth = unwrap_halfwidth(model.idler_nm(), model.gap_mm());

    double v_direct = kNaN;
    try {
        v_direct = visibility(data, model.envelope());
    } catch (const DomainError& e) {
        const std::string what = e.what();
        if (what.find("all-zero") != std::string::npos) throw;
    }

    if (std::isfinite(v_direct) && v_direct < o.min_visibility) {
        out.n = kNaN;
        out.sigma_n = kNaN;
        out.ci_n = kNaN;
        out.n_indeterminate = true;
        out.alpha_cm = std::min(-std::log(std::max(v_direct, o.visibility_floor)) / gap_cm, alpha_cap);
        std::vector<double> shape(model.size());
        model.intensity(n0, out.alpha_cm, 1.0, shape);
        const auto w = inverse_sigma(data, o);
        out.amplitude = best_amplitude(shape, data, w);
        out.converged = true;
        out.warnings.push_back("visibility below " + std::to_string(o.min_visibility) + "; index indeterminate");
        return out;
    }

    // Coarse scan over the unwrap window puts the local fit in the right fringe.
    std::vector<double> w = inverse_sigma(data, o);
    std::vector<double> shape(model.size());
    double best_dn = 0.0, best_amp = 0.0, best_cost = std::numeric_limits<double>::infinity();
    const int scan = std::max(o.phase_scan, 1);
    for (int k = 0; k < scan; ++k) {
        const double dn = scan == 1 ? 0.0 : halfwidth * (2.0 * k / scan - 1.0);
        model.intensity(n0 + dn, alpha0, 1.0, shape);
        const double amp = best_amplitude(shape, data, w);
        for (auto& s : shape) s *= amp;
        const double cost = weighted_cost(shape, data, w);
        if (cost < best_cost || (cost == best_cost && std::abs(dn) < std::abs(best_dn))) {
            best_cost = cost;
            best_dn = dn;
            best_amp = amp;
        }
    }
    if (!(best_amp > 0.0)) {
        model.intensity(n0, alpha0, 1.0, shape);
        best_amp = std::max(best_amplitude(shape, data, w), 1e-300);
        best_dn = 0.0;
    }

    const double dn_scale = halfwidth / 16.0;
    auto run = run_fit(model, data, w, n0, best_dn, alpha0, best_amp, o, dn_scale);
    if (o.weighting == Weighting::poisson) {
        // Second pass with variances from the fitted model instead of the counts.
        const auto& p = run.lm.params;
        std::vector<double> fitted(model.size());
        model.intensity(n0 + p[0], p[1], p[2], fitted);
        w = inverse_sigma(fitted, o);
        run = run_fit(model, data, w, n0, p[0], p[1], p[2], o, dn_scale);
    }
    const auto& lm = run.lm;
    out.n = n0 + lm.params[0];
    out.alpha_cm = lm.params[1];
    out.amplitude = lm.params[2];
    out.covariance = lm.covariance.topLeftCorner<2, 2>();
    out.sigma_n = lm.sigma[0];
    out.sigma_alpha = lm.sigma[1];
    out.ci_n = lm.ci_halfwidth[0];
    out.ci_alpha = lm.ci_halfwidth[1];
    out.residual_norm = lm.residual_norm;
    out.reduced_chi2 = lm.reduced_chi2;
    out.iterations = lm.iterations;
    out.converged = lm.converged;
    out.warnings = lm.warnings;

    if (model.transmission(out.alpha_cm) < o.min_visibility) {
        out.n_indeterminate = true;
        out.warnings.push_back("fitted transmission below " + std::to_string(o.min_visibility) + "; index indeterminate");
        out.n = kNaN;
        out.sigma_n = kNaN;
        out.ci_n = kNaN;
        out.alpha_cm = std::min(out.alpha_cm, alpha_cap);
    } else if (std::abs(lm.params[0]) + out.ci_n >= 0.9 * halfwidth) {
        out.near_unwrap_boundary = true;
        out.warnings.push_back("index confidence interval reaches the single-fringe unwrap boundary");
    }
    return out;
}

// Spectra -----------------------------------------------------------------------------

namespace {

void require_same_axes(const InterferogramMap& a, const InterferogramMap& b) {
    auto same = [](const std::vector<double>& x, const std::vector<double>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (std::abs(x[i] - y[i]) > 1e-12 * std::max(std::abs(x[i]), 1e-300)) return false;
        }
        return true;
    };
    if (!same(a.wavelength_nm, b.wavelength_nm)) {
        throw IncompatibleDataError("sample and reference maps have different wavelength axes");
    }
    if (!same(a.angle_rad, b.angle_rad)) throw IncompatibleDataError("sample and reference maps have different angle axes");
}

struct ColumnOutcome {
    bool kept = false;
    std::string reason;
    FitResult sample;
    FitResult reference;
    double idler_nm = 0.0;
};

}  // namespace

RetrievedSpectrum retrieve_spectrum(const InterferogramMap& sample, const InterferogramMap& reference,
                                    const interferometer::InstrumentConfig& config, const RetrievalOptions& options) {
    sample.validate();
    reference.validate();
    config.validate();
    require_same_axes(sample, reference);

    FitOptions fit = options.fit;
    if (options.auto_weighting) {
        const auto it = sample.metadata.find("noise");
        if (it != sample.metadata.end() && it->is_object()) {
            fit.weighting = Weighting::poisson;
            fit.read_sigma = it->value("read_noise_counts", 0.0);
        }
    }
    const double gap_cm = config.geometry.gap_mm * 0.1;
    const std::size_t cols = sample.cols();
    std::vector<ColumnOutcome> outcome(cols);
    std::vector<std::string> errors(cols);

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(cols); ++ci) {
        const auto c = static_cast<std::size_t>(ci);
        auto& out = outcome[c];
        try {
            const double signal_nm = sample.wavelength_nm[c];
            const CrossSectionModel ref_model(config, signal_nm, reference.angle_rad, 1.0, 1.0);
            const CrossSectionModel gas_model(config, signal_nm, sample.angle_rad, options.gap_signal_index,
                                              options.gap_pump_index);
            out.idler_nm = ref_model.idler_nm();
            const auto ref = reference.column(c);
            const auto data = sample.column(c);
            double v_ref = 0.0;
            try {
                v_ref = visibility(ref, ref_model.envelope());
            } catch (const DomainError& e) {
                out.reason = std::string("reference: ") + e.what();
                continue;
            }
            if (v_ref < options.min_reference_visibility) {
                out.reason = "reference visibility " + std::to_string(v_ref) + " below threshold";
                continue;
            }
            double alpha0 = 0.0;
            try {
                const double v = visibility(data, gas_model.envelope());
                if (v > 0.0) alpha0 = std::max(0.0, -std::log(v / v_ref) / gap_cm);
            } catch (const DomainError&) {
            }
            out.reference = fit_cross_section(ref_model, ref, 1.0, std::max(0.0, -std::log(std::min(v_ref, 1.0)) / gap_cm), fit);
            out.sample = fit_cross_section(gas_model, data, 1.0, alpha0 + out.reference.alpha_cm, fit);
            out.kept = true;
        } catch (const std::exception& e) {
            errors[c] = e.what();
        }
    }
    for (std::size_t c = 0; c < cols; ++c) {
        if (!errors[c].empty()) throw DomainError("column " + std::to_string(c) + ": " + errors[c]);
    }

    RetrievedSpectrum s;
    // Idler wavelength falls as signal wavelength rises: walk the columns backwards.
    for (std::size_t k = cols; k-- > 0;) {
        const auto& o = outcome[k];
        if (!o.kept) {
            s.skipped.push_back({k, sample.wavelength_nm[k], o.reason});
            continue;
        }
        s.idler_nm.push_back(o.idler_nm);
        const bool indeterminate = o.sample.n_indeterminate || o.reference.n_indeterminate;
        s.n.push_back(indeterminate ? kNaN : o.sample.n - (o.reference.n - 1.0));
        s.sigma_n.push_back(indeterminate ? kNaN : std::hypot(o.sample.sigma_n, o.reference.sigma_n));
        s.alpha_cm.push_back(o.sample.alpha_cm - o.reference.alpha_cm);
        s.sigma_alpha.push_back(std::hypot(o.sample.sigma_alpha, o.reference.sigma_alpha));
        s.converged.push_back(o.sample.converged && o.reference.converged);
        s.sample_fits.push_back(o.sample);
        s.reference_fits.push_back(o.reference);
        if (o.sample.near_unwrap_boundary) {
            s.warnings.push_back("idler " + std::to_string(o.idler_nm) + " nm: index near the unwrap boundary");
        }
    }
    std::reverse(s.skipped.begin(), s.skipped.end());
    if (!s.skipped.empty()) s.warnings.push_back(std::to_string(s.skipped.size()) + " column(s) skipped");
    return s;
}

SpectrumSummary summarize(const RetrievedSpectrum& s) {
    SpectrumSummary out;
    out.points = s.size();
    out.skipped = s.skipped.size();
    std::size_t peak = s.size();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!std::isfinite(s.alpha_cm[i])) continue;
        if (peak == s.size() || s.alpha_cm[i] > s.alpha_cm[peak]) peak = i;
    }
    if (peak == s.size()) return out;
    out.peak_alpha_cm = s.alpha_cm[peak];
    out.peak_idler_nm = s.idler_nm[peak];
    if (!(out.peak_alpha_cm > 0.0)) return out;
    const double half = 0.5 * out.peak_alpha_cm;
    auto crossing = [&](int dir) -> std::optional<double> {
        for (auto i = static_cast<std::ptrdiff_t>(peak);; i += dir) {
            const auto j = i + dir;
            if (j < 0 || j >= static_cast<std::ptrdiff_t>(s.size())) return std::nullopt;
            const double a = s.alpha_cm[static_cast<std::size_t>(i)];
            const double b = s.alpha_cm[static_cast<std::size_t>(j)];
            if (std::isfinite(b) && b <= half) {
                const double t = (a - half) / (a - b);
                const double xa = s.idler_nm[static_cast<std::size_t>(i)];
                const double xb = s.idler_nm[static_cast<std::size_t>(j)];
                return xa + t * (xb - xa);
            }
        }
    };
    const auto left = crossing(-1);
    const auto right = crossing(1);
    if (left && right) {
        out.fwhm_nm = *right - *left;
        out.fwhm_resolved = true;
    }
    return out;
}

std::string format_summary(const SpectrumSummary& s) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "points: %zu (skipped %zu)\n", s.points, s.skipped);
    os << buf;
    std::snprintf(buf, sizeof buf, "peak alpha: %.6g cm^-1 at %.6g nm\n", s.peak_alpha_cm, s.peak_idler_nm);
    os << buf;
    if (s.fwhm_resolved) {
        std::snprintf(buf, sizeof buf, "absorption FWHM: %.6g nm\n", s.fwhm_nm);
    } else {
        std::snprintf(buf, sizeof buf, "absorption FWHM: not resolved inside the band\n");
    }
    os << buf;
    return os.str();
}

std::string spectrum_to_csv(const RetrievedSpectrum& s) {
    std::string out = "idler_nm,n,sigma_n,alpha_cm-1,sigma_alpha_cm-1,converged\n";
    char buf[512];
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", s.idler_nm[i], s.n[i], s.sigma_n[i],
                      s.alpha_cm[i], s.sigma_alpha[i], s.converged[i] ? 1 : 0);
        out += buf;
    }
    return out;
}

RetrievedSpectrum spectrum_from_csv(std::string_view text) {
    RetrievedSpectrum s;
    bool header = false;
    std::size_t row = 0;
    for (auto line : text::lines(text)) {
        ++row;
        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto f = text::split(line, ',');
        if (!header) {
            if (f.size() != 6 || text::trim(f[0]) != "idler_nm" || text::trim(f[3]) != "alpha_cm-1") {
                throw ParseError("spectrum CSV: unexpected header");
            }
            header = true;
            continue;
        }
        if (f.size() != 6) throw ParseError("spectrum CSV line " + std::to_string(row) + ": expected 6 fields");
        double v[5];
        for (int k = 0; k < 5; ++k) {
            if (!text::try_parse_double(f[static_cast<std::size_t>(k)], v[k])) {
                throw ParseError("spectrum CSV line " + std::to_string(row) + ": bad number");
            }
        }
        const auto conv = text::trim(f[5]);
        if (conv != "0" && conv != "1") throw ParseError("spectrum CSV line " + std::to_string(row) + ": converged must be 0 or 1");
        s.idler_nm.push_back(v[0]);
        s.n.push_back(v[1]);
        s.sigma_n.push_back(v[2]);
        s.alpha_cm.push_back(v[3]);
        s.sigma_alpha.push_back(v[4]);
        s.converged.push_back(conv == "1");
    }
    if (!header) throw ParseError("spectrum CSV: missing header");
    return s;
}

namespace {

/// Row-major (targets x sources) linear-interpolation matrix; sources ascending.
Eigen::MatrixXd interpolation_matrix(const std::vector<double>& sources, const std::vector<double>& targets) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(targets.size()),
                                              static_cast<Eigen::Index>(sources.size()));
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const double x = targets[t];
        auto it = std::upper_bound(sources.begin(), sources.end(), x);
        std::size_t hi = static_cast<std::size_t>(it - sources.begin());
        hi = std::clamp<std::size_t>(hi, 1, sources.size() - 1);
        const std::size_t lo = hi - 1;
        const double u = std::clamp((x - sources[lo]) / (sources[hi] - sources[lo]), 0.0, 1.0);
        m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(lo)) = 1.0 - u;
        m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(hi)) += u;
    }
    return m;
}

}  // namespace

KkComparison kk_consistency(const RetrievedSpectrum& s, double baseline, double coverage_sigma) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (std::isfinite(s.n[i]) && std::isfinite(s.alpha_cm[i]) && std::isfinite(s.sigma_n[i]) &&
            std::isfinite(s.sigma_alpha[i])) {
            keep.push_back(i);
        }
    }
    if (keep.size() < 8) throw DomainError("kk_consistency: fewer than 8 usable spectrum points");
    // Ascending wavenumber = descending wavelength.
    std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) { return s.idler_nm[a] > s.idler_nm[b]; });
    const std::size_t n = keep.size();
    std::vector<double> wn(n);
    Eigen::VectorXd alpha(static_cast<Eigen::Index>(n)), sigma_a(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        wn[k] = 1e7 / s.idler_nm[keep[k]];
        alpha[static_cast<Eigen::Index>(k)] = s.alpha_cm[keep[k]];
        sigma_a[static_cast<Eigen::Index>(k)] = s.sigma_alpha[keep[k]];
    }
    std::vector<double> uniform(n);
    for (std::size_t k = 0; k < n; ++k) {
        uniform[k] = wn.front() + (wn.back() - wn.front()) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    const auto op = kk::kk_operator(uniform);
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> kmat(
        op.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const Eigen::MatrixXd chain = interpolation_matrix(uniform, wn) * kmat * interpolation_matrix(wn, uniform);
    const Eigen::VectorXd n_kk = chain * alpha;
    const Eigen::VectorXd var_kk = chain.cwiseAbs2() * sigma_a.cwiseAbs2();

    KkComparison out;
    for (std::size_t r = n; r-- > 0;) {
        const auto i = keep[r];
        const auto e = static_cast<Eigen::Index>(r);
        out.idler_nm.push_back(s.idler_nm[i]);
        out.n_retrieved.push_back(s.n[i]);
        out.n_kk.push_back(1.0 + baseline + n_kk[e]);
        const double sc = std::sqrt(s.sigma_n[i] * s.sigma_n[i] + var_kk[e]);
        out.sigma_combined.push_back(sc);
        if (std::abs(out.n_retrieved.back() - out.n_kk.back()) <= coverage_sigma * sc) ++out.within;
    }
    out.fraction_within = static_cast<double>(out.within) / static_cast<double>(n);
    return out;
}

}  // namespace nlir::retrieval
