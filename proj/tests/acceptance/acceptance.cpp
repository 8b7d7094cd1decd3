// Acceptance suite: one PASS/FAIL line per criterion. Values marked "oracle" are
// computed here independently of the library code path under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlir/config.hpp"
#include "nlir/interferometer.hpp"
#include "nlir/kk.hpp"
#include "nlir/lineshape.hpp"
#include "nlir/retrieval.hpp"

using namespace nlir;
namespace ifm = nlir::interferometer;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Tally {
    int failed = 0;
    void report(int id, const char* name, bool pass, const std::string& detail) {
        std::printf("[%s] criterion %d: %s -- %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failed;
    }
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0, double e = 0) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a, b, c, d, e);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

config::RunConfig default_config() { return config::load_run_config(NLIR_SOURCE_DIR "/configs/default.jsonc"); }

retrieval::RetrievalOptions options_for(const config::RunConfig& rc) {
    retrieval::RetrievalOptions opt;
    const auto [ns, np] = config::visible_gap_indices(rc);
    opt.gap_signal_index = ns;
    opt.gap_pump_index = np;
    return opt;
}

config::RunConfig with_pressure(config::RunConfig rc, double p) {
    rc.gas->pressure_torr = p;
    return rc;
}

// 1 ---------------------------------------------------------------------------------
void energy_conservation(Tally& t) {
    const double s = ifm::signal_wavelength(532.0, 4300.0);
    const double oracle = 532.0 * 4300.0 / (4300.0 - 532.0);
    const bool pass = s >= 606.5 && s <= 608.5 && std::abs(s - oracle) < 1e-9;
    t.report(1, "energy-conservation mapping", pass, fmt("signal = %.6f nm (oracle %.6f nm, window [606.5, 608.5])", s, oracle));
}

// 2 ---------------------------------------------------------------------------------
void vacuum_reduction(Tally& t) {
    const auto rc = default_config();
    const auto t0 = std::chrono::steady_clock::now();
    const auto gas = ifm::intensity_map(rc.instrument, ifm::GapResponse::vacuum());
    const double t_gas = seconds_since(t0);
    const auto vac = ifm::vacuum_map(rc.instrument);
    double worst = 0.0;
    for (std::size_t i = 0; i < gas.intensity.size(); ++i) worst = std::max(worst, std::abs(gas.intensity[i] - vac.intensity[i]));
    t.report(2, "gas model reduces to the vacuum model", worst == 0.0 && t_gas < 1.0,
             fmt("%.0f x %.0f map, max |diff| = %.3g, gas-path time %.3f s", static_cast<double>(gas.rows()),
                 static_cast<double>(gas.cols()), worst, t_gas));
}

// 3 ---------------------------------------------------------------------------------
void visibility_inverse(Tally& t) {
    const auto rc = default_config();
    const auto vac = ifm::vacuum_map(rc.instrument);
    double worst_fit = 0.0, worst_est = 0.0, worst_native_est = 0.0;

    auto dense = rc.instrument;
    dense.detector.angle_pixels = 8193;
    dense.detector.pitch_um = rc.instrument.detector.pitch_um * 512.0 / 8192.0;
    const auto dense_vac = ifm::vacuum_map(dense);

    for (const double al : {0.05, 0.1, 0.5, 1.0}) {
        const double alpha = al / (rc.instrument.geometry.gap_mm * 0.1);
        const auto gas = ifm::GapResponse::uniform(1.0, alpha);
        const auto map = ifm::intensity_map(rc.instrument, gas);
        retrieval::RetrievalOptions opt;
        const auto spec = retrieval::retrieve_spectrum(map, vac, rc.instrument, opt);
        for (double a : spec.alpha_cm) worst_fit = std::max(worst_fit, std::abs(a / alpha - 1.0));
        if (spec.size() != map.cols()) worst_fit = 1.0;

        const auto dense_map = ifm::intensity_map(dense, gas);
        for (std::size_t c = 0; c < map.cols(); c += 4) {
            const ifm::CrossSectionModel m(dense, dense_map.wavelength_nm[c], dense_map.angle_rad, 1.0, 1.0);
            const double v = retrieval::visibility(dense_map.column(c), m.envelope());
            const double vr = retrieval::visibility(dense_vac.column(c), m.envelope());
            const double est = retrieval::alpha_from_visibility(v, vr, dense.geometry.gap_mm).alpha_cm;
            worst_est = std::max(worst_est, std::abs(est / alpha - 1.0));

            const ifm::CrossSectionModel mn(rc.instrument, map.wavelength_nm[c], map.angle_rad, 1.0, 1.0);
            const double vn = retrieval::visibility(map.column(c), mn.envelope());
            const double vrn = retrieval::visibility(vac.column(c), mn.envelope());
            const double estn = retrieval::alpha_from_visibility(vn, vrn, rc.instrument.geometry.gap_mm).alpha_cm;
            worst_native_est = std::max(worst_native_est, std::abs(estn / alpha - 1.0));
        }
    }
    const bool pass = worst_fit < 1e-6 && worst_est < 1e-6;
    t.report(3, "visibility <-> absorption inverse", pass,
             fmt("max rel error: model fit %.3g; -ln(V/Vref)/L_m with 16x angular sampling %.3g "
                 "(native 513-row sampling %.3g, quadrature-limited)",
                 worst_fit, worst_est, worst_native_est));
}

// 4 and 6 ---------------------------------------------------------------------------
struct NoisyRuns {
    double rms_n_band = 0.0, rms_a_band = 0.0, rms_n_all = 0.0, rms_a_all = 0.0;
    double kk_fraction_1s = 0.0, kk_fraction_2s = 0.0, kk_noiseless_max = 0.0;
    double fringes_min = 0.0, seconds = 0.0;
    std::size_t band_points = 0;
    double peak_alpha = 0.0, fwhm_nm = 0.0;
};

NoisyRuns noisy_runs() {
    NoisyRuns r;
    const auto rc = default_config();
    const auto opt = options_for(rc);
    const auto gas = config::load_gas_state(rc);
    const auto resp = config::gap_response(rc, gas);
    const auto t0 = std::chrono::steady_clock::now();
    const auto clean = ifm::intensity_map(rc.instrument, resp);
    const auto vac = ifm::vacuum_map(rc.instrument);

    // Fringe count per cross-section: total gap-phase excursion across the rows / 2 pi.
    r.fringes_min = 1e9;
    for (std::size_t c = 0; c < clean.cols(); ++c) {
        const ifm::CrossSectionModel m(rc.instrument, clean.wavelength_nm[c], clean.angle_rad, 1.0, 1.0);
        const std::size_t mid = clean.rows() / 2;
        const double f = (std::abs(m.total_phase(0, 1.0) - m.total_phase(mid, 1.0)) +
                          std::abs(m.total_phase(clean.rows() - 1, 1.0) - m.total_phase(mid, 1.0))) /
                         (2.0 * kPi);
        r.fringes_min = std::min(r.fringes_min, f);
    }

    double peak_truth = 0.0;
    for (std::size_t c = 0; c < clean.cols(); ++c) {
        peak_truth = std::max(peak_truth, resp.alpha_cm(ifm::idler_wavelength(rc.instrument.pump.wavelength_nm, clean.wavelength_nm[c])));
    }
    double sn_b = 0, sa_b = 0, sn_a = 0, sa_a = 0;
    std::size_t nb = 0, na = 0;
    const int seeds = 10;
    for (int k = 0; k < seeds; ++k) {
        const auto sample = ifm::add_noise(clean, rc.instrument.detector.noise, 1000 + k);
        const auto ref = ifm::add_noise(vac, rc.instrument.detector.noise, 5000 + k);
        const auto spec = retrieval::retrieve_spectrum(sample, ref, rc.instrument, opt);
        for (std::size_t i = 0; i < spec.size(); ++i) {
            const double dn = spec.n[i] - resp.idler_index(spec.idler_nm[i]);
            const double ta = resp.alpha_cm(spec.idler_nm[i]);
            const double da = spec.alpha_cm[i] - ta;
            sn_a += dn * dn;
            sa_a += da * da;
            ++na;
            if (ta >= 0.01 * peak_truth) {
                sn_b += dn * dn;
                sa_b += da * da;
                ++nb;
            }
        }
        if (k == 0) {
            const auto kk1 = retrieval::kk_consistency(spec, opt.gap_signal_index - 1.0, 1.0);
            const auto kk2 = retrieval::kk_consistency(spec, opt.gap_signal_index - 1.0, 2.0);
            r.kk_fraction_1s = kk1.fraction_within;
            r.kk_fraction_2s = kk2.fraction_within;
            const auto summary = retrieval::summarize(spec);
            r.peak_alpha = summary.peak_alpha_cm;
            r.fwhm_nm = summary.fwhm_nm;
        }
    }
    r.rms_n_band = std::sqrt(sn_b / static_cast<double>(nb));
    r.rms_a_band = std::sqrt(sa_b / static_cast<double>(nb));
    r.rms_n_all = std::sqrt(sn_a / static_cast<double>(na));
    r.rms_a_all = std::sqrt(sa_a / static_cast<double>(na));
    r.band_points = nb / seeds;
    r.seconds = seconds_since(t0);

    // Systematic floor of the consistency check on the noiseless run.
    const auto spec0 = retrieval::retrieve_spectrum(clean, vac, rc.instrument, opt);
    const auto kk0 = retrieval::kk_consistency(spec0, opt.gap_signal_index - 1.0, 1.0);
    for (std::size_t i = 0; i < kk0.n_kk.size(); ++i) {
        r.kk_noiseless_max = std::max(r.kk_noiseless_max, std::abs(kk0.n_kk[i] - kk0.n_retrieved[i]));
    }
    return r;
}

void round_trip(Tally& t, const NoisyRuns& r) {
    const bool pass = r.fringes_min >= 8.0 && r.rms_n_band <= 5e-6 && r.rms_a_band <= 1e-3 && r.seconds < 120.0;
    t.report(4, "noisy round-trip accuracy", pass,
             fmt("absorption band (true alpha >= 1%% of peak, %.0f points x 10 seeds): RMS dn = %.3g, RMS dalpha = %.3g cm^-1; ",
                 static_cast<double>(r.band_points), r.rms_n_band, r.rms_a_band) +
                 fmt("whole detector span: RMS dn = %.3g, RMS dalpha = %.3g cm^-1; min fringes per cross-section %.1f; %.1f s",
                     r.rms_n_all, r.rms_a_all, r.fringes_min, r.seconds));
}

void internal_consistency(Tally& t, const NoisyRuns& r) {
    const bool pass = r.kk_fraction_1s >= 0.9;
    t.report(6, "KK(retrieved alpha) vs retrieved n", pass,
             fmt("within combined 1 sigma at %.1f%% of points (required 90%%; a calibrated Gaussian error gives ~68%%); "
                 "within 2 sigma %.1f%%; noiseless systematic max |n - n_KK| = %.3g",
                 100.0 * r.kk_fraction_1s, 100.0 * r.kk_fraction_2s, r.kk_noiseless_max));
}

// 5 ---------------------------------------------------------------------------------
void kk_oracle(Tally& t) {
    const double nu0 = 2349.0, gamma = 0.5, area = 0.2;  // alpha area, cm^-2
    const double lo = nu0 - 100.0, hi = nu0 + 100.0;
    const std::size_t n = 4001;
    std::vector<double> grid(n), alpha(n);
    auto lorentz = [&](double x) { return area / kPi * gamma / ((x - nu0) * (x - nu0) + gamma * gamma); };
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        alpha[i] = lorentz(grid[i]);
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto idx = kk::kk_index_from_absorption(alpha, grid, 0.0);

    // Brute-force principal value with singularity subtraction on the same finite band:
    // PV int g(x)/(x - v) dx = int (g(x) - g(v))/(x - v) dx + g(v) ln((hi - v)/(v - lo)), g = alpha/(x + v).
    auto oracle = [&](double v) {
        auto g = [&](double x) { return lorentz(x) / (x + v); };
        const double gv = g(v);
        auto smooth = [&](double x) { return x == v ? 0.0 : (g(x) - gv) / (x - v); };
        double sum = 0.0;
        // Split at v and at the line centre so the adaptive rule sees smooth pieces.
        std::vector<double> cuts = {lo, hi, v, nu0, nu0 - 5 * gamma, nu0 + 5 * gamma};
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            if (cuts[k + 1] <= cuts[k]) continue;
            sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(smooth, cuts[k], cuts[k + 1], 15, 1e-13);
        }
        sum += gv * std::log((hi - v) / (v - lo));
        return sum / (2.0 * kPi * kPi);
    };
    auto analytic = [&](double v) {
        const double x = v - nu0;
        return -area * x / (4.0 * kPi * kPi * nu0 * (x * x + gamma * gamma));
    };
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, std::abs(analytic(grid[i])));
    double worst_oracle = 0.0, worst_analytic = 0.0;
    for (std::size_t i = n / 10; i < n - n / 10; ++i) {
        worst_oracle = std::max(worst_oracle, std::abs(idx.n_minus_1[i] - oracle(grid[i])));
        worst_analytic = std::max(worst_analytic, std::abs(idx.n_minus_1[i] - analytic(grid[i])));
    }
    const double secs = seconds_since(t0);
    const bool pass = worst_oracle <= 0.01 * peak && worst_analytic <= 0.01 * peak && secs < 10.0;
    t.report(5, "Kramers-Kronig vs oracle", pass,
             fmt("central 80%%: max |diff| / peak = %.3g (PV quadrature oracle), %.3g (analytic Lorentz dispersion); %.2f s",
                 worst_oracle / peak, worst_analytic / peak, secs));
}

// 7 ---------------------------------------------------------------------------------
void pressure_laws(Tally& t) {
    auto rc = default_config();
    const auto t0 = std::chrono::steady_clock::now();
    const auto vac = ifm::vacuum_map(rc.instrument);
    const auto ref = ifm::add_noise(vac, rc.instrument.detector.noise, 77);
    const std::vector<double> pressures = {1.0, 2.5, 5.0, 7.5, 10.5, 15.0, 20.0};
    std::vector<double> n_far;
    // Far-detuned: the 24 longest idler wavelengths (about 4.55-4.6 um, > 100 cm^-1 from the band).
    for (std::size_t k = 0; k < pressures.size(); ++k) {
        const auto rp = with_pressure(rc, pressures[k]);
        const auto gas = config::load_gas_state(rp);
        const auto map = ifm::add_noise(ifm::intensity_map(rp.instrument, config::gap_response(rp, gas)), rp.instrument.detector.noise, 300 + k);
        const auto spec = retrieval::retrieve_spectrum(map, ref, rp.instrument, options_for(rp));
        double acc = 0.0;
        int cnt = 0;
        for (std::size_t i = spec.size() - 24; i < spec.size(); ++i) {
            acc += spec.n[i];
            ++cnt;
        }
        n_far.push_back(acc / cnt);
    }
    // Ordinary least squares n = a + b P.
    const double pm = std::accumulate(pressures.begin(), pressures.end(), 0.0) / pressures.size();
    const double nm = std::accumulate(n_far.begin(), n_far.end(), 0.0) / n_far.size();
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < pressures.size(); ++k) {
        sxy += (pressures[k] - pm) * (n_far[k] - nm);
        sxx += (pressures[k] - pm) * (pressures[k] - pm);
    }
    const double slope = sxy / sxx;
    const double intercept = nm - slope * pm;
    double worst_lin = 0.0;
    for (std::size_t k = 0; k < pressures.size(); ++k) {
        worst_lin = std::max(worst_lin, std::abs(n_far[k] - intercept - slope * pressures[k]));
    }
    const bool intercept_ok = std::abs(intercept - 1.0) <= 2e-6;

    // Peak alpha of one line at its centre, Doppler to collision regime (forward model).
    const auto gas = config::load_gas_state(rc);
    lineshape::LineList one = gas.lines;
    const auto strongest = *std::max_element(one.lines.begin(), one.lines.end(), [](const auto& a, const auto& b) {
        return a.intensity < b.intensity;
    });
    one.lines = {strongest};
    std::vector<double> ps, peaks;
    for (double p = 0.01; p <= 2000.0; p *= 2.0) {
        const std::vector<double> g = {strongest.center_wn};
        ps.push_back(p);
        peaks.push_back(lineshape::absorption_spectrum(one, g, p, 296.0)[0]);
    }
    std::vector<double> slopes;
    for (std::size_t k = 1; k < ps.size(); ++k) slopes.push_back(std::log(peaks[k] / peaks[k - 1]) / std::log(ps[k] / ps[k - 1]));
    bool monotone = true;
    for (std::size_t k = 1; k < slopes.size(); ++k) monotone = monotone && slopes[k] <= slopes[k - 1] + 1e-9;
    const bool law_ok = slopes.front() > 0.98 && slopes.back() < 0.05 && monotone;
    const double secs = seconds_since(t0);
    t.report(7, "pressure laws", intercept_ok && law_ok,
             fmt("far-detuned n(P): intercept - 1 = %.3g, slope = %.4g /Torr, max residual %.2g; ", intercept - 1.0, slope,
                 worst_lin) +
                 fmt("line-centre d ln(alpha)/d ln(P) falls from %.3f (Doppler) to %.3f (collision)", slopes.front(),
                     slopes.back()) +
                 (monotone ? ", monotone" : ", NOT monotone") + fmt("; %.1f s", secs));
}

// 8 ---------------------------------------------------------------------------------
void fringe_phase_law(Tally& t) {
    const auto rc = default_config();
    const double signal = ifm::signal_wavelength(rc.instrument.pump.wavelength_nm, 4300.0);
    const auto angles = ifm::angle_axis(rc.instrument.detector);
    const ifm::CrossSectionModel model(rc.instrument, signal, angles, 1.0, 1.0);
    const double dn = 1e-5;
    const double expected = 2.0 * kPi * dn * rc.instrument.geometry.gap_mm * 1e-3 / (model.idler_nm() * 1e-9);

    // On axis, straight from the forward phase.
    const std::size_t mid = angles.size() / 2;
    const double on_axis = model.total_phase(mid, 1.0) - model.total_phase(mid, 1.0 + dn);

    // From intensities: quadrature projection over the central rows (|theta| < 0.4 mrad).
    std::vector<double> central;
    for (double a : angles) {
        if (std::abs(a) < 4e-4) central.push_back(a);
    }
    const ifm::CrossSectionModel cm(rc.instrument, signal, central, 1.0, 1.0);
    const auto ref = cm.intensity(1.0, 0.0);
    const auto shifted = cm.intensity(1.0 + dn, 0.0);
    const double measured = retrieval::fringe_phase(cm, ref).phase_rad - retrieval::fringe_phase(cm, shifted).phase_rad;

    const bool pass = std::abs(on_axis - expected) <= 1e-4 && std::abs(measured - expected) <= 1e-4;
    t.report(8, "fringe-phase law", pass,
             fmt("expected %.6f rad; on-axis model shift %.6f rad; measured from fringes %.6f rad (|err| %.2g)", expected,
                 on_axis, measured, std::abs(measured - expected)));
}

// 9 ---------------------------------------------------------------------------------
void voigt_limits(Tally& t) {
    const double nu0 = 2349.0, gd = 0.0025, gl = 0.01;
    double worst_g = 0.0, worst_l = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = nu0 + (i - 499.5) * 6.0 * gd / 500.0;
        const double g = std::sqrt(std::log(2.0) / kPi) / gd * std::exp(-std::log(2.0) * (x - nu0) * (x - nu0) / (gd * gd));
        worst_g = std::max(worst_g, std::abs(lineshape::voigt_profile(x, nu0, gd, 0.0) / g - 1.0));
        const double xl = nu0 + (i - 499.5) * 40.0 * gl / 500.0;
        const double l = gl / kPi / ((xl - nu0) * (xl - nu0) + gl * gl);
        worst_l = std::max(worst_l, std::abs(lineshape::voigt_profile(xl, nu0, gl * 1e-5, gl) / l - 1.0));
    }
    // Area over +-4000 half widths, trapezoid on a fine grid.
    const double w = 1.0;
    const double span = 4000.0, step = 0.002;
    double area = 0.0;
    const auto steps = static_cast<long>(2.0 * span / step);
    for (long k = 0; k <= steps; ++k) {
        const double x = -span + step * static_cast<double>(k);
        const double f = lineshape::voigt_profile(x, 0.0, w, w);
        area += (k == 0 || k == steps ? 0.5 : 1.0) * f * step;
    }
    const bool pass = worst_g < 1e-6 && worst_l < 1e-6 && std::abs(area - 1.0) < 1e-3;
    t.report(9, "Voigt limits", pass,
             fmt("Gaussian limit max rel %.3g; Lorentzian limit (gD/gL = 1e-5) max rel %.3g; area %.6f", worst_g, worst_l, area));
}

// 10 --------------------------------------------------------------------------------
void hitran_round_trip(Tally& t) {
    std::mt19937_64 rng(20240607);
    auto uniform_int = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
    int mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        // Values quantised to exactly what the fixed-width fields can hold.
        char buf[64];
        lineshape::SpectralLine l;
        l.molecule_id = static_cast<int>(uniform_int(1, 55));
        l.isotope_id = static_cast<int>(uniform_int(1, 9));
        std::snprintf(buf, sizeof buf, "%ld.%06ld", uniform_int(0, 99999), uniform_int(0, 999999));
        l.center_wn = std::strtod(buf, nullptr);
        std::snprintf(buf, sizeof buf, "%ld.%03ldE-%02ld", uniform_int(1, 9), uniform_int(0, 999), uniform_int(18, 30));
        l.intensity = std::strtod(buf, nullptr);
        std::snprintf(buf, sizeof buf, "0.%04ld", uniform_int(0, 9999));
        l.gamma_air = std::strtod(buf, nullptr);
        // gamma_self is F5.3, one decimal fewer than gamma_air.
        std::snprintf(buf, sizeof buf, "0.%03ld", uniform_int(1, 999));
        l.gamma_self = std::strtod(buf, nullptr);
        std::snprintf(buf, sizeof buf, "%ld.%04ld", uniform_int(0, 99999), uniform_int(0, 9999));
        l.lower_energy = std::strtod(buf, nullptr);
        std::snprintf(buf, sizeof buf, "0.%02ld", uniform_int(0, 99));
        l.temperature_exponent = std::strtod(buf, nullptr);
        const auto rec = lineshape::format_hitran_record(l);
        const auto back = lineshape::parse_hitran_record(rec);
        if (rec.size() != lineshape::hitran_record_length || !(back.line == l) ||
            lineshape::format_hitran_record(back.line) != rec) {
            ++mismatches;
        }
    }
    // Hand-built record: every field placed at its documented 1-based column span.
    std::string rec(160, ' ');
    auto put = [&](int first, int last, const std::string& s) {
        const int width = last - first + 1;
        const std::string field = std::string(static_cast<std::size_t>(width) - s.size(), ' ') + s;
        rec.replace(static_cast<std::size_t>(first - 1), static_cast<std::size_t>(width), field);
    };
    put(1, 2, "2");
    put(3, 3, "1");
    put(4, 15, "2349.143000");
    put(16, 25, "3.500E-18");
    put(26, 35, "1.234E+02");
    put(36, 40, ".0712");
    put(41, 45, ".0950");
    put(46, 55, "1234.5678");
    put(56, 59, "0.75");
    put(60, 67, "-.002000");
    const auto fx = lineshape::parse_hitran_record(rec).line;
    const bool fixture_ok = fx.molecule_id == 2 && fx.isotope_id == 1 && fx.center_wn == 2349.143 && fx.intensity == 3.5e-18 &&
                            fx.gamma_air == 0.0712 && fx.gamma_self == 0.095 && fx.lower_energy == 1234.5678 &&
                            fx.temperature_exponent == 0.75;
    t.report(10, "HITRAN record round-trip", mismatches == 0 && fixture_ok,
             fmt("%.0f / 1000 randomized records mismatched; column-span fixture ", mismatches) + (fixture_ok ? "ok" : "WRONG"));
}

}  // namespace

int main() {
    Tally t;
    const auto wall = std::chrono::steady_clock::now();
    energy_conservation(t);
    vacuum_reduction(t);
    visibility_inverse(t);
    const auto runs = noisy_runs();
    round_trip(t, runs);
    kk_oracle(t);
    internal_consistency(t, runs);
    pressure_laws(t);
    fringe_phase_law(t);
    voigt_limits(t);
    hitran_round_trip(t);
    std::printf("acceptance: %d of 10 criteria failed (%.1f s)\n", t.failed, seconds_since(wall));
    return t.failed == 0 ? 0 : 1;
}
