#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "helpers.hpp"
#include "nlir/error.hpp"
#include "nlir/retrieval.hpp"

using namespace nlir;
using namespace nlir::interferometer;
using namespace nlir::retrieval;

namespace {

InstrumentConfig narrow_config(int columns = 12) {
    auto c = test::default_config().instrument;
    c.detector.wavelength_pixels = columns;
    return c;
}

CrossSectionModel centre_model(const InstrumentConfig& cfg) {
    return CrossSectionModel(cfg, signal_wavelength(cfg.pump.wavelength_nm, 4300.0), angle_axis(cfg.detector), 1.0, 1.0);
}

std::vector<double> poisson_counts(const std::vector<double>& mean, double counts, std::mt19937_64& rng) {
    std::vector<double> out(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) {
        std::poisson_distribution<long long> d(mean[i] * counts);
        out[i] = static_cast<double>(d(rng));
    }
    return out;
}

}  // namespace

TEST_CASE("visibility of synthetic fringes") {
    std::vector<double> x(400);
    const std::vector<double> flat(x.size(), 1.0);
    for (double v : {0.1, 0.6, 1.0}) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.5 * (1.0 + v * std::cos(2.0 * test::pi * static_cast<double>(i) / 37.3 + 0.4));
        CHECK(visibility(x, flat) == doctest::Approx(v).epsilon(1e-3));
        // Without an envelope the slow polynomial level absorbs a little contrast.
        CHECK(visibility(x) == doctest::Approx(v).epsilon(1e-2));
    }
    std::fill(x.begin(), x.end(), 0.7);
    CHECK(visibility(x) == 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.5 * (1.0 + 0.5 * std::cos(2.0 * test::pi * static_cast<double>(i) / 1000.0));
    CHECK_THROWS_AS(visibility(x, flat), DomainError);
    CHECK_THROWS_AS(visibility(std::vector<double>(10, 0.0)), DomainError);
}

TEST_CASE("visibility divides out the model envelope") {
    const auto cfg = narrow_config();
    const auto m = centre_model(cfg);
    const auto data = m.intensity(1.0, 0.04, 1.0);
    CHECK(visibility(data, m.envelope()) == doctest::Approx(std::exp(-0.1)).epsilon(2e-3));
}

TEST_CASE("alpha from visibility ratios") {
    const auto a = alpha_from_visibility(std::exp(-1.0), 1.0, 25.0);
    CHECK(a.status == AlphaStatus::ok);
    CHECK(a.alpha_cm == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(alpha_from_visibility(0.9048374180359595, 1.0, 25.0).alpha_cm == doctest::Approx(0.04).epsilon(1e-12));
    const auto neg = alpha_from_visibility(0.95, 0.9, 25.0);
    CHECK(neg.status == AlphaStatus::negative_absorption);
    CHECK(neg.alpha_cm < 0.0);
    const auto opaque = alpha_from_visibility(0.0, 0.9, 25.0);
    CHECK(opaque.status == AlphaStatus::opaque);
    CHECK(opaque.alpha_cm == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(alpha_from_visibility(0.5, 0.0, 25.0), DomainError);
    CHECK_THROWS_AS(alpha_from_visibility(0.5, 1.5, 25.0), DomainError);
}

TEST_CASE("fringe shift to index") {
    CHECK(fringe_shift_to_index(2.0 * test::pi, 4300.0, 25.0, 1.0) == doctest::Approx(1.0 + 1.72e-4).epsilon(1e-14));
    CHECK(unwrap_halfwidth(4300.0, 25.0) == doctest::Approx(0.86e-4).epsilon(1e-12));
    const auto cfg = narrow_config();
    const auto m = centre_model(cfg);
    const auto fp = fringe_phase(m, m.intensity(1.0 + 1e-5, 0.0, 1.0));
    // The model is the reference, so its own phase offset is zero.
    CHECK(fringe_shift_to_index(-fp.phase_rad, m.idler_nm(), 25.0, 1.0) == doctest::Approx(1.0 + 1e-5).epsilon(1e-8));
}

TEST_CASE("noiseless cross-section fit recovers n and alpha") {
    const auto cfg = narrow_config();
    const auto m = centre_model(cfg);
    for (double dn : {-3e-5, 0.0, 1e-5, 6e-5}) {
        const auto data = m.intensity(1.0 + dn, 0.1, 3.0);
        const auto r = fit_cross_section(m, data, 1.0, 0.0);
        CHECK(r.converged);
        CHECK(std::abs(r.n - 1.0 - dn) < 1e-9);
        CHECK(std::abs(r.alpha_cm - 0.1) < 1e-9);
        CHECK(r.amplitude == doctest::Approx(3.0).epsilon(1e-9));
    }
}

TEST_CASE("opaque gap leaves n indeterminate and caps alpha") {
    const auto cfg = narrow_config();
    const auto m = centre_model(cfg);
    const auto r = fit_cross_section(m, m.intensity(1.0, 1e3, 1.0), 1.0, 0.0);
    CHECK(r.n_indeterminate);
    CHECK(r.alpha_cm == doctest::Approx(-std::log(1e-4) / 2.5).epsilon(1e-12));
    CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("confidence intervals cover and scale with counts") {
    const auto cfg = narrow_config();
    const auto m = centre_model(cfg);
    const auto mean = m.intensity(1.0 + 2e-5, 0.1, 1.0);
    std::mt19937_64 rng(11);
    FitOptions o;
    o.weighting = Weighting::poisson;
    int cover_n = 0, cover_a = 0;
    double sigma_low = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto data = poisson_counts(mean, 1e4, rng);
        const auto r = fit_cross_section(m, data, 1.0, 0.0, o);
        if (std::abs(r.n - 1.0 - 2e-5) <= r.ci_n) ++cover_n;
        if (std::abs(r.alpha_cm - 0.1) <= r.ci_alpha) ++cover_a;
        sigma_low += r.sigma_n / 100.0;
    }
    CHECK(cover_n >= 90);
    CHECK(cover_a >= 90);
    const auto hi = fit_cross_section(m, poisson_counts(mean, 1e6, rng), 1.0, 0.0, o);
    CHECK(sigma_low / hi.sigma_n == doctest::Approx(10.0).epsilon(0.2));
}

TEST_CASE("identical sample and reference give zero absorption") {
    const auto cfg = narrow_config();
    const auto map = intensity_map(cfg, GapResponse::uniform(1.0 + 1e-5, 0.05));
    const auto s = retrieve_spectrum(map, map, cfg);
    REQUIRE(s.size() == 12);
    // Both fits start from the same data but different initial guesses.
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(std::abs(s.alpha_cm[i]) < 1e-10);
        CHECK(std::abs(s.n[i] - 1.0) < 1e-13);
    }
    CHECK(std::is_sorted(s.idler_nm.begin(), s.idler_nm.end()));
}

TEST_CASE("retrieval is invariant to the intensity scale") {
    const auto cfg = narrow_config(6);
    const auto ref = vacuum_map(cfg);
    const auto sample = intensity_map(cfg, GapResponse::uniform(1.0 + 2e-5, 0.2));
    auto scaled = sample;
    for (auto& v : scaled.intensity) v *= 7.3;
    const auto a = retrieve_spectrum(sample, ref, cfg);
    const auto b = retrieve_spectrum(scaled, ref, cfg);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::abs(a.n[i] - b.n[i]) < 1e-10);
        CHECK(std::abs(a.alpha_cm[i] - b.alpha_cm[i]) < 1e-10);
        CHECK(std::abs(a.alpha_cm[i] - 0.2) < 1e-8);
    }
}

TEST_CASE("mismatched axes and fringeless reference columns") {
    const auto cfg = narrow_config(6);
    const auto ref = vacuum_map(cfg);
    auto other = cfg;
    other.detector.wavelength_max_nm += 0.5;
    CHECK_THROWS_AS(retrieve_spectrum(vacuum_map(other), ref, cfg), IncompatibleDataError);

    auto flat = ref;
    const CrossSectionModel m(cfg, ref.wavelength_nm[2], ref.angle_rad, 1.0, 1.0);
    for (std::size_t r = 0; r < flat.rows(); ++r) flat.at(r, 2) = 0.5 * m.envelope()[r];
    const auto s = retrieve_spectrum(ref, flat, cfg);
    REQUIRE(s.skipped.size() == 1);
    CHECK(s.skipped[0].column == 2);
    CHECK(s.size() == 5);
}

TEST_CASE("absorption peak lands within one detector step") {
    const auto cfg = narrow_config(64);
    std::vector<double> wn, n, alpha;
    for (double w = 2100.0; w <= 2600.0; w += 0.5) {
        wn.push_back(w);
        n.push_back(1.0);
        const double x = (w - 1e7 / 4250.0) / 15.0;
        alpha.push_back(0.3 * std::exp(-0.5 * x * x));
    }
    const auto gas = GapResponse::tabulated(wn, n, alpha, 1.0, 1.0);
    const auto s = retrieve_spectrum(intensity_map(cfg, gas), vacuum_map(cfg), cfg);
    const auto sum = summarize(s);
    const double step = (s.idler_nm.back() - s.idler_nm.front()) / static_cast<double>(s.size() - 1);
    CHECK(std::abs(sum.peak_idler_nm - 4250.0) <= step);
    CHECK(sum.peak_alpha_cm == doctest::Approx(0.3).epsilon(0.02));
    CHECK(sum.fwhm_resolved);
    CHECK(format_summary(sum).find("peak") != std::string::npos);

    // CSV round-trip is exact.
    const auto back = spectrum_from_csv(spectrum_to_csv(s));
    CHECK(back.idler_nm == s.idler_nm);
    CHECK(back.n == s.n);
    CHECK(back.alpha_cm == s.alpha_cm);
    CHECK(back.sigma_alpha == s.sigma_alpha);
    CHECK(back.converged == s.converged);
    CHECK_THROWS_AS(spectrum_from_csv("wrong,header\n1,2\n"), ParseError);
}

TEST_CASE("KK consistency on a noiseless band") {
    const auto cfg = narrow_config(48);
    const auto s_short = retrieve_spectrum(vacuum_map(cfg), vacuum_map(cfg), cfg);
    const auto k = kk_consistency(s_short, 0.0);
    CHECK(k.n_kk.size() == s_short.size());
    for (double v : k.n_kk) CHECK(std::abs(v - 1.0) < 1e-12);
    RetrievedSpectrum tiny;
    tiny.idler_nm = {4200.0, 4300.0};
    tiny.n = tiny.sigma_n = tiny.alpha_cm = tiny.sigma_alpha = {0.0, 0.0};
    tiny.converged = {true, true};
    CHECK_THROWS_AS(kk_consistency(tiny, 0.0), DomainError);
}
