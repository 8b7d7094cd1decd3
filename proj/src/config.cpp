#include "nlir/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "nlir/constants.hpp"
#include "nlir/error.hpp"
#include "nlir/lineshape.hpp"
#include "text.hpp"

namespace nlir::config {

namespace {

using nlohmann::json;

double deg(double d) { return d * constants::pi / 180.0; }

/// Reads one JSON object, remembering which keys were consumed.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string key_path(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    bool has(std::string_view key) const { return j_.contains(std::string(key)); }

    double number(std::string_view key) {
        const auto& v = get(key);
        if (!v.is_number()) throw ConfigError(key_path(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(key_path(key), "must be finite");
        return x;
    }

    double number(std::string_view key, double fallback) { return has(key) ? number(key) : fallback; }

    double positive(std::string_view key) {
        const double x = number(key);
        if (!(x > 0.0)) throw ConfigError(key_path(key), "must be positive");
        return x;
    }

    double positive(std::string_view key, double fallback) { return has(key) ? positive(key) : fallback; }

    double non_negative(std::string_view key, double fallback) {
        if (!has(key)) return fallback;
        const double x = number(key);
        if (!(x >= 0.0)) throw ConfigError(key_path(key), "must be non-negative");
        return x;
    }

    long integer(std::string_view key, long fallback) {
        if (!has(key)) return fallback;
        const auto& v = get(key);
        if (!v.is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
        return v.get<long>();
    }

    bool boolean(std::string_view key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = get(key);
        if (!v.is_boolean()) throw ConfigError(key_path(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(std::string_view key) {
        const auto& v = get(key);
        if (!v.is_string()) throw ConfigError(key_path(key), "expected a string");
        return v.get<std::string>();
    }

    Section object(std::string_view key) { return Section(get(key), key_path(key)); }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!used_.count(k)) throw ConfigError(key_path(k), "unknown key");
        }
    }

private:
    const json& get(std::string_view key) {
        const std::string k(key);
        if (!j_.contains(k)) throw ConfigError(key_path(key), "missing required key");
        used_.insert(k);
        return j_.at(k);
    }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

RunConfig parse_run_config(std::string_view body, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(body.begin(), body.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
    RunConfig rc;
    Section top(root, "");
    auto& inst = rc.instrument;

    {
        auto crystal = top.object("crystal");
        const auto file = resolve(base_dir, crystal.string("coefficients_file"));
        try {
            inst.crystal = dispersion::load_crystal_coefficients(file);
        } catch (const Error& e) {
            throw ConfigError(crystal.key_path("coefficients_file"), e.what());
        }
        const double cut = crystal.positive("cut_angle_deg");
        if (!(cut <= 90.0)) throw ConfigError(crystal.key_path("cut_angle_deg"), "must lie in (0, 90]");
        inst.crystal.cut_angle_rad = deg(cut);
        inst.geometry.crystal_mm = crystal.positive("thickness_mm");
        crystal.finish();
    }
    {
        auto pump = top.object("pump");
        inst.pump.wavelength_nm = pump.positive("wavelength_nm");
        inst.pump.waist_mm = pump.positive("waist_mm");
        if (pump.has("axis_angle_deg") && pump.has("phase_match_idler_nm")) {
            throw ConfigError(pump.key_path("axis_angle_deg"), "give either axis_angle_deg or phase_match_idler_nm");
        }
        if (pump.has("axis_angle_deg")) {
            inst.pump.axis_angle_rad = deg(pump.number("axis_angle_deg"));
        } else if (pump.has("phase_match_idler_nm")) {
            const double idler = pump.positive("phase_match_idler_nm");
            try {
                const double signal = interferometer::signal_wavelength(inst.pump.wavelength_nm, idler);
                inst.pump.axis_angle_rad = interferometer::phase_matching_angle(inst.crystal, inst.pump.wavelength_nm, signal);
            } catch (const DomainError& e) {
                throw ConfigError(pump.key_path("phase_match_idler_nm"), e.what());
            }
        } else {
            inst.pump.axis_angle_rad = inst.crystal.cut_angle_rad;
        }
        pump.finish();
    }
    {
        auto geometry = top.object("geometry");
        inst.geometry.gap_mm = geometry.positive("gap_mm");
        geometry.finish();
    }
    {
        auto det = top.object("detector");
        auto& d = inst.detector;
        d.focal_mm = det.positive("focal_length_mm");
        d.pitch_um = det.positive("pixel_pitch_um");
        d.angle_pixels = static_cast<int>(det.integer("angle_pixels", d.angle_pixels));
        d.wavelength_pixels = static_cast<int>(det.integer("wavelength_pixels", d.wavelength_pixels));
        if (d.angle_pixels < 2 || d.angle_pixels > 1 << 16) throw ConfigError(det.key_path("angle_pixels"), "must lie in [2, 65536]");
        if (d.wavelength_pixels < 2 || d.wavelength_pixels > 1 << 16) {
            throw ConfigError(det.key_path("wavelength_pixels"), "must lie in [2, 65536]");
        }
        d.wavelength_min_nm = det.positive("wavelength_min_nm");
        d.wavelength_max_nm = det.positive("wavelength_max_nm");
        if (!(d.wavelength_max_nm > d.wavelength_min_nm)) throw ConfigError(det.key_path("wavelength_max_nm"), "must exceed wavelength_min_nm");
        if (!(d.wavelength_min_nm > inst.pump.wavelength_nm)) {
            throw ConfigError(det.key_path("wavelength_min_nm"), "signal band must lie above the pump wavelength");
        }
        d.resolution_fwhm_nm = det.non_negative("resolution_fwhm_nm", 0.0);
        if (det.has("noise")) {
            auto noise = det.object("noise");
            rc.noise_enabled = noise.boolean("enabled", true);
            d.noise.mean_counts = noise.positive("mean_counts", d.noise.mean_counts);
            d.noise.read_sigma = noise.non_negative("read_noise_counts", 0.0);
            noise.finish();
        }
        det.finish();
        const double theta_max = 0.5 * (d.angle_pixels - 1) * d.pitch_um * 1e-3 / d.focal_mm;
        if (!(theta_max < 0.1)) throw ConfigError(det.key_path("pixel_pitch_um"), "angular field exceeds the paraxial range");
    }
    if (top.has("gas")) {
        auto g = top.object("gas");
        GasConfig gas;
        gas.pressure_torr = g.non_negative("pressure_torr", 0.0);
        if (!g.has("pressure_torr")) throw ConfigError(g.key_path("pressure_torr"), "missing required key");
        gas.temperature_k = g.positive("temperature_k");
        gas.line_list = resolve(base_dir, g.string("line_list"));
        gas.self_fraction = g.non_negative("self_fraction", 1.0);
        if (gas.self_fraction > 1.0) throw ConfigError(g.key_path("self_fraction"), "must lie in [0, 1]");
        gas.partition_ratio = g.positive("partition_ratio", 1.0);
        gas.molar_mass_g_mol = g.non_negative("molar_mass_g_mol", 0.0);
        auto vi = g.object("visible_index");
        gas.visible_index.n0 = vi.number("n0");
        if (!(gas.visible_index.n0 >= 1.0)) throw ConfigError(vi.key_path("n0"), "must be at least 1");
        gas.visible_index.p0_torr = vi.positive("reference_pressure_torr");
        gas.visible_index.t0_k = vi.positive("reference_temperature_k");
        vi.finish();
        g.finish();
        rc.gas = gas;
    }
    if (top.has("retrieval")) {
        auto r = top.object("retrieval");
        auto& rr = rc.retrieval;
        rr.min_visibility = r.non_negative("min_visibility", rr.min_visibility);
        rr.min_reference_visibility = r.non_negative("min_reference_visibility", rr.min_reference_visibility);
        rr.confidence = r.positive("confidence", rr.confidence);
        if (!(rr.confidence < 1.0)) throw ConfigError(r.key_path("confidence"), "must lie in (0, 1)");
        rr.max_iterations = static_cast<int>(r.integer("max_iterations", rr.max_iterations));
        if (rr.max_iterations < 1) throw ConfigError(r.key_path("max_iterations"), "must be at least 1");
        r.finish();
    }
    {
        const long seed = top.integer("seed", 1);
        if (seed < 0) throw ConfigError("seed", "must be non-negative");
        rc.seed = static_cast<std::uint64_t>(seed);
    }
    rc.output_dir = top.has("output_dir") ? resolve(base_dir, top.string("output_dir")) : base_dir;
    top.finish();

    try {
        inst.validate();
        // Every detector wavelength and its idler must lie inside the coefficient windows.
        for (const double s : {inst.detector.wavelength_min_nm, inst.detector.wavelength_max_nm}) {
            const double idler = interferometer::idler_wavelength(inst.pump.wavelength_nm, s);
            inst.crystal.ordinary.index(s * 1e-3);
            inst.crystal.ordinary.index(idler * 1e-3);
        }
        dispersion::uniaxial_index(inst.crystal, inst.pump.wavelength_nm * 1e-3, inst.pump.axis_angle_rad);
    } catch (const DomainError& e) {
        throw ConfigError("detector", e.what());
    }
    return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    const auto body = text::read_file(path.string());
    return parse_run_config(body, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

interferometer::GasState load_gas_state(const RunConfig& rc) {
    if (!rc.gas) throw ConfigError("gas", "the configuration has no gas section");
    interferometer::GasState g;
    g.pressure_torr = rc.gas->pressure_torr;
    g.temperature_k = rc.gas->temperature_k;
    g.lines = lineshape::load_line_list(rc.gas->line_list.string());
    if (rc.gas->molar_mass_g_mol > 0.0) g.lines.molar_mass_g_mol = rc.gas->molar_mass_g_mol;
    if (!g.lines.empty() && !(g.lines.molar_mass_g_mol > 0.0)) {
        throw ConfigError("gas.molar_mass_g_mol", "the line list carries no molar mass; set it here");
    }
    g.visible_index = rc.gas->visible_index;
    g.self_fraction = rc.gas->self_fraction;
    g.partition_ratio = rc.gas->partition_ratio;
    return g;
}

interferometer::GapResponse gap_response(const RunConfig& rc, const interferometer::GasState& gas) {
    const auto& inst = rc.instrument;
    const auto& d = inst.detector;
    const double lp = inst.pump.wavelength_nm;
    const double wn_lo = 1e7 / interferometer::idler_wavelength(lp, d.wavelength_min_nm);
    const double wn_hi = 1e7 / interferometer::idler_wavelength(lp, d.wavelength_max_nm);
    interferometer::GasResponseOptions opt;
    const double centre = 0.5 * (d.wavelength_min_nm + d.wavelength_max_nm);
    opt.resolution_fwhm_wn = interferometer::signal_fwhm_to_wn(d.resolution_fwhm_nm, centre);
    return interferometer::gas_response(gas, std::min(wn_lo, wn_hi), std::max(wn_lo, wn_hi), opt);
}

std::pair<double, double> visible_gap_indices(const RunConfig& rc) {
    if (!rc.gas) return {1.0, 1.0};
    const double n = dispersion::gas_index(rc.gas->visible_index, rc.gas->pressure_torr, rc.gas->temperature_k);
    return {n, n};
}

std::uint64_t reference_seed(std::uint64_t seed) {
    // splitmix64 finaliser.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

interferometer::InterferogramMap simulate(const RunConfig& rc, const SimulateOptions& o,
                                          std::vector<std::string>* warnings) {
    interferometer::InterferogramMap map;
    if (o.vacuum) {
        map = interferometer::vacuum_map(rc.instrument);
    } else {
        const auto gas = load_gas_state(rc);
        if (warnings) warnings->insert(warnings->end(), gas.lines.warnings.begin(), gas.lines.warnings.end());
        map = interferometer::intensity_map(rc.instrument, gap_response(rc, gas));
        map.metadata["gas_state"] = {{"pressure_torr", gas.pressure_torr},
                                     {"temperature_k", gas.temperature_k},
                                     {"line_list", rc.gas->line_list.filename().string()},
                                     {"lines", gas.lines.lines.size()}};
    }
    const std::uint64_t seed = o.seed.value_or(rc.seed);
    if (rc.noise_enabled && o.noise) {
        map = interferometer::add_noise(std::move(map), rc.instrument.detector.noise,
                                        o.vacuum ? reference_seed(seed) : seed);
    }
    return map;
}

retrieval::RetrievalOptions retrieval_options(const RunConfig& rc) {
    retrieval::RetrievalOptions opt;
    const auto [ns, np] = visible_gap_indices(rc);
    opt.gap_signal_index = ns;
    opt.gap_pump_index = np;
    opt.min_reference_visibility = rc.retrieval.min_reference_visibility;
    opt.fit.min_visibility = rc.retrieval.min_visibility;
    opt.fit.lm.confidence = rc.retrieval.confidence;
    opt.fit.lm.max_iterations = rc.retrieval.max_iterations;
    return opt;
}

}  // namespace nlir::config
