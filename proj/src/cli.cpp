#include "nlir/cli.hpp"

#include <cmath>
#include <functional>
#include <ostream>

#include <CLI11.hpp>

#include "nlir/config.hpp"
#include "nlir/error.hpp"
#include "nlir/kk.hpp"
#include "nlir/lineshape.hpp"
#include "nlir/map_io.hpp"
#include "nlir/retrieval.hpp"
#include "nlir/spectrum_io.hpp"
#include "text.hpp"

namespace nlir::cli {

namespace fs = std::filesystem;

namespace {

int guarded(const std::function<void()>& body, std::ostream& err) {
    try {
        body();
        return exit_ok;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const IncompatibleDataError& e) {
        err << "incompatible data: " << e.what() << "\n";
        return exit_incompatible;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return exit_io;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return exit_io;
    } catch (const DomainError& e) {
        err << "invalid data: " << e.what() << "\n";
        return exit_incompatible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    }
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
    fs::path out = p;
    out.replace_extension(suffix);
    return out;
}

}  // namespace


int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(
        [&] {
            const auto rc = config::load_run_config(a.config);
            std::vector<std::string> warnings;
            const auto map = config::simulate(rc, {a.vacuum, a.seed, !a.no_noise}, &warnings);
            for (const auto& w : warnings) err << "warning: " << w << "\n";
            const fs::path target = a.output.value_or(rc.output_dir / (a.vacuum ? "vacuum.nlmap" : "sample.nlmap"));
            map_io::write_map(target.string(), map);
            const auto pgm = map_io::map_to_pgm(map);
            text::write_file_atomic(with_suffix(target, ".pgm").string(), pgm.image);
            text::write_file_atomic(with_suffix(target, ".pgm.json").string(), pgm.sidecar);
            out << "wrote " << target.string() << " (" << map.rows() << " x " << map.cols() << ")\n";
        },
        err);
}

int cmd_retrieve(const RetrieveArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(
        [&] {
            const auto rc = config::load_run_config(a.config);
            const auto sample = map_io::read_map(a.sample.string());
            const auto reference = map_io::read_map(a.reference.string());
            const auto opt = config::retrieval_options(rc);
            const auto spectrum = retrieval::retrieve_spectrum(sample, reference, rc.instrument, opt);
            for (const auto& s : spectrum.skipped) {
                err << "skipped column " << s.column << " (" << s.signal_nm << " nm): " << s.reason << "\n";
            }
            for (const auto& w : spectrum.warnings) err << "warning: " << w << "\n";
            const fs::path target = a.output.value_or(rc.output_dir / "spectrum.csv");
            text::write_file_atomic(target.string(), retrieval::spectrum_to_csv(spectrum));
            const auto summary = retrieval::format_summary(retrieval::summarize(spectrum));
            text::write_file_atomic(with_suffix(target, ".summary.txt").string(), summary);
            out << summary << "wrote " << target.string() << "\n";
        },
        err);
}

int cmd_absorption(const AbsorptionArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(
        [&] {
            if (!(a.wn_step > 0.0) || !(a.wn_max > a.wn_min)) {
                throw ConfigError("grid", "need wn-max > wn-min and a positive wn-step");
            }
            const auto list = lineshape::load_line_list(a.lines.string());
            for (const auto& w : list.warnings) err << "warning: " << w << "\n";
            const auto count = static_cast<std::size_t>(std::floor((a.wn_max - a.wn_min) / a.wn_step + 1e-9)) + 1;
            if (count < 2 || count > 10'000'000) throw ConfigError("grid", "grid must have between 2 and 1e7 points");
            spectrum_io::TwoColumn t{std::string(spectrum_io::wavenumber_column), std::string(spectrum_io::alpha_column), {}, {}};
            t.x.resize(count);
            for (std::size_t i = 0; i < count; ++i) t.x[i] = a.wn_min + a.wn_step * static_cast<double>(i);
            lineshape::AbsorptionOptions opt;
            opt.self_fraction = a.self_fraction;
            opt.partition_ratio = a.partition_ratio;
            opt.instrument_hwhm_wn = 0.5 * a.resolution_fwhm_wn;
            opt.molar_mass_g_mol = a.molar_mass_g_mol;
            t.y = lineshape::absorption_spectrum(list, t.x, a.pressure_torr, a.temperature_k, opt);
            text::write_file_atomic(a.output.string(), spectrum_io::format_two_column(t));
            out << "wrote " << a.output.string() << " (" << count << " points, " << list.lines.size() << " lines)\n";
        },
        err);
}

int cmd_kk(const KkArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(
        [&] {
            const auto in = spectrum_io::read_two_column(a.input.string(), spectrum_io::wavenumber_column,
                                                         spectrum_io::alpha_column);
            const auto idx = kk::kk_index_from_absorption(in.y, in.x, a.baseline);
            for (const auto& w : idx.warnings) err << "warning: " << w << "\n";
            spectrum_io::TwoColumn t{std::string(spectrum_io::wavenumber_column), std::string(spectrum_io::index_column),
                                     idx.grid_wn, idx.n_minus_1};
            text::write_file_atomic(a.output.string(), spectrum_io::format_two_column(t));
            out << "wrote " << a.output.string() << "\n";
        },
        err);
}

int cmd_export(const ExportArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(
        [&] {
            if (!a.csv && !a.pgm) throw ConfigError("export", "nothing to do: give --csv and/or --pgm");
            const auto map = map_io::read_map(a.map.string());
            if (a.csv) {
                text::write_file_atomic(a.csv->string(), map_io::map_to_csv(map));
                out << "wrote " << a.csv->string() << "\n";
            }
            if (a.pgm) {
                const auto pgm = map_io::map_to_pgm(map);
                text::write_file_atomic(a.pgm->string(), pgm.image);
                text::write_file_atomic(with_suffix(*a.pgm, ".pgm.json").string(), pgm.sidecar);
                out << "wrote " << a.pgm->string() << "\n";
            }
        },
        err);
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nonlinear-interferometer gas spectroscopy: simulate maps, retrieve n and alpha, line-by-line absorption, Kramers-Kronig."};
    app.require_subcommand(1);

    SimulateArgs sim;
    std::uint64_t seed = 0;
    auto* s = app.add_subcommand("simulate", "Simulate an interferogram map from a run config");
    s->add_option("config", sim.config, "Run config (JSON)")->required();
    s->add_flag("--vacuum", sim.vacuum, "Empty gap: tau = 1, n = 1");
    auto* seed_opt = s->add_option("--seed", seed, "Noise seed (overrides the config)");
    s->add_flag("--no-noise", sim.no_noise, "Write the noiseless map");
    s->add_option("-o,--output", sim.output, "Map file (default: <output_dir>/sample.nlmap or vacuum.nlmap)");

    RetrieveArgs ret;
    auto* r = app.add_subcommand("retrieve", "Retrieve n and alpha per idler wavelength from a sample and a vacuum map");
    r->add_option("config", ret.config, "Run config (JSON)")->required();
    r->add_option("sample", ret.sample, "Sample map")->required();
    r->add_option("reference", ret.reference, "Vacuum reference map")->required();
    r->add_option("-o,--output", ret.output, "Spectrum CSV (default: <output_dir>/spectrum.csv)");

    AbsorptionArgs ab;
    auto* a = app.add_subcommand("absorption", "Line-by-line absorption coefficient on a uniform wavenumber grid");
    a->add_option("lines", ab.lines, "Line list (.par HITRAN or CSV)")->required();
    a->add_option("--pressure-torr", ab.pressure_torr, "Total pressure")->required();
    a->add_option("--temperature-k", ab.temperature_k, "Temperature")->required();
    a->add_option("--wn-min", ab.wn_min, "First grid point, cm^-1")->required();
    a->add_option("--wn-max", ab.wn_max, "Last grid point, cm^-1")->required();
    a->add_option("--wn-step", ab.wn_step, "Grid step, cm^-1")->required();
    a->add_option("--self-fraction", ab.self_fraction, "Absorber mole fraction")->capture_default_str();
    a->add_option("--partition-ratio", ab.partition_ratio, "Q(296 K)/Q(T)")->capture_default_str();
    a->add_option("--resolution-fwhm-wn", ab.resolution_fwhm_wn, "Gaussian instrument FWHM, cm^-1")->capture_default_str();
    a->add_option("--molar-mass-g-mol", ab.molar_mass_g_mol, "Overrides the line list molar mass");
    a->add_option("-o,--output", ab.output, "Output CSV (nu_cm-1, alpha_cm-1)")->required();

    KkArgs kk;
    auto* k = app.add_subcommand("kk", "Refractive index from an absorption spectrum by Kramers-Kronig");
    k->add_option("input", kk.input, "Absorption CSV (nu_cm-1, alpha_cm-1) on a uniform grid")->required();
    k->add_option("--baseline", kk.baseline, "n - 1 contributed from outside the band")->capture_default_str();
    k->add_option("-o,--output", kk.output, "Output CSV (nu_cm-1, n_minus_1)")->required();

    std::filesystem::path band_out;
    lineshape::BandSpec band;
    auto* b = app.add_subcommand("band", "Write a synthetic rigid-rotor band as a CSV line list");
    b->add_option("-o,--output", band_out, "Line-list CSV")->required();
    b->add_option("--origin-wn", band.origin_wn, "Band origin, cm^-1")->capture_default_str();
    b->add_option("--rotational-constant-wn", band.rotational_constant_wn, "B, cm^-1")->capture_default_str();
    b->add_option("--band-intensity", band.band_intensity, "Sum of line intensities at 296 K")->capture_default_str();
    b->add_option("--max-j", band.max_j, "Highest lower-state J")->capture_default_str();

    ExportArgs ex;
    auto* e = app.add_subcommand("export", "Convert a map file to CSV and/or a 16-bit PGM preview");
    e->add_option("map", ex.map, "Map file")->required();
    e->add_option("--csv", ex.csv, "CSV output");
    e->add_option("--pgm", ex.pgm, "PGM output (a .pgm.json sidecar is written next to it)");

    std::vector<const char*> raw;
    raw.reserve(argv.size());
    for (const auto& x : argv) raw.push_back(x.c_str());
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::ParseError& pe) {
        const int code = app.exit(pe, out, err);
        return code == 0 ? exit_ok : exit_config;
    }
    if (*seed_opt) sim.seed = seed;

    if (s->parsed()) return cmd_simulate(sim, out, err);
    if (r->parsed()) return cmd_retrieve(ret, out, err);
    if (a->parsed()) return cmd_absorption(ab, out, err);
    if (k->parsed()) return cmd_kk(kk, out, err);
    if (b->parsed()) {
        return guarded(
            [&] {
                text::write_file_atomic(band_out.string(), lineshape::format_line_csv(lineshape::synthetic_band(band)));
                out << "wrote " << band_out.string() << "\n";
            },
            err);
    }
    return cmd_export(ex, out, err);
}

}  // namespace nlir::cli
