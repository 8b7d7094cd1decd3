#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nlir/config.hpp"
#include "nlir/error.hpp"
#include "nlir/kk.hpp"
#include "nlir/lineshape.hpp"
#include "nlir/map_io.hpp"
#include "nlir/retrieval.hpp"

namespace py = pybind11;
using namespace nlir;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const std::vector<double>& v) {
    Array a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

py::array_t<bool> to_bool_array(const std::vector<bool>& v) {
    py::array_t<bool> a(static_cast<py::ssize_t>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) a.mutable_data()[i] = v[i];
    return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Nonlinear-interferometer infrared gas spectroscopy core";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<IncompatibleDataError>(m, "IncompatibleDataError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    // Wavelengths and line shapes.
    m.def("signal_wavelength", &interferometer::signal_wavelength, py::arg("pump_nm"), py::arg("idler_nm"));
    m.def("idler_wavelength", &interferometer::idler_wavelength, py::arg("pump_nm"), py::arg("signal_nm"));
    m.def("faddeeva", &lineshape::faddeeva, py::arg("z"));
    m.def("voigt_profile", py::vectorize(&lineshape::voigt_profile), py::arg("wn"), py::arg("center_wn"),
          py::arg("gamma_d"), py::arg("gamma_l"));
    m.def("doppler_halfwidth", &lineshape::doppler_halfwidth, py::arg("center_wn"), py::arg("temperature_k"),
          py::arg("molar_mass_g_mol"));

    py::class_<lineshape::SpectralLine>(m, "SpectralLine")
        .def(py::init<>())
        .def_readwrite("molecule_id", &lineshape::SpectralLine::molecule_id)
        .def_readwrite("isotope_id", &lineshape::SpectralLine::isotope_id)
        .def_readwrite("center_wn", &lineshape::SpectralLine::center_wn)
        .def_readwrite("intensity", &lineshape::SpectralLine::intensity)
        .def_readwrite("gamma_air", &lineshape::SpectralLine::gamma_air)
        .def_readwrite("gamma_self", &lineshape::SpectralLine::gamma_self)
        .def_readwrite("lower_energy", &lineshape::SpectralLine::lower_energy)
        .def_readwrite("temperature_exponent", &lineshape::SpectralLine::temperature_exponent)
        .def(py::self == py::self);

    py::class_<lineshape::LineList>(m, "LineList")
        .def_readonly("molecule", &lineshape::LineList::molecule)
        .def_readonly("lines", &lineshape::LineList::lines)
        .def_readonly("molar_mass_g_mol", &lineshape::LineList::molar_mass_g_mol)
        .def_readonly("warnings", &lineshape::LineList::warnings)
        .def("__len__", [](const lineshape::LineList& l) { return l.lines.size(); });

    m.def("load_line_list", &lineshape::load_line_list, py::arg("path"));
    m.def("parse_hitran_record", [](const std::string& r) { return lineshape::parse_hitran_record(r).line; },
          py::arg("record"));
    m.def("format_hitran_record", &lineshape::format_hitran_record, py::arg("line"));
    m.def(
        "absorption_spectrum",
        [](const lineshape::LineList& list, const Array& grid, double pressure_torr, double temperature_k,
           double self_fraction, double resolution_fwhm_wn) {
            lineshape::AbsorptionOptions o;
            o.self_fraction = self_fraction;
            o.instrument_hwhm_wn = 0.5 * resolution_fwhm_wn;
            return to_array(lineshape::absorption_spectrum(list, to_vector(grid), pressure_torr, temperature_k, o));
        },
        py::arg("lines"), py::arg("grid_wn"), py::arg("pressure_torr"), py::arg("temperature_k"),
        py::arg("self_fraction") = 1.0, py::arg("resolution_fwhm_wn") = 0.0);

    m.def(
        "kk_index",
        [](const Array& alpha, const Array& grid, double baseline) {
            return to_array(kk::kk_index_from_absorption(to_vector(alpha), to_vector(grid), baseline).n_minus_1);
        },
        py::arg("alpha_cm"), py::arg("grid_wn"), py::arg("baseline") = 0.0,
        "n - 1 implied by alpha on a uniform wavenumber grid.");

    // Maps.
    py::class_<interferometer::InterferogramMap>(m, "InterferogramMap")
        .def_property_readonly("wavelength_nm", [](const interferometer::InterferogramMap& x) { return to_array(x.wavelength_nm); })
        .def_property_readonly("angle_rad", [](const interferometer::InterferogramMap& x) { return to_array(x.angle_rad); })
        .def_property_readonly("intensity",
                               [](const interferometer::InterferogramMap& x) {
                                   Array a({static_cast<py::ssize_t>(x.rows()), static_cast<py::ssize_t>(x.cols())});
                                   std::copy(x.intensity.begin(), x.intensity.end(), a.mutable_data());
                                   return a;
                               })
        .def_property_readonly("metadata", [](const interferometer::InterferogramMap& x) { return x.metadata.dump(); })
        .def_property_readonly("shape", [](const interferometer::InterferogramMap& x) { return py::make_tuple(x.rows(), x.cols()); });

    m.def("read_map", &map_io::read_map, py::arg("path"));
    m.def("write_map", &map_io::write_map, py::arg("path"), py::arg("map"));

    // Configuration, simulation and retrieval.
    py::class_<config::RunConfig>(m, "RunConfig")
        .def_property_readonly("seed", [](const config::RunConfig& c) { return c.seed; })
        .def_property_readonly("gap_mm", [](const config::RunConfig& c) { return c.instrument.geometry.gap_mm; })
        .def_property_readonly("pump_axis_angle_deg",
                               [](const config::RunConfig& c) { return c.instrument.pump.axis_angle_rad * 180.0 / 3.14159265358979323846; })
        .def_property_readonly("output_dir", [](const config::RunConfig& c) { return c.output_dir; });
    m.def("load_config", &config::load_run_config, py::arg("path"));
    m.def(
        "simulate",
        [](const config::RunConfig& rc, bool vacuum, std::optional<std::uint64_t> seed, bool noise) {
            return config::simulate(rc, {vacuum, seed, noise});
        },
        py::arg("config"), py::arg("vacuum") = false, py::arg("seed") = py::none(), py::arg("noise") = true);

    py::class_<retrieval::RetrievedSpectrum>(m, "RetrievedSpectrum")
        .def_property_readonly("idler_nm", [](const retrieval::RetrievedSpectrum& s) { return to_array(s.idler_nm); })
        .def_property_readonly("n", [](const retrieval::RetrievedSpectrum& s) { return to_array(s.n); })
        .def_property_readonly("sigma_n", [](const retrieval::RetrievedSpectrum& s) { return to_array(s.sigma_n); })
        .def_property_readonly("alpha_cm", [](const retrieval::RetrievedSpectrum& s) { return to_array(s.alpha_cm); })
        .def_property_readonly("sigma_alpha", [](const retrieval::RetrievedSpectrum& s) { return to_array(s.sigma_alpha); })
        .def_property_readonly("converged", [](const retrieval::RetrievedSpectrum& s) { return to_bool_array(s.converged); })
        .def_readonly("warnings", &retrieval::RetrievedSpectrum::warnings)
        .def("__len__", &retrieval::RetrievedSpectrum::size)
        .def("to_csv", &retrieval::spectrum_to_csv);

    m.def(
        "retrieve",
        [](const config::RunConfig& rc, const interferometer::InterferogramMap& sample,
           const interferometer::InterferogramMap& reference) {
            py::gil_scoped_release release;
            return retrieval::retrieve_spectrum(sample, reference, rc.instrument, config::retrieval_options(rc));
        },
        py::arg("config"), py::arg("sample"), py::arg("reference"));

    m.def(
        "summarize",
        [](const retrieval::RetrievedSpectrum& s) {
            const auto r = retrieval::summarize(s);
            py::dict d;
            d["peak_alpha_cm"] = r.peak_alpha_cm;
            d["peak_idler_nm"] = r.peak_idler_nm;
            d["fwhm_nm"] = r.fwhm_nm;
            d["fwhm_resolved"] = r.fwhm_resolved;
            d["points"] = r.points;
            return d;
        },
        py::arg("spectrum"));

    m.def("visibility", [](const Array& cs) { return retrieval::visibility(to_vector(cs)); }, py::arg("cross_section"));
    m.def(
        "alpha_from_visibility",
        [](double v, double v_ref, double gap_mm) { return retrieval::alpha_from_visibility(v, v_ref, gap_mm).alpha_cm; },
        py::arg("v"), py::arg("v_ref"), py::arg("gap_mm"));
}
