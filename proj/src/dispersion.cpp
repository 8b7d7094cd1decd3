#include "nlir/dispersion.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "nlir/constants.hpp"
#include "nlir/error.hpp"
#include "text.hpp"

namespace nlir::dispersion {

SellmeierModel SellmeierModel::constant_index(double n, double min_um, double max_um) {
    SellmeierModel m;
    m.form = SellmeierForm::constant;
    m.a = n;
    m.min_um = min_um;
    m.max_um = max_um;
    return m;
}

bool SellmeierModel::in_range(double lambda_um) const noexcept {
    return lambda_um >= min_um && lambda_um <= max_um;
}

double SellmeierModel::index(double lambda_um) const {
    if (!in_range(lambda_um)) {
        std::ostringstream msg;
        msg << "wavelength " << lambda_um << " um outside model validity [" << min_um << ", " << max_um << "] um";
        throw DomainError(msg.str());
    }
    double n = a;
    if (form != SellmeierForm::constant) {
        const double l2 = lambda_um * lambda_um;
        double n2 = a - d_um2 * l2;
        for (const auto& t : terms) {
            const double denom = l2 - t.resonance_um2;
            n2 += form == SellmeierForm::sellmeier ? t.strength * l2 / denom : t.strength / denom;
        }
        if (!(n2 > 0.0)) throw DomainError("dispersion model yields n^2 <= 0");
        n = std::sqrt(n2);
    }
    if (!(n > 1.0)) throw DomainError("dispersion model yields n <= 1 inside its validity range");
    return n;
}

void UniaxialCrystalIndex::validate() const {
    if (!(cut_angle_rad > 0.0 && cut_angle_rad <= constants::pi / 2)) {
        throw DomainError("crystal cut angle must lie in (0, pi/2]");
    }
}

double uniaxial_index(const UniaxialCrystalIndex& crystal, double lambda_um, double axis_angle_rad) {
    const double no = crystal.ordinary.index(lambda_um);
    const double ne = crystal.extraordinary.index(lambda_um);
    const double c = std::cos(axis_angle_rad);
    const double s = std::sin(axis_angle_rad);
    return 1.0 / std::sqrt(c * c / (no * no) + s * s / (ne * ne));
}

void GasIndexModel::validate() const {
    if (!(n0 > 1.0)) throw DomainError("gas reference index n0 must exceed 1");
    if (!(p0_torr > 0.0)) throw DomainError("gas reference pressure must be positive");
    if (!(t0_k > 0.0)) throw DomainError("gas reference temperature must be positive");
}

double gas_index(const GasIndexModel& model, double pressure_torr, double temperature_k) {
    model.validate();
    if (pressure_torr < 0.0) throw DomainError("negative gas pressure");
    if (!(temperature_k > 0.0)) throw DomainError("gas temperature must be positive");
    const double thermal = 1.0 + (temperature_k - model.t0_k) / model.t0_k;
    return 1.0 + pressure_torr * (model.n0 - 1.0) / (model.p0_torr * thermal);
}

double wavevector(double n, double lambda) {
    if (!(n >= 1.0)) throw DomainError("refractive index below 1");
    if (!(lambda > 0.0)) throw DomainError("wavelength must be positive");
    return constants::two_pi * n / lambda;
}

namespace {

struct PartialModel {
    std::optional<SellmeierForm> form;
    std::optional<double> a, d, min_um, max_um;
    std::vector<SellmeierTerm> terms;
};

SellmeierModel finish(const PartialModel& p, const std::string& section) {
    auto need = [&](bool ok, const char* key) {
        if (!ok) throw ParseError("coefficient file: section [" + section + "] is missing '" + key + "'");
    };
    need(p.form.has_value(), "form");
    need(p.a.has_value(), "A");
    need(p.min_um.has_value(), "min_um");
    need(p.max_um.has_value(), "max_um");
    SellmeierModel m;
    m.form = *p.form;
    m.a = *p.a;
    m.d_um2 = p.d.value_or(0.0);
    m.terms = p.terms;
    m.min_um = *p.min_um;
    m.max_um = *p.max_um;
    if (!(m.min_um > 0.0 && m.max_um > m.min_um)) {
        throw ParseError("coefficient file: section [" + section + "] has an empty validity range");
    }
    if (m.form == SellmeierForm::constant && !m.terms.empty()) {
        throw ParseError("coefficient file: section [" + section + "] declares terms for a constant form");
    }
    return m;
}

}  // namespace

UniaxialCrystalIndex parse_crystal_coefficients(std::string_view text) {
    UniaxialCrystalIndex crystal;
    std::map<std::string, PartialModel> sections;
    std::string current;
    int line_no = 0;
    for (auto raw : text::lines(text)) {
        ++line_no;
        const auto hash = raw.find('#');
        auto line = text::trim(hash == std::string_view::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::string where = "coefficient file line " + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(where + ": unterminated section header");
            current = std::string(text::trim(line.substr(1, line.size() - 2)));
            if (current != "ordinary" && current != "extraordinary") {
                throw ParseError(where + ": unknown section [" + current + "]");
            }
            if (sections.count(current)) throw ParseError(where + ": duplicate section [" + current + "]");
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(where + ": expected 'key = value'");
        const std::string key(text::trim(line.substr(0, eq)));
        const auto value = text::trim(line.substr(eq + 1));
        if (current.empty()) {
            if (key == "name") {
                crystal.name = std::string(value);
                continue;
            }
            throw ParseError(where + ": unknown top-level key '" + key + "'");
        }
        auto& p = sections[current];
        if (key == "form") {
            if (value == "constant") p.form = SellmeierForm::constant;
            else if (value == "sellmeier") p.form = SellmeierForm::sellmeier;
            else if (value == "pole") p.form = SellmeierForm::pole;
            else throw ParseError(where + ": unknown form '" + std::string(value) + "'");
        } else if (key == "A") {
            p.a = text::parse_double(value, where);
        } else if (key == "D") {
            p.d = text::parse_double(value, where);
        } else if (key == "min_um") {
            p.min_um = text::parse_double(value, where);
        } else if (key == "max_um") {
            p.max_um = text::parse_double(value, where);
        } else if (key == "term") {
            std::vector<std::string_view> fields;
            for (auto f : text::split(value, ' ')) {
                if (!text::trim(f).empty()) fields.push_back(f);
            }
            if (fields.size() != 2) throw ParseError(where + ": 'term' takes two numbers (B C_um2)");
            p.terms.push_back({text::parse_double(fields[0], where), text::parse_double(fields[1], where)});
        } else {
            throw ParseError(where + ": unknown key '" + key + "' in section [" + current + "]");
        }
    }
    for (const char* s : {"ordinary", "extraordinary"}) {
        if (!sections.count(s)) throw ParseError(std::string("coefficient file: missing section [") + s + "]");
    }
    crystal.ordinary = finish(sections["ordinary"], "ordinary");
    crystal.extraordinary = finish(sections["extraordinary"], "extraordinary");
    return crystal;
}

UniaxialCrystalIndex load_crystal_coefficients(const std::filesystem::path& path) {
    return parse_crystal_coefficients(text::read_file(path.string()));
}

}  // namespace nlir::dispersion
