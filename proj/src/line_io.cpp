#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>

#include "nlir/error.hpp"
#include "nlir/lineshape.hpp"
#include "text.hpp"

namespace nlir::lineshape {

namespace {

// 0-based [begin, end) spans of the HITRAN 2004+ record.
struct Span {
    std::size_t begin;
    std::size_t end;
    const char* name;
};

constexpr Span kMolecule{0, 2, "molecule id"};
constexpr Span kIsotope{2, 3, "isotope id"};
constexpr Span kCenter{3, 15, "nu"};
constexpr Span kIntensity{15, 25, "S"};
constexpr Span kGammaAir{35, 40, "gamma_air"};
constexpr Span kGammaSelf{40, 45, "gamma_self"};
constexpr Span kLowerEnergy{45, 55, "E''"};
constexpr Span kTempExponent{55, 59, "n_air"};

std::string span_label(const Span& s) {
    return std::string(s.name) + " (columns " + std::to_string(s.begin + 1) + "-" + std::to_string(s.end) + ")";
}

std::string fortran_field(std::string_view record, const Span& s) {
    std::string f(record.substr(s.begin, s.end - s.begin));
    for (auto& c : f) {
        if (c == 'D' || c == 'd') c = 'E';
    }
    return f;
}

double parse_real(std::string_view record, const Span& s) {
    const auto field = fortran_field(record, s);
    double v = 0.0;
    if (!text::try_parse_double(field, v)) {
        throw ParseError("HITRAN record: unparseable " + span_label(s) + ": '" + field + "'");
    }
    return v;
}

/// Fixed-point field of exactly `width` characters; drops a leading zero when the
/// value would otherwise overflow (Fortran prints 0.0712 as ".0712" in F5.4).
std::string fixed(double v, int width, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s(buf);
    if (static_cast<int>(s.size()) > width) {
        if (s.rfind("0.", 0) == 0) s.erase(0, 1);
        else if (s.rfind("-0.", 0) == 0) s.erase(1, 1);
    }
    if (static_cast<int>(s.size()) > width) {
        throw DomainError("value " + std::string(buf) + " does not fit a " + std::to_string(width) + "-column field");
    }
    return std::string(static_cast<std::size_t>(width) - s.size(), ' ') + s;
}

std::string scientific(double v, int width, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%*.*E", width, decimals, v);
    std::string s(buf);
    if (static_cast<int>(s.size()) > width) {
        throw DomainError("value " + s + " does not fit a " + std::to_string(width) + "-column field");
    }
    return s;
}

std::string integer(long v, int width) {
    std::string s = std::to_string(v);
    if (static_cast<int>(s.size()) > width) throw DomainError("integer " + s + " does not fit its field");
    return std::string(static_cast<std::size_t>(width) - s.size(), ' ') + s;
}

}  // namespace

HitranRecord parse_hitran_record(std::string_view record) {
    if (record.size() != hitran_record_length) {
        throw ParseError("HITRAN record: expected 160 characters, got " + std::to_string(record.size()));
    }
    HitranRecord out;
    auto& l = out.line;
    long mol = 0;
    if (!text::try_parse_int(record.substr(kMolecule.begin, 2), mol)) {
        throw ParseError("HITRAN record: unparseable " + span_label(kMolecule));
    }
    l.molecule_id = static_cast<int>(mol);
    const char iso = record[kIsotope.begin];
    if (iso >= '0' && iso <= '9') {
        l.isotope_id = iso == '0' ? 10 : iso - '0';
    } else if (iso >= 'A' && iso <= 'Z') {
        l.isotope_id = 11 + (iso - 'A');
    } else {
        throw ParseError("HITRAN record: unparseable " + span_label(kIsotope));
    }
    l.center_wn = parse_real(record, kCenter);
    l.intensity = parse_real(record, kIntensity);
    l.gamma_air = parse_real(record, kGammaAir);
    if (text::trim(record.substr(kGammaSelf.begin, kGammaSelf.end - kGammaSelf.begin)).empty()) {
        l.gamma_self = 0.0;
        out.gamma_self_defaulted = true;
    } else {
        l.gamma_self = parse_real(record, kGammaSelf);
    }
    l.lower_energy = parse_real(record, kLowerEnergy);
    l.temperature_exponent = parse_real(record, kTempExponent);
    return out;
}

std::string format_hitran_record(const SpectralLine& line) {
    std::string r;
    r.reserve(hitran_record_length);
    r += integer(line.molecule_id, 2);
    if (line.isotope_id >= 0 && line.isotope_id <= 9) {
        r += static_cast<char>('0' + line.isotope_id);
    } else if (line.isotope_id == 10) {
        r += '0';
    } else if (line.isotope_id >= 11 && line.isotope_id <= 36) {
        r += static_cast<char>('A' + line.isotope_id - 11);
    } else {
        throw DomainError("isotope id out of range");
    }
    r += fixed(line.center_wn, 12, 6);
    r += scientific(line.intensity, 10, 3);
    r += scientific(0.0, 10, 3);  // Einstein A
    r += fixed(line.gamma_air, 5, 4);
    r += fixed(line.gamma_self, 5, 3);
    r += fixed(line.lower_energy, 10, 4);
    r += fixed(line.temperature_exponent, 4, 2);
    r += fixed(0.0, 8, 6);          // pressure shift
    r += std::string(60, ' ');      // global and local quanta
    r += "000000";                  // uncertainty indices
    r += "000000000000";            // reference indices
    r += ' ';                       // line-mixing flag
    r += fixed(0.0, 7, 1);          // g'
    r += fixed(0.0, 7, 1);          // g''
    return r;
}

LineList parse_hitran(std::string_view text, std::string molecule, double molar_mass_g_mol) {
    LineList list;
    list.molecule = std::move(molecule);
    list.molar_mass_g_mol = molar_mass_g_mol;
    std::size_t n = 0;
    for (auto rec : text::lines(text)) {
        ++n;
        if (text::trim(rec).empty()) continue;
        try {
            auto parsed = parse_hitran_record(rec);
            if (parsed.gamma_self_defaulted) {
                list.warnings.push_back("record " + std::to_string(n) + ": blank gamma_self, using 0");
            }
            list.lines.push_back(parsed.line);
        } catch (const ParseError& e) {
            throw ParseError("record " + std::to_string(n) + ": " + e.what());
        }
    }
    list.sort();
    return list;
}

LineList parse_line_csv(std::string_view text) {
    LineList list;
    const auto rows = text::lines(text);
    std::size_t row = 0;
    std::vector<std::string> header;
    for (; row < rows.size(); ++row) {
        auto line = text::trim(rows[row]);
        if (line.empty()) continue;
        if (line.front() == '#') {
            line.remove_prefix(1);
            const auto colon = line.find(':');
            if (colon == std::string_view::npos) continue;
            const auto key = text::trim(line.substr(0, colon));
            const auto value = text::trim(line.substr(colon + 1));
            if (key == "molecule") list.molecule = std::string(value);
            else if (key == "molar_mass_g/mol") list.molar_mass_g_mol = text::parse_double(value, "line list metadata");
            continue;
        }
        for (auto h : text::split(line, ',')) header.emplace_back(text::trim(h));
        ++row;
        break;
    }
    if (header.empty()) throw ParseError("line list CSV: missing header row");

    std::map<std::string_view, std::size_t> col;
    const std::string_view known[] = {csv_center, csv_intensity, csv_gamma_air, csv_gamma_self,
                                      csv_lower_energy, csv_temperature_exponent};
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto it = std::find(std::begin(known), std::end(known), header[i]);
        if (it == std::end(known)) {
            list.warnings.push_back("ignoring unknown column '" + header[i] + "'");
            continue;
        }
        col[*it] = i;
    }
    for (auto mandatory : {csv_center, csv_intensity}) {
        if (!col.count(mandatory)) {
            throw ParseError("line list CSV: missing mandatory column '" + std::string(mandatory) + "'");
        }
    }

    for (; row < rows.size(); ++row) {
        const auto line = text::trim(rows[row]);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = text::split(line, ',');
        const std::string where = "line list CSV row " + std::to_string(row + 1);
        if (fields.size() != header.size()) {
            throw ParseError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        }
        auto get = [&](std::string_view name, double fallback) {
            const auto it = col.find(name);
            return it == col.end() ? fallback : text::parse_double(fields[it->second], where);
        };
        SpectralLine l;
        l.center_wn = get(csv_center, 0.0);
        l.intensity = get(csv_intensity, 0.0);
        l.gamma_air = get(csv_gamma_air, 0.0);
        l.gamma_self = get(csv_gamma_self, 0.0);
        l.lower_energy = get(csv_lower_energy, 0.0);
        l.temperature_exponent = get(csv_temperature_exponent, 0.0);
        try {
            l.validate();
        } catch (const DomainError& e) {
            throw ParseError(where + ": " + e.what());
        }
        list.lines.push_back(l);
    }
    list.sort();
    return list;
}

std::string format_line_csv(const LineList& list) {
    std::ostringstream out;
    out.precision(17);
    if (!list.molecule.empty()) out << "# molecule: " << list.molecule << '\n';
    if (list.molar_mass_g_mol > 0.0) out << "# molar_mass_g/mol: " << list.molar_mass_g_mol << '\n';
    out << csv_center << ',' << csv_intensity << ',' << csv_gamma_air << ',' << csv_gamma_self << ','
        << csv_lower_energy << ',' << csv_temperature_exponent << '\n';
    for (const auto& l : list.lines) {
        out << l.center_wn << ',' << l.intensity << ',' << l.gamma_air << ',' << l.gamma_self << ','
            << l.lower_energy << ',' << l.temperature_exponent << '\n';
    }
    return out.str();
}

LineList load_line_list(const std::string& path) {
    const auto contents = text::read_file(path);
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".par") == 0) return parse_hitran(contents);
    return parse_line_csv(contents);
}

}  // namespace nlir::lineshape
