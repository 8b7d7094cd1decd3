#include "nlir/map_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>

#include "nlir/error.hpp"
#include "text.hpp"

namespace nlir::map_io {

using interferometer::InterferogramMap;
using nlohmann::json;

namespace {

constexpr std::string_view kMagic = "NLIRMAP 1";

void put_le(std::string& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>(bits & 0xffu));
        bits >>= 8;
    }
}

double get_le(const char* p) {
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(p[i]);
    return std::bit_cast<double>(bits);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string encode_map(const InterferogramMap& map) {
    map.validate();
    json header;
    header["rows"] = map.rows();
    header["cols"] = map.cols();
    header["dtype"] = "float64";
    header["byte_order"] = "little";
    header["layout"] = "row-major (angle, wavelength)";
    header["wavelength_nm"] = map.wavelength_nm;
    header["angle_rad"] = map.angle_rad;
    header["metadata"] = map.metadata;
    const std::string h = header.dump();
    std::string out;
    out.reserve(h.size() + 32 + map.intensity.size() * 8);
    out += kMagic;
    out += '\n';
    out += std::to_string(h.size());
    out += '\n';
    out += h;
    for (double v : map.intensity) put_le(out, v);
    return out;
}

InterferogramMap decode_map(std::string_view bytes) {
    const auto nl1 = bytes.find('\n');
    if (nl1 == std::string_view::npos || bytes.substr(0, nl1) != kMagic) {
        throw ParseError("map file: missing 'NLIRMAP 1' signature");
    }
    const auto nl2 = bytes.find('\n', nl1 + 1);
    if (nl2 == std::string_view::npos) throw ParseError("map file: missing header length line");
    long header_len = 0;
    if (!text::try_parse_int(bytes.substr(nl1 + 1, nl2 - nl1 - 1), header_len) || header_len <= 0) {
        throw ParseError("map file: invalid header length");
    }
    const std::size_t start = nl2 + 1;
    if (bytes.size() < start + static_cast<std::size_t>(header_len)) throw ParseError("map file: truncated header");
    json header;
    try {
        header = json::parse(bytes.substr(start, static_cast<std::size_t>(header_len)));
    } catch (const json::exception& e) {
        throw ParseError(std::string("map file: header is not valid JSON: ") + e.what());
    }
    InterferogramMap map;
    std::size_t rows = 0, cols = 0;
    try {
        if (header.at("dtype") != "float64" || header.at("byte_order") != "little") {
            throw ParseError("map file: unsupported sample encoding");
        }
        rows = header.at("rows").get<std::size_t>();
        cols = header.at("cols").get<std::size_t>();
        map.wavelength_nm = header.at("wavelength_nm").get<std::vector<double>>();
        map.angle_rad = header.at("angle_rad").get<std::vector<double>>();
        map.metadata = header.value("metadata", json::object());
    } catch (const json::exception& e) {
        throw ParseError(std::string("map file: malformed header: ") + e.what());
    }
    if (map.rows() != rows || map.cols() != cols) throw ParseError("map file: axis lengths disagree with shape");
    const std::size_t data_start = start + static_cast<std::size_t>(header_len);
    const std::size_t expected = rows * cols * 8;
    if (bytes.size() - data_start != expected) {
        throw ParseError("map file: expected " + std::to_string(expected) + " data bytes, found " +
                         std::to_string(bytes.size() - data_start));
    }
    map.intensity.resize(rows * cols);
    for (std::size_t i = 0; i < map.intensity.size(); ++i) map.intensity[i] = get_le(bytes.data() + data_start + 8 * i);
    try {
        map.validate();
    } catch (const DomainError& e) {
        throw ParseError(std::string("map file: ") + e.what());
    }
    return map;
}

void write_map(const std::string& path, const InterferogramMap& map) { text::write_file_atomic(path, encode_map(map)); }

InterferogramMap read_map(const std::string& path) { return decode_map(text::read_file(path)); }

std::string map_to_csv(const InterferogramMap& map) {
    map.validate();
    std::string out = "angle_rad/wavelength_nm";
    for (double w : map.wavelength_nm) out += "," + format_double(w);
    out += '\n';
    for (std::size_t r = 0; r < map.rows(); ++r) {
        out += format_double(map.angle_rad[r]);
        for (std::size_t c = 0; c < map.cols(); ++c) out += "," + format_double(map.at(r, c));
        out += '\n';
    }
    return out;
}

InterferogramMap map_from_csv(std::string_view csv) {
    const auto rows = text::lines(csv);
    if (rows.empty()) throw ParseError("map CSV: empty input");
    InterferogramMap map;
    const auto head = text::split(rows[0], ',');
    for (std::size_t i = 1; i < head.size(); ++i) map.wavelength_nm.push_back(text::parse_double(head[i], "map CSV header"));
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto fields = text::split(rows[r], ',');
        const std::string where = "map CSV row " + std::to_string(r + 1);
        if (fields.size() != head.size()) throw ParseError(where + ": wrong number of fields");
        map.angle_rad.push_back(text::parse_double(fields[0], where));
        for (std::size_t i = 1; i < fields.size(); ++i) map.intensity.push_back(text::parse_double(fields[i], where));
    }
    try {
        map.validate();
    } catch (const DomainError& e) {
        throw ParseError(std::string("map CSV: ") + e.what());
    }
    return map;
}

PgmExport map_to_pgm(const InterferogramMap& map) {
    map.validate();
    const auto [lo_it, hi_it] = std::minmax_element(map.intensity.begin(), map.intensity.end());
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    const double scale = span > 0.0 ? span / 65535.0 : 1.0;
    PgmExport out;
    out.image = "P5\n" + std::to_string(map.cols()) + " " + std::to_string(map.rows()) + "\n65535\n";
    for (double v : map.intensity) {
        const auto level = static_cast<std::uint16_t>(std::lround(std::clamp((v - lo) / scale, 0.0, 65535.0)));
        out.image.push_back(static_cast<char>(level >> 8));
        out.image.push_back(static_cast<char>(level & 0xffu));
    }
    json side;
    side["offset"] = lo;
    side["scale"] = scale;
    side["rows"] = map.rows();
    side["cols"] = map.cols();
    side["relation"] = "intensity = offset + scale * pixel";
    side["wavelength_nm"] = {map.wavelength_nm.front(), map.wavelength_nm.back()};
    side["angle_rad"] = {map.angle_rad.front(), map.angle_rad.back()};
    out.sidecar = side.dump(2) + "\n";
    return out;
}

}  // namespace nlir::map_io
