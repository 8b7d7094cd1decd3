#include "nlir/spectrum_io.hpp"

#include <cstdio>

#include "nlir/error.hpp"
#include "text.hpp"

namespace nlir::spectrum_io {

std::string format_two_column(const TwoColumn& t) {
    if (t.x.size() != t.y.size()) throw DomainError("two-column table: column lengths differ");
    std::string out = t.x_name + "," + t.y_name + "\n";
    char buf[96];
    for (std::size_t i = 0; i < t.x.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t.x[i], t.y[i]);
        out += buf;
    }
    return out;
}

TwoColumn parse_two_column(std::string_view body) {
    TwoColumn t;
    bool header = false;
    std::size_t row = 0;
    for (auto line : text::lines(body)) {
        ++row;
        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto f = text::split(line, ',');
        if (f.size() != 2) throw ParseError("CSV line " + std::to_string(row) + ": expected 2 fields");
        if (!header) {
            t.x_name = std::string(text::trim(f[0]));
            t.y_name = std::string(text::trim(f[1]));
            header = true;
            continue;
        }
        const std::string ctx = "CSV line " + std::to_string(row);
        t.x.push_back(text::parse_double(f[0], ctx));
        t.y.push_back(text::parse_double(f[1], ctx));
    }
    if (!header) throw ParseError("CSV: missing header");
    return t;
}

TwoColumn read_two_column(const std::string& path, std::string_view x_name, std::string_view y_name) {
    auto t = parse_two_column(text::read_file(path));
    if (t.x_name != x_name || t.y_name != y_name) {
        throw ParseError(path + ": expected columns " + std::string(x_name) + "," + std::string(y_name) + " but found " +
                         t.x_name + "," + t.y_name);
    }
    return t;
}

}  // namespace nlir::spectrum_io
