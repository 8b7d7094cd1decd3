#pragma once

#include <string>
#include <string_view>

#include "nlir/interferometer.hpp"

namespace nlir::map_io {

/// Binary container:
///   line 1  "NLIRMAP 1"
///   line 2  decimal byte length N of the header
///   N bytes of UTF-8 JSON (axes, shape, metadata)
///   rows*cols little-endian float64 intensities, row-major (angle, wavelength)
std::string encode_map(const interferometer::InterferogramMap& map);
interferometer::InterferogramMap decode_map(std::string_view bytes);

void write_map(const std::string& path, const interferometer::InterferogramMap& map);
interferometer::InterferogramMap read_map(const std::string& path);

/// Full-precision CSV: header row "angle_rad/wavelength_nm,<wavelengths...>", then one
/// row per angle.
std::string map_to_csv(const interferometer::InterferogramMap& map);
interferometer::InterferogramMap map_from_csv(std::string_view text);

struct PgmExport {
    std::string image;     // binary P5, 16-bit big-endian
    std::string sidecar;   // JSON: intensity = offset + scale * pixel
};

PgmExport map_to_pgm(const interferometer::InterferogramMap& map);

}  // namespace nlir::map_io
