#pragma once

#include <string>

#include "gprdiag/bscan.hpp"

namespace gprdiag::io {

// Binary PGM (P5), 8 or 16 bit. Samples are mapped linearly from
// [vmin, vmax] onto [0, maxval]. Metadata travels in a sidecar JSON file at
// <path>.json with keys {"col_spacing_cm", "vmin", "vmax"}; when the sidecar
// is missing on read, spacing defaults to 0.141 and the range to [0, maxval].
void write_pgm(const BScanImage& img, const std::string& path, int bits = 16);
BScanImage read_pgm(const std::string& path);

// CSV of reals, one image row per line; same sidecar convention.
void write_csv(const BScanImage& img, const std::string& path);
BScanImage read_csv(const std::string& path);

// Dispatch on extension (.pgm / .csv).
void write_image(const BScanImage& img, const std::string& path);
BScanImage read_image(const std::string& path);

} // namespace gprdiag::io
