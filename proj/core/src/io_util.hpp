#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "gprdiag/errors.hpp"

namespace gprdiag::io::detail {

// shortest exact round-trip formatting, deterministic across runs
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + path);
    out << contents;
    if (!out) throw DataError("write failed: " + path);
}

} // namespace gprdiag::io::detail
