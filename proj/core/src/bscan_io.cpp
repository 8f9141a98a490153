#include "gprdiag/bscan_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "gprdiag/errors.hpp"
#include "io_util.hpp"

namespace gprdiag::io {

namespace {

using nlohmann::json;

void write_sidecar(const BScanImage& img, const std::string& image_path) {
    json j;
    j["col_spacing_cm"] = img.col_spacing_cm;
    j["vmin"] = img.vmin;
    j["vmax"] = img.vmax;
    detail::write_file(image_path + ".json", j.dump(2) + "\n");
}

// Sidecar is optional on read; spacing falls back to the default and the
// range to [range_lo, range_hi].
void read_sidecar(BScanImage& img, const std::string& image_path, double range_lo,
                  double range_hi) {
    const std::string path = image_path + ".json";
    if (!std::filesystem::exists(path)) {
        img.col_spacing_cm = 0.141;
        img.vmin = range_lo;
        img.vmax = range_hi;
        return;
    }
    json j = json::parse(detail::read_file(path), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw DataError("malformed sidecar JSON: " + path);
    img.col_spacing_cm = j.value("col_spacing_cm", 0.141);
    img.vmin = j.value("vmin", range_lo);
    img.vmax = j.value("vmax", range_hi);
}

int skip_pgm_whitespace(std::istream& in) {
    int c = in.get();
    for (;;) {
        while (c != EOF && std::isspace(c)) c = in.get();
        if (c == '#') { // comment to end of line
            while (c != EOF && c != '\n') c = in.get();
            continue;
        }
        return c;
    }
}

std::size_t read_pgm_number(std::istream& in) {
    int c = skip_pgm_whitespace(in);
    if (c == EOF || !std::isdigit(c)) throw DataError("malformed PGM header");
    std::size_t v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + static_cast<std::size_t>(c - '0');
        c = in.get();
    }
    in.unget();
    return v;
}

} // namespace

void write_pgm(const BScanImage& img, const std::string& path, int bits) {
    img.validate();
    if (bits != 8 && bits != 16) throw std::invalid_argument("write_pgm: bits must be 8 or 16");
    const std::uint32_t maxval = bits == 8 ? 255u : 65535u;
    const double lo = img.vmin, hi = img.vmax;
    const double span = hi > lo ? hi - lo : 1.0;

    std::ostringstream out;
    out << "P5\n" << img.cols << " " << img.rows << "\n" << maxval << "\n";
    for (double v : img.data) {
        double t = (std::clamp(v, lo, hi) - lo) / span;
        const std::uint32_t q = static_cast<std::uint32_t>(std::lround(t * maxval));
        if (bits == 16) out.put(static_cast<char>((q >> 8) & 0xFF)); // big-endian per PGM
        out.put(static_cast<char>(q & 0xFF));
    }
    detail::write_file(path, out.str());
    write_sidecar(img, path);
}

BScanImage read_pgm(const std::string& path) {
    const std::string raw = detail::read_file(path);
    std::istringstream in(raw);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5') throw DataError("not a binary PGM (P5): " + path);
    const std::size_t cols = read_pgm_number(in);
    const std::size_t rows = read_pgm_number(in);
    const std::size_t maxval = read_pgm_number(in);
    if (maxval == 0 || maxval > 65535) throw DataError("bad PGM maxval: " + path);
    in.get(); // single whitespace before the raster

    const int bytes = maxval > 255 ? 2 : 1;
    BScanImage img(rows, cols);
    read_sidecar(img, path, 0.0, static_cast<double>(maxval));
    const double lo = img.vmin, hi = img.vmax;

    std::vector<char> buf(rows * cols * static_cast<std::size_t>(bytes));
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size())
        throw DataError("truncated PGM raster: " + path);
    for (std::size_t i = 0; i < rows * cols; ++i) {
        std::uint32_t q;
        if (bytes == 2)
            q = (static_cast<std::uint8_t>(buf[2 * i]) << 8) |
                static_cast<std::uint8_t>(buf[2 * i + 1]);
        else
            q = static_cast<std::uint8_t>(buf[i]);
        img.data[i] = lo + (hi - lo) * static_cast<double>(q) / static_cast<double>(maxval);
    }
    return img;
}

void write_csv(const BScanImage& img, const std::string& path) {
    img.validate();
    std::ostringstream out;
    for (std::size_t r = 0; r < img.rows; ++r) {
        for (std::size_t c = 0; c < img.cols; ++c) {
            if (c) out << ',';
            out << detail::fmt_double(img.at(r, c));
        }
        out << '\n';
    }
    detail::write_file(path, out.str());
    write_sidecar(img, path);
}

BScanImage read_csv(const std::string& path) {
    std::istringstream in(detail::read_file(path));
    std::vector<double> data;
    std::size_t rows = 0, cols = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::size_t n = 0;
        while (std::getline(ls, cell, ',')) {
            try {
                data.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw DataError("bad CSV value in " + path + ": " + cell);
            }
            ++n;
        }
        if (rows == 0)
            cols = n;
        else if (n != cols)
            throw DataError("ragged CSV rows in " + path);
        ++rows;
    }
    if (rows == 0 || cols == 0) throw DataError("empty CSV image: " + path);
    BScanImage img(rows, cols);
    img.data = std::move(data);
    img.update_range();
    const double lo = img.vmin, hi = img.vmax;
    read_sidecar(img, path, lo, hi);
    return img;
}

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

void write_image(const BScanImage& img, const std::string& path) {
    if (has_suffix(path, ".pgm"))
        write_pgm(img, path);
    else if (has_suffix(path, ".csv"))
        write_csv(img, path);
    else
        throw std::invalid_argument("write_image: unsupported extension (want .pgm or .csv): " + path);
}

BScanImage read_image(const std::string& path) {
    if (has_suffix(path, ".pgm")) return read_pgm(path);
    if (has_suffix(path, ".csv")) return read_csv(path);
    throw std::invalid_argument("read_image: unsupported extension (want .pgm or .csv): " + path);
}

} // namespace gprdiag::io
