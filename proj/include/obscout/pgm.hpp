#pragma once

#include "obscout/geometry.hpp"

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace obscout {

/// 8-bit grayscale raster, row 0 at the top (PGM convention).
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    std::uint8_t at(int col, int row) const { return pixels[static_cast<size_t>(row) * width + col]; }
    std::uint8_t& at(int col, int row) { return pixels[static_cast<size_t>(row) * width + col]; }
};

namespace detail {

// Skips whitespace and '#' comment lines between header tokens.
inline int next_pgm_token(std::istream& in) {
    while (true) {
        const int c = in.peek();
        if (c == EOF) throw FormatError("pgm: truncated header");
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        int value = 0;
        if (!(in >> value)) throw FormatError("pgm: non-numeric header field");
        return value;
    }
}

}  // namespace detail

inline GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("pgm: cannot open '" + path + "'");

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '5')
        throw FormatError("pgm: bad magic in '" + path + "' (expected P5)");

    GrayImage img;
    img.width = detail::next_pgm_token(in);
    img.height = detail::next_pgm_token(in);
    const int maxval = detail::next_pgm_token(in);
    if (img.width <= 0 || img.height <= 0) throw FormatError("pgm: non-positive dimensions");
    if (maxval <= 0 || maxval > 255) throw FormatError("pgm: unsupported maxval (need <= 255)");
    in.get();  // single whitespace byte before the raster

    img.pixels.resize(static_cast<size_t>(img.width) * img.height);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw FormatError("pgm: truncated pixel data");
    return img;
}

inline void write_pgm(const std::string& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileError("pgm: cannot write '" + path + "'");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
}

}  // namespace obscout
