#pragma once

#include "core.hpp"
#include "filter.hpp"
#include "io.hpp"
#include "sorters.hpp"

#include <fstream>
#include <sstream>

namespace gridsort {

/// Active-cell bitmap for shape-constrained grids.
struct MaskSource {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bitmap; // row-major, nonzero = active

    std::size_t active_count() const {
        return static_cast<std::size_t>(
            std::count_if(bitmap.begin(), bitmap.end(),
                          [](std::uint8_t b) { return b != 0; }));
    }
};

/// Pinned (cell, dataset index, weight) declarations.
using PinDecl = std::vector<Pin>;

inline GridSpec grid_from_mask(const MaskSource& src,
                               WrapMode wrap = WrapMode::clamp) {
    if (src.bitmap.size() !=
        static_cast<std::size_t>(src.width) * src.height)
        throw invalid_input("grid_from_mask: bitmap size does not match");
    std::vector<std::uint8_t> mask(src.bitmap.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        mask[i] = src.bitmap[i] ? 1 : 0;
    return GridSpec(src.width, src.height, std::move(mask), wrap);
}

/// Validates the pins against the grid, writes them into the spec and the
/// pin weights into the map (all other weights 1).
inline std::pair<GridSpec, MapState> apply_pins(const GridSpec& spec,
                                                const PinDecl& pins,
                                                MapState map) {
    GridSpec out = spec;
    out.set_pins(pins);
    std::vector<double>& w = map.weights();
    std::fill(w.begin(), w.end(), 1.0);
    for (const Pin& p : pins) w[out.cell_index(p.cell)] = p.weight;
    return {std::move(out), std::move(map)};
}

/// Filter schedule with a wider horizontal radius: radius_x =
/// ceil(ratio * radius_y) at every step of the decay.
inline std::vector<FilterSpec> anisotropic_preset(const GridSpec& spec,
                                                  double ratio,
                                                  double initial_radius_factor = 0.5,
                                                  double radius_decay = 0.93) {
    if (!(ratio >= 1.0))
        throw invalid_input("anisotropic_preset: ratio must be >= 1");
    detail::check_radius_params(initial_radius_factor, radius_decay);
    std::vector<FilterSpec> schedule;
    double r = std::max(spec.width(), spec.height()) * initial_radius_factor;
    while (static_cast<int>(r) >= 1) {
        schedule.push_back(
            detail::make_filter_spec(static_cast<int>(r), ratio, spec));
        r *= radius_decay;
    }
    return schedule;
}

/// Loads a mask from a PGM file (P2/P5, grayscale thresholded at 50%,
/// bright = active) or a text grid of 0/1 rows.
inline MaskSource load_mask(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open mask file: " + path);

    std::string magic;
    in >> magic;
    MaskSource src;
    if (magic == "P2" || magic == "P5") {
        int maxval = 0;
        detail::skip_pnm_junk(in);
        in >> src.width;
        detail::skip_pnm_junk(in);
        in >> src.height;
        detail::skip_pnm_junk(in);
        in >> maxval;
        if (!in || src.width < 1 || src.height < 1 || maxval < 1)
            throw parse_error("bad PGM header in " + path);
        const std::size_t count =
            static_cast<std::size_t>(src.width) * src.height;
        src.bitmap.resize(count);
        if (magic == "P2") {
            for (std::size_t i = 0; i < count; ++i) {
                long v = 0;
                if (!(in >> v)) throw parse_error("truncated PGM data in " + path);
                src.bitmap[i] = 2 * v > maxval ? 1 : 0;
            }
        } else {
            in.get(); // single whitespace after maxval
            const int bytes = maxval > 255 ? 2 : 1;
            for (std::size_t i = 0; i < count; ++i) {
                long v = 0;
                for (int b = 0; b < bytes; ++b) {
                    const int ch = in.get();
                    if (ch == EOF) throw parse_error("truncated PGM data in " + path);
                    v = (v << 8) | ch;
                }
                src.bitmap[i] = 2 * v > maxval ? 1 : 0;
            }
        }
        return src;
    }

    // Text grid: rows of 0/1 characters (spaces allowed).
    in.clear();
    in.seekg(0);
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::vector<std::uint8_t>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::uint8_t> row;
        for (const char c : line) {
            if (c == '0')
                row.push_back(0);
            else if (c == '1')
                row.push_back(1);
            else if (!std::isspace(static_cast<unsigned char>(c)))
                throw parse_error("mask " + path + " line " +
                                  std::to_string(lineno) + ": unexpected '" +
                                  std::string(1, c) + "'");
        }
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw parse_error("mask " + path + " line " + std::to_string(lineno) +
                              ": ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw parse_error("mask " + path + ": empty");
    src.width = static_cast<int>(rows.front().size());
    src.height = static_cast<int>(rows.size());
    for (const auto& row : rows)
        src.bitmap.insert(src.bitmap.end(), row.begin(), row.end());
    return src;
}

/// Loads pins from lines of "col,row,index[,weight]".
inline PinDecl load_pins(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open pins file: " + path);
    PinDecl pins;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
        if (trimmed.empty() || trimmed[0] == '#') continue;
        std::istringstream ss(trimmed);
        Pin p;
        char comma = 0;
        if (!(ss >> p.cell.col >> comma >> p.cell.row >> comma >> p.index) ||
            comma != ',')
            throw parse_error("pins " + path + " line " + std::to_string(lineno) +
                              ": expected col,row,index[,weight]");
        if (ss >> comma) {
            if (comma != ',' || !(ss >> p.weight))
                throw parse_error("pins " + path + " line " +
                                  std::to_string(lineno) + ": bad weight");
        }
        pins.push_back(p);
    }
    return pins;
}

} // namespace gridsort
