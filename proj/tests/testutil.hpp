#pragma once

#include <gridsort/gridsort.hpp>

#include <random>

namespace testutil {

using namespace gridsort;

/// Uniform RGB colors in [0,1]^3, the synthetic set used throughout.
inline Dataset random_colors(std::size_t n, std::uint64_t seed) {
    RandomSource rng(seed);
    std::vector<std::vector<double>> rows(n);
    for (auto& row : rows)
        row = {rng.uniform_real(), rng.uniform_real(), rng.uniform_real()};
    return Dataset(std::move(rows));
}

/// Random vectors with an independent generator (not the library RNG).
inline Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed,
                              std::size_t label_classes = 0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    for (auto& row : rows)
        for (double& x : row) x = uni(gen);
    if (label_classes == 0) return Dataset(std::move(rows));
    std::vector<std::string> labels(n);
    std::uniform_int_distribution<std::size_t> cls(0, label_classes - 1);
    for (auto& l : labels) l = "c" + std::to_string(cls(gen));
    return Dataset(std::move(rows), std::move(labels));
}

/// Random bijection of n items onto the active cells of a grid.
inline Arrangement random_arrangement_on(const GridSpec& spec,
                                         std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<Cell> cells = spec.active_cells();
    for (std::size_t i = cells.size(); i > 1; --i)
        std::swap(cells[i - 1],
                  cells[std::uniform_int_distribution<std::size_t>(0, i - 1)(gen)]);
    return Arrangement(spec.width(), spec.height(), std::move(cells));
}

/// Identity placement: index i at cell (i % W, i / W) over a full grid.
inline Arrangement identity_arrangement(int w, int h) {
    std::vector<Cell> cells(static_cast<std::size_t>(w) * h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            cells[static_cast<std::size_t>(r) * w + c] = {c, r};
    return Arrangement(w, h, std::move(cells));
}

/// Dataset whose vectors are the 2D grid coordinates themselves; with the
/// identity arrangement this is a perfect embedding.
inline Dataset grid_coordinate_dataset(int w, int h) {
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(w) * h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            rows.push_back({static_cast<double>(c), static_cast<double>(r)});
    return Dataset(std::move(rows));
}

/// Heart-shaped mask from the classic implicit curve
/// (x^2 + y^2 - 1)^3 - x^2 y^3 <= 0.
inline MaskSource heart_mask(int w, int h) {
    MaskSource src;
    src.width = w;
    src.height = h;
    src.bitmap.assign(static_cast<std::size_t>(w) * h, 0);
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const double x = (col + 0.5) / w * 3.0 - 1.5;
            const double y = 1.5 - (row + 0.5) / h * 3.0;
            const double a = x * x + y * y - 1.0;
            if (a * a * a - x * x * y * y * y <= 0.0)
                src.bitmap[static_cast<std::size_t>(row) * w + col] = 1;
        }
    }
    return src;
}

/// The 8 isometries of a square grid applied to an arrangement.
inline Arrangement apply_isometry(const Arrangement& arr, int iso) {
    const int w = arr.width(), h = arr.height();
    std::vector<Cell> cells(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        Cell c = arr.cell_of(i);
        if (iso & 4) c = {c.row, c.col}; // transpose (needs square grid)
        if (iso & 1) c.col = w - 1 - c.col;
        if (iso & 2) c.row = h - 1 - c.row;
        cells[i] = c;
    }
    return Arrangement(w, h, std::move(cells));
}

/// Cyclic shift of every occupied cell (torus grids).
inline Arrangement cyclic_shift(const Arrangement& arr, int dx, int dy) {
    const int w = arr.width(), h = arr.height();
    std::vector<Cell> cells(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const Cell c = arr.cell_of(i);
        cells[i] = {((c.col + dx) % w + w) % w, ((c.row + dy) % h + h) % h};
    }
    return Arrangement(w, h, std::move(cells));
}

} // namespace testutil
