#pragma once

#include "core.hpp"

namespace gridsort {

/// The W x H field of map vectors a sorter mutates, plus optional per-cell
/// filter weights (pin emphasis).
class MapState {
public:
    MapState(int width, int height, std::size_t dim)
        : width_(width), height_(height), dim_(dim),
          vectors_(static_cast<std::size_t>(width) * height * dim, 0.0) {
        if (width < 1 || height < 1 || dim < 1)
            throw invalid_input("MapState: width, height and dim must be >= 1");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t dim() const { return dim_; }

    double* vec(int col, int row) {
        return vectors_.data() + (static_cast<std::size_t>(row) * width_ + col) * dim_;
    }
    const double* vec(int col, int row) const {
        return vectors_.data() + (static_cast<std::size_t>(row) * width_ + col) * dim_;
    }
    std::span<const double> vec_span(int col, int row) const {
        return {vec(col, row), dim_};
    }

    std::vector<double>& raw() { return vectors_; }
    const std::vector<double>& raw() const { return vectors_; }

    bool has_weights() const { return !weights_.empty(); }
    std::vector<double>& weights() {
        if (weights_.empty())
            weights_.assign(static_cast<std::size_t>(width_) * height_, 1.0);
        return weights_;
    }
    const std::vector<double>& weights() const { return weights_; }
    void clear_weights() { weights_.clear(); }

private:
    int width_;
    int height_;
    std::size_t dim_;
    std::vector<double> vectors_;
    std::vector<double> weights_;
};

struct FilterSpec {
    int radius_x = 0;
    int radius_y = 0;
    WrapMode border = WrapMode::clamp;
    bool weighted = false;
};

namespace detail {

// Sum over the 1D window [i-r, i+r] for every i, via prefix sums so the
// cost is independent of r. Interleaved fields of k components.
// clamp shrinks the window at the borders; torus wraps (and counts cells
// more than once when 2r+1 > n, matching a naive wrapped loop).
inline void window_sum_1d(const double* in, double* out, std::size_t n,
                          std::size_t stride, std::size_t k, int r,
                          WrapMode border, std::vector<double>& prefix) {
    prefix.assign((n + 1) * k, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < k; ++c)
            prefix[(i + 1) * k + c] = prefix[i * k + c] + in[i * stride + c];

    const auto range_sum = [&](std::size_t a, std::size_t b, std::size_t c) {
        return prefix[b * k + c] - prefix[a * k + c];
    };

    if (border == WrapMode::clamp) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t lo = i >= static_cast<std::size_t>(r) ? i - r : 0;
            const std::size_t hi = std::min(n - 1, i + r);
            for (std::size_t c = 0; c < k; ++c)
                out[i * stride + c] = range_sum(lo, hi + 1, c);
        }
    } else {
        const std::size_t w = 2 * static_cast<std::size_t>(r) + 1;
        const std::size_t cycles = w / n;
        const std::size_t rem = w % n;
        const std::size_t back = static_cast<std::size_t>(r) % n;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t start = (i + n - back) % n;
            for (std::size_t c = 0; c < k; ++c) {
                double s = cycles > 0 ? cycles * range_sum(0, n, c) : 0.0;
                if (rem > 0) {
                    if (start + rem <= n)
                        s += range_sum(start, start + rem, c);
                    else
                        s += range_sum(start, n, c) + range_sum(0, start + rem - n, c);
                }
                out[i * stride + c] = s;
            }
        }
    }
}

// Separable 2D window sums over an interleaved W x H x k field.
inline std::vector<double> window_sum_2d(const std::vector<double>& field, int w,
                                         int h, std::size_t k,
                                         const FilterSpec& spec) {
    std::vector<double> horiz(field.size());
    std::vector<double> prefix;
    const std::size_t row_elems = static_cast<std::size_t>(w) * k;
    for (int y = 0; y < h; ++y)
        window_sum_1d(field.data() + y * row_elems, horiz.data() + y * row_elems,
                      w, k, k, spec.radius_x, spec.border, prefix);
    std::vector<double> out(field.size());
    for (int x = 0; x < w; ++x)
        window_sum_1d(horiz.data() + static_cast<std::size_t>(x) * k,
                      out.data() + static_cast<std::size_t>(x) * k, h, row_elems, k,
                      spec.radius_y, spec.border, prefix);
    return out;
}

inline void check_filter_spec(const MapState& map, const FilterSpec& spec) {
    if (spec.radius_x < 0 || spec.radius_y < 0)
        throw invalid_input("filter: radius must be >= 0");
    if (spec.border == WrapMode::torus &&
        (spec.radius_x >= map.width() || spec.radius_y >= map.height()))
        throw invalid_input("filter: radius too large for torus wrap");
}

inline std::size_t window_len(std::size_t i, std::size_t n, int r, WrapMode border) {
    if (border == WrapMode::torus) return 2 * static_cast<std::size_t>(r) + 1;
    const std::size_t lo = i >= static_cast<std::size_t>(r) ? i - r : 0;
    const std::size_t hi = std::min(n - 1, i + r);
    return hi - lo + 1;
}

} // namespace detail

/// Mean over the (2rx+1) x (2ry+1) window around every cell. Constant cost
/// per cell regardless of radius.
inline MapState box_filter(const MapState& map, const FilterSpec& spec) {
    detail::check_filter_spec(map, spec);
    const int w = map.width(), h = map.height();
    const std::size_t d = map.dim();
    MapState out(w, h, d);
    const std::vector<double> sums = detail::window_sum_2d(map.raw(), w, h, d, spec);
    for (int y = 0; y < h; ++y) {
        const std::size_t ny = detail::window_len(y, h, spec.radius_y, spec.border);
        for (int x = 0; x < w; ++x) {
            const std::size_t nx =
                detail::window_len(x, w, spec.radius_x, spec.border);
            const double count = static_cast<double>(nx * ny);
            const std::size_t base = (static_cast<std::size_t>(y) * w + x) * d;
            for (std::size_t c = 0; c < d; ++c)
                out.raw()[base + c] = sums[base + c] / count;
        }
    }
    if (map.has_weights()) out.weights() = map.weights();
    return out;
}

/// Weighted window mean sum(w*v)/sum(w); with all weights 1 this reproduces
/// box_filter bit for bit.
inline MapState weighted_box_filter(const MapState& map, const FilterSpec& spec) {
    detail::check_filter_spec(map, spec);
    if (!map.has_weights())
        throw invalid_input("weighted_box_filter: map has no weights");
    const int w = map.width(), h = map.height();
    const std::size_t d = map.dim();
    const std::vector<double>& wt = map.weights();

    std::vector<double> weighted(map.raw().size());
    for (std::size_t cell = 0; cell < wt.size(); ++cell) {
        if (wt[cell] < 0.0)
            throw invalid_input("weighted_box_filter: negative weight");
        for (std::size_t c = 0; c < d; ++c)
            weighted[cell * d + c] = wt[cell] * map.raw()[cell * d + c];
    }
    const std::vector<double> num = detail::window_sum_2d(weighted, w, h, d, spec);
    const std::vector<double> den = detail::window_sum_2d(wt, w, h, 1, spec);

    MapState out(w, h, d);
    for (std::size_t cell = 0; cell < wt.size(); ++cell) {
        if (den[cell] == 0.0)
            throw invalid_input("weighted_box_filter: window has zero total weight");
        for (std::size_t c = 0; c < d; ++c)
            out.raw()[cell * d + c] = num[cell * d + c] / den[cell];
    }
    out.weights() = wt;
    return out;
}

/// For every grid cell, the row-major-first nearest active cell.
inline std::vector<std::size_t> nearest_active_table(const GridSpec& spec) {
    const std::vector<Cell> actives = spec.active_cells();
    std::vector<std::size_t> table(
        static_cast<std::size_t>(spec.width()) * spec.height());
    for (int r = 0; r < spec.height(); ++r) {
        for (int c = 0; c < spec.width(); ++c) {
            const Cell here{c, r};
            if (spec.active(here)) {
                table[spec.cell_index(here)] = spec.cell_index(here);
                continue;
            }
            std::int64_t best = -1;
            std::size_t best_cell = 0;
            for (const Cell& a : actives) {
                const std::int64_t d2 = detail::grid_distance_sq(
                    here, a, spec.width(), spec.height(), spec.wrap());
                if (best < 0 || d2 < best) {
                    best = d2;
                    best_cell = spec.cell_index(a);
                }
            }
            table[spec.cell_index(here)] = best_cell;
        }
    }
    return table;
}

/// Copies the nearest assigned vector into every masked-out cell so a mask
/// does not distort the filtered neighborhood field.
inline MapState fill_inactive(const MapState& map,
                              const std::vector<std::size_t>& table) {
    MapState out = map;
    const std::size_t d = map.dim();
    for (std::size_t cell = 0; cell < table.size(); ++cell) {
        if (table[cell] == cell) continue;
        for (std::size_t c = 0; c < d; ++c)
            out.raw()[cell * d + c] = map.raw()[table[cell] * d + c];
    }
    return out;
}

inline MapState fill_inactive(const MapState& map, const GridSpec& spec) {
    return fill_inactive(map, nearest_active_table(spec));
}

} // namespace gridsort
