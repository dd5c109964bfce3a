#pragma once

#include "core.hpp"
#include "filter.hpp"
#include "lap.hpp"

namespace gridsort {

struct LasParams {
    double initial_radius_factor = 0.35; // f_r0 <= 0.5
    double radius_decay = 0.93;          // f_r in (0,1); quality preset
    double cost_exponent = 2.0;          // q of the assignment cost
    double aniso_ratio = 1.0;            // radius_x = ceil(ratio * radius_y)
    bool final_pass = true;              // unfiltered assignment after the loop
    std::uint64_t seed = 1;
};

struct FlasParams {
    double initial_radius_factor = 0.5;
    double radius_decay = 0.93;
    double cost_exponent = 2.0;
    double aniso_ratio = 1.0;
    bool final_pass = true;
    int candidates = 9; // n_c
    std::uint64_t seed = 1;
};

struct SsmParams {
    int iterations_per_level = 24; // L
    int start_block = 4;
    std::uint64_t seed = 1;
};

struct SomParams {
    double alpha0 = 0.6;
    double alpha_decay = 0.92;
    double initial_radius_factor = 0.5; // radius = max(W,H) * factor
    double radius_decay = 0.89;
    int epochs = 30;
    bool filtered = false; // replace blending with copy + box filter
    std::uint64_t seed = 1;
};

/// Applies the named parameter preset ("fast" or "quality") to the radius
/// decay of LAS/FLAS-style params.
template <typename Params>
inline void apply_preset(Params& p, const std::string& preset) {
    if (preset == "fast")
        p.radius_decay = 0.6;
    else if (preset == "quality")
        p.radius_decay = 0.93;
    else
        throw invalid_input("unknown preset: " + preset);
}

namespace detail {

struct Placement {
    std::vector<Cell> cell_of; // by dataset index
    std::vector<int> index_of; // by cell index, -1 when empty

    int& at(const GridSpec& spec, Cell c) { return index_of[spec.cell_index(c)]; }

    void move(const GridSpec& spec, std::size_t item, Cell to) {
        index_of[spec.cell_index(cell_of[item])] = -1;
        cell_of[item] = to;
        index_of[spec.cell_index(to)] = static_cast<int>(item);
    }
};

inline Placement random_placement(const Dataset& ds, const GridSpec& spec,
                                  RandomSource& rng) {
    if (spec.active_count() != ds.size())
        throw invalid_input("sorter: N mismatch: dataset size " +
                            std::to_string(ds.size()) + " vs " +
                            std::to_string(spec.active_count()) +
                            " active cells");
    Placement p;
    p.cell_of.assign(ds.size(), Cell{});
    p.index_of.assign(static_cast<std::size_t>(spec.width()) * spec.height(), -1);

    std::vector<std::uint8_t> item_pinned(ds.size(), 0);
    for (const Pin& pin : spec.pins()) {
        if (pin.index < 0 || static_cast<std::size_t>(pin.index) >= ds.size())
            throw invalid_input("sorter: pin index out of range");
        p.cell_of[pin.index] = pin.cell;
        p.index_of[spec.cell_index(pin.cell)] = pin.index;
        item_pinned[pin.index] = 1;
    }
    std::vector<std::size_t> items;
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (!item_pinned[i]) items.push_back(i);
    std::vector<Cell> cells;
    for (const Cell c : spec.active_cells())
        if (p.index_of[spec.cell_index(c)] < 0) cells.push_back(c);
    rng.shuffle(items);
    for (std::size_t t = 0; t < items.size(); ++t) {
        p.cell_of[items[t]] = cells[t];
        p.index_of[spec.cell_index(cells[t])] = static_cast<int>(items[t]);
    }
    return p;
}

inline void copy_inputs_to_map(const Placement& p, const Dataset& ds,
                               const GridSpec& spec, MapState& map) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto v = ds.vec(i);
        double* dst = map.vec(p.cell_of[i].col, p.cell_of[i].row);
        std::copy(v.begin(), v.end(), dst);
    }
}

inline FilterSpec make_filter_spec(int base_radius, double aniso_ratio,
                                   const GridSpec& spec) {
    FilterSpec fs;
    fs.radius_y = base_radius;
    fs.radius_x = static_cast<int>(std::ceil(aniso_ratio * base_radius));
    fs.border = spec.wrap();
    if (fs.border == WrapMode::torus) {
        fs.radius_x = std::min(fs.radius_x, spec.width() - 1);
        fs.radius_y = std::min(fs.radius_y, spec.height() - 1);
    }
    return fs;
}

inline void set_pin_weights(const GridSpec& spec, MapState& map) {
    if (!spec.has_pins()) return;
    std::vector<double>& w = map.weights();
    std::fill(w.begin(), w.end(), 1.0);
    for (const Pin& pin : spec.pins()) w[spec.cell_index(pin.cell)] = pin.weight;
}

inline MapState filtered_map(const Placement& p, const Dataset& ds,
                             const GridSpec& spec, MapState& map,
                             const FilterSpec& fs,
                             const std::vector<std::size_t>* fill_table) {
    copy_inputs_to_map(p, ds, spec, map);
    if (fill_table) {
        MapState filled = fill_inactive(map, *fill_table);
        return spec.has_pins() ? weighted_box_filter(filled, fs)
                               : box_filter(filled, fs);
    }
    return spec.has_pins() ? weighted_box_filter(map, fs) : box_filter(map, fs);
}

// Globally reassigns all unpinned items against the map with one LAP solve.
inline void global_assignment(Placement& p, const Dataset& ds,
                              const GridSpec& spec, const MapState& map,
                              double q, const std::vector<std::size_t>& free_items,
                              const std::vector<Cell>& free_cells) {
    std::vector<std::span<const double>> inputs, slots;
    inputs.reserve(free_items.size());
    slots.reserve(free_cells.size());
    for (const std::size_t i : free_items) inputs.push_back(ds.vec(i));
    for (const Cell c : free_cells) slots.push_back(map.vec_span(c.col, c.row));
    const LapResult lap = solve_lap(build_cost_matrix(inputs, slots, q));
    for (std::size_t a = 0; a < free_items.size(); ++a) {
        const Cell to = free_cells[lap.row_to_col[a]];
        p.cell_of[free_items[a]] = to;
        p.index_of[spec.cell_index(to)] = static_cast<int>(free_items[a]);
    }
}

inline std::vector<std::size_t> unpinned_items(const Dataset& ds,
                                               const GridSpec& spec) {
    std::vector<std::uint8_t> pinned(ds.size(), 0);
    for (const Pin& pin : spec.pins()) pinned[pin.index] = 1;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (!pinned[i]) out.push_back(i);
    return out;
}

inline std::vector<Cell> unpinned_cells(const GridSpec& spec) {
    std::vector<Cell> out;
    for (const Cell c : spec.active_cells())
        if (!spec.pinned_cell(c)) out.push_back(c);
    return out;
}

inline void check_radius_params(double f_r0, double f_r) {
    if (!(f_r0 > 0.0) || f_r0 > 0.5)
        throw invalid_input("sorter: initial radius factor must be in (0, 0.5]");
    if (!(f_r > 0.0) || !(f_r < 1.0))
        throw invalid_input("sorter: radius decay must be in (0, 1)");
}

} // namespace detail

/// Uniformly random arrangement honoring pins; the baseline every sorter
/// must beat.
inline Arrangement random_sort(const Dataset& ds, const GridSpec& spec,
                               std::uint64_t seed) {
    RandomSource rng(seed);
    detail::Placement p = detail::random_placement(ds, spec, rng);
    return Arrangement(spec.width(), spec.height(), std::move(p.cell_of));
}

/// Linear Assignment Sorting: alternate filtering the map at a decaying
/// radius with a globally optimal reassignment of every input vector.
inline Arrangement las_sort(const Dataset& ds, const GridSpec& spec,
                            const LasParams& params = {}) {
    detail::check_radius_params(params.initial_radius_factor, params.radius_decay);
    if (params.aniso_ratio < 1.0)
        throw invalid_input("las_sort: aniso ratio must be >= 1");

    RandomSource rng(params.seed);
    detail::Placement p = detail::random_placement(ds, spec, rng);

    MapState map(spec.width(), spec.height(), ds.dim());
    detail::set_pin_weights(spec, map);
    std::vector<std::size_t> fill_table;
    const bool masked = !spec.full();
    if (masked) fill_table = nearest_active_table(spec);

    const std::vector<std::size_t> free_items = detail::unpinned_items(ds, spec);
    const std::vector<Cell> free_cells = detail::unpinned_cells(spec);

    double r = std::max(spec.width(), spec.height()) * params.initial_radius_factor;
    while (static_cast<int>(r) >= 1 && !free_items.empty()) {
        const FilterSpec fs = detail::make_filter_spec(static_cast<int>(r),
                                                       params.aniso_ratio, spec);
        const MapState filtered = detail::filtered_map(
            p, ds, spec, map, fs, masked ? &fill_table : nullptr);
        detail::global_assignment(p, ds, spec, filtered, params.cost_exponent,
                                  free_items, free_cells);
        r *= params.radius_decay;
    }
    if (params.final_pass && !free_items.empty()) {
        detail::copy_inputs_to_map(p, ds, spec, map);
        detail::global_assignment(p, ds, spec, map, params.cost_exponent,
                                  free_items, free_cells);
    }
    return Arrangement(spec.width(), spec.height(), std::move(p.cell_of));
}

namespace detail {

// Active unpinned cells within euclidean grid distance <= radius of seed,
// seed excluded.
inline std::vector<Cell> cells_in_disc(const GridSpec& spec, Cell seed,
                                       double radius) {
    const int ri = static_cast<int>(radius);
    const double r2 = radius * radius;
    std::vector<Cell> out;
    const bool torus = spec.wrap() == WrapMode::torus;
    int x_lo = seed.col - ri, x_hi = seed.col + ri;
    int y_lo = seed.row - ri, y_hi = seed.row + ri;
    if (torus) {
        if (2 * ri + 1 >= spec.width()) {
            x_lo = 0;
            x_hi = spec.width() - 1;
        }
        if (2 * ri + 1 >= spec.height()) {
            y_lo = 0;
            y_hi = spec.height() - 1;
        }
    } else {
        x_lo = std::max(x_lo, 0);
        x_hi = std::min(x_hi, spec.width() - 1);
        y_lo = std::max(y_lo, 0);
        y_hi = std::min(y_hi, spec.height() - 1);
    }
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            Cell c{x, y};
            if (torus)
                c = {(x % spec.width() + spec.width()) % spec.width(),
                     (y % spec.height() + spec.height()) % spec.height()};
            if (c == seed) continue;
            if (!spec.active(c) || spec.pinned_cell(c)) continue;
            if (static_cast<double>(grid_distance_sq(seed, c, spec.width(),
                                                     spec.height(), spec.wrap())) >
                r2)
                continue;
            out.push_back(c);
        }
    }
    return out;
}

// One round of local exchanges: ceil(N / n_c) seeds, each swapping the n_c
// cells of its candidate set optimally against the filtered map.
inline void exchange_round(Placement& p, const Dataset& ds, const GridSpec& spec,
                           const MapState& filtered, const FlasParams& params,
                           double cand_radius, RandomSource& rng,
                           const std::vector<Cell>& seed_pool) {
    const std::size_t rounds =
        (ds.size() + params.candidates - 1) / params.candidates;
    std::vector<Cell> cands;
    std::vector<std::size_t> items;
    std::vector<std::span<const double>> inputs, slots;
    for (std::size_t e = 0; e < rounds; ++e) {
        const Cell seed = seed_pool[rng.uniform_index(seed_pool.size())];
        std::vector<Cell> disc = cells_in_disc(spec, seed, cand_radius);
        const std::size_t want =
            std::min<std::size_t>(params.candidates - 1, disc.size());
        for (std::size_t t = 0; t < want; ++t)
            std::swap(disc[t], disc[t + rng.uniform_index(disc.size() - t)]);
        cands.assign(1, seed);
        cands.insert(cands.end(), disc.begin(), disc.begin() + want);
        if (cands.size() < 2) continue;

        items.clear();
        inputs.clear();
        slots.clear();
        for (const Cell c : cands) {
            items.push_back(static_cast<std::size_t>(p.at(spec, c)));
            inputs.push_back(ds.vec(items.back()));
            slots.push_back(filtered.vec_span(c.col, c.row));
        }
        const std::vector<int> perm =
            best_permutation_small(inputs, slots, params.cost_exponent);
        for (std::size_t a = 0; a < items.size(); ++a) {
            const Cell to = cands[perm[a]];
            p.cell_of[items[a]] = to;
            p.index_of[spec.cell_index(to)] = static_cast<int>(items[a]);
        }
    }
}

} // namespace detail

/// Fast Linear Assignment Sorting: the global solve of LAS replaced with
/// many small exchanges among random candidate sets inside the filter
/// radius.
inline Arrangement flas_sort(const Dataset& ds, const GridSpec& spec,
                             const FlasParams& params = {}) {
    detail::check_radius_params(params.initial_radius_factor, params.radius_decay);
    if (params.candidates < 2)
        throw invalid_input("flas_sort: need at least 2 swap candidates");
    if (params.aniso_ratio < 1.0)
        throw invalid_input("flas_sort: aniso ratio must be >= 1");

    RandomSource rng(params.seed);
    detail::Placement p = detail::random_placement(ds, spec, rng);

    MapState map(spec.width(), spec.height(), ds.dim());
    detail::set_pin_weights(spec, map);
    std::vector<std::size_t> fill_table;
    const bool masked = !spec.full();
    if (masked) fill_table = nearest_active_table(spec);

    const std::vector<Cell> seed_pool = detail::unpinned_cells(spec);
    const double min_radius =
        (std::sqrt(static_cast<double>(params.candidates)) - 1.0) / 2.0;

    double r = std::max(spec.width(), spec.height()) * params.initial_radius_factor;
    while (static_cast<int>(r) >= 1 && !seed_pool.empty()) {
        const FilterSpec fs = detail::make_filter_spec(static_cast<int>(r),
                                                       params.aniso_ratio, spec);
        const MapState filtered = detail::filtered_map(
            p, ds, spec, map, fs, masked ? &fill_table : nullptr);
        detail::exchange_round(p, ds, spec, filtered, params,
                               std::max(r, min_radius), rng, seed_pool);
        r *= params.radius_decay;
    }
    if (params.final_pass && !seed_pool.empty()) {
        detail::copy_inputs_to_map(p, ds, spec, map);
        if (masked) {
            const MapState filled = fill_inactive(map, fill_table);
            detail::exchange_round(p, ds, spec, filled, params, min_radius, rng,
                                   seed_pool);
        } else {
            detail::exchange_round(p, ds, spec, map, params, min_radius, rng,
                                   seed_pool);
        }
    }
    return Arrangement(spec.width(), spec.height(), std::move(p.cell_of));
}

/// Self-Sorting Map baseline: hierarchical 4-cell swaps against smoothed
/// block targets, block size halving per level.
inline Arrangement ssm_sort(const Dataset& ds, const GridSpec& spec,
                            const SsmParams& params = {}) {
    if (!spec.full() || spec.has_pins())
        throw invalid_input("ssm_sort: requires a full grid without pins");
    if (spec.wrap() != WrapMode::clamp)
        throw invalid_input("ssm_sort: torus wrap not supported");
    if (params.iterations_per_level < 1)
        throw invalid_input("ssm_sort: iterations per level must be >= 1");

    RandomSource rng(params.seed);
    detail::Placement p = detail::random_placement(ds, spec, rng);
    const int w = spec.width(), h = spec.height();
    const std::size_t d = ds.dim();

    for (int block = params.start_block; block >= 1; block /= 2) {
        for (int iter = 0; iter < params.iterations_per_level; ++iter) {
            // Alternate the partition origin so cells can migrate across
            // super-block boundaries.
            const int phase = iter % 4;
            const int ox = (phase == 1 || phase == 3) ? block : 0;
            const int oy = (phase == 2 || phase == 3) ? block : 0;
            const int bw = (w + ox + block - 1) / block;
            const int bh = (h + oy + block - 1) / block;

            // Per-block sums of the currently assigned vectors.
            std::vector<double> sums(static_cast<std::size_t>(bw) * bh * d, 0.0);
            std::vector<int> counts(static_cast<std::size_t>(bw) * bh, 0);
            for (int y = 0; y < h; ++y) {
                const int by = (y + oy) / block;
                for (int x = 0; x < w; ++x) {
                    const int bx = (x + ox) / block;
                    const std::size_t b = static_cast<std::size_t>(by) * bw + bx;
                    const auto v = ds.vec(p.index_of[static_cast<std::size_t>(y) * w + x]);
                    for (std::size_t c = 0; c < d; ++c) sums[b * d + c] += v[c];
                    ++counts[b];
                }
            }
            // Target per block: mean over the block and its adjacent blocks.
            std::vector<double> targets(sums.size(), 0.0);
            for (int by = 0; by < bh; ++by) {
                for (int bx = 0; bx < bw; ++bx) {
                    const std::size_t b = static_cast<std::size_t>(by) * bw + bx;
                    double total = 0.0;
                    for (int dy = -1; dy <= 1; ++dy) {
                        for (int dx = -1; dx <= 1; ++dx) {
                            const int nx = bx + dx, ny = by + dy;
                            if (nx < 0 || nx >= bw || ny < 0 || ny >= bh) continue;
                            const std::size_t nb =
                                static_cast<std::size_t>(ny) * bw + nx;
                            if (counts[nb] == 0) continue;
                            for (std::size_t c = 0; c < d; ++c)
                                targets[b * d + c] += sums[nb * d + c];
                            total += counts[nb];
                        }
                    }
                    if (total > 0.0)
                        for (std::size_t c = 0; c < d; ++c) targets[b * d + c] /= total;
                }
            }

            // For every relative position, swap the <= 4 cells of each 2x2
            // block group optimally against the block targets.
            std::vector<Cell> quad;
            std::vector<std::size_t> items;
            std::vector<std::span<const double>> inputs, slots;
            for (int sy = 0; sy * 2 < bh; ++sy) {
                for (int sx = 0; sx * 2 < bw; ++sx) {
                    for (int v = 0; v < block; ++v) {
                        for (int u = 0; u < block; ++u) {
                            quad.clear();
                            inputs.clear();
                            slots.clear();
                            items.clear();
                            for (int q = 0; q < 4; ++q) {
                                const int bx = sx * 2 + (q & 1);
                                const int by = sy * 2 + (q >> 1);
                                if (bx >= bw || by >= bh) continue;
                                const int x = bx * block + u - ox;
                                const int y = by * block + v - oy;
                                if (x < 0 || x >= w || y < 0 || y >= h) continue;
                                quad.push_back({x, y});
                                items.push_back(static_cast<std::size_t>(
                                    p.index_of[static_cast<std::size_t>(y) * w + x]));
                                inputs.push_back(ds.vec(items.back()));
                                slots.push_back(
                                    {targets.data() +
                                         (static_cast<std::size_t>(by) * bw + bx) * d,
                                     d});
                            }
                            if (quad.size() < 2) continue;
                            const std::vector<int> perm =
                                best_permutation_small(inputs, slots, 2.0);
                            for (std::size_t a = 0; a < quad.size(); ++a) {
                                const Cell to = quad[perm[a]];
                                p.cell_of[items[a]] = to;
                                p.index_of[spec.cell_index(to)] =
                                    static_cast<int>(items[a]);
                            }
                        }
                    }
                }
            }
        }
    }
    return Arrangement(spec.width(), spec.height(), std::move(p.cell_of));
}

/// Self-Organizing Map baseline: greedy assignment to the most similar
/// unassigned map vector with neighborhood blending, both decaying per
/// epoch. The filtered variant replaces blending with copy + box filter.
inline Arrangement som_sort(const Dataset& ds, const GridSpec& spec,
                            const SomParams& params = {}) {
    if (!spec.full() || spec.has_pins())
        throw invalid_input("som_sort: requires a full grid without pins");
    if (!(params.alpha0 > 0.0) || !(params.alpha0 < 1.0))
        throw invalid_input("som_sort: alpha must be in (0, 1)");
    if (params.epochs < 1) throw invalid_input("som_sort: epochs must be >= 1");
    if (spec.active_count() != ds.size())
        throw invalid_input("sorter: N mismatch: dataset size " +
                            std::to_string(ds.size()) + " vs " +
                            std::to_string(spec.active_count()) +
                            " active cells");

    RandomSource rng(params.seed);
    const int w = spec.width(), h = spec.height();
    const std::size_t d = ds.dim();
    const std::size_t n = ds.size();

    // Random initial map spanning the data range per dimension.
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        const auto v = ds.vec(i);
        for (std::size_t c = 0; c < d; ++c) {
            lo[c] = std::min(lo[c], v[c]);
            hi[c] = std::max(hi[c], v[c]);
        }
    }
    MapState map(w, h, d);
    for (std::size_t cell = 0; cell < static_cast<std::size_t>(w) * h; ++cell)
        for (std::size_t c = 0; c < d; ++c)
            map.raw()[cell * d + c] = lo[c] + (hi[c] - lo[c]) * rng.uniform_real();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<Cell> cell_of(n);

    double alpha = params.alpha0;
    double radius = std::max(w, h) * params.initial_radius_factor;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        rng.shuffle(order);
        std::vector<std::uint8_t> taken(static_cast<std::size_t>(w) * h, 0);
        for (const std::size_t i : order) {
            const auto x = ds.vec(i);
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_cell = 0;
            for (std::size_t cell = 0; cell < taken.size(); ++cell) {
                if (taken[cell]) continue;
                double sq = 0.0;
                const double* m = map.raw().data() + cell * d;
                for (std::size_t c = 0; c < d; ++c) {
                    const double diff = x[c] - m[c];
                    sq += diff * diff;
                }
                if (sq < best) {
                    best = sq;
                    best_cell = cell;
                }
            }
            taken[best_cell] = 1;
            const Cell at{static_cast<int>(best_cell % w),
                          static_cast<int>(best_cell / w)};
            cell_of[i] = at;
            if (!params.filtered) {
                const int ri = static_cast<int>(radius);
                const double r2 = radius * radius;
                for (int dy = -ri; dy <= ri; ++dy) {
                    const int y = at.row + dy;
                    if (y < 0 || y >= h) continue;
                    for (int dx = -ri; dx <= ri; ++dx) {
                        const int xx = at.col + dx;
                        if (xx < 0 || xx >= w) continue;
                        if (static_cast<double>(dx) * dx +
                                static_cast<double>(dy) * dy >
                            r2)
                            continue;
                        double* m = map.vec(xx, y);
                        for (std::size_t c = 0; c < d; ++c)
                            m[c] = alpha * x[c] + (1.0 - alpha) * m[c];
                    }
                }
            }
        }
        if (params.filtered) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto v = ds.vec(i);
                std::copy(v.begin(), v.end(), map.vec(cell_of[i].col, cell_of[i].row));
            }
            FilterSpec fs;
            fs.radius_x = fs.radius_y = static_cast<int>(radius);
            fs.border = WrapMode::clamp;
            map = box_filter(map, fs);
        }
        alpha *= params.alpha_decay;
        radius *= params.radius_decay;
    }
    return Arrangement(w, h, std::move(cell_of));
}

} // namespace gridsort
