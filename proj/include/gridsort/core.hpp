#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridsort {

struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct undefined_metric : std::domain_error {
    using std::domain_error::domain_error;
};

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Grid cell coordinate, (col, row) with unit spacing.
struct Cell {
    int col = 0;
    int row = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

enum class WrapMode { clamp, torus };
enum class HdMetric { euclidean, squared_euclidean };

struct DistanceConfig {
    HdMetric hd_metric = HdMetric::euclidean;
};

/// N feature vectors of equal dimension d, with optional class labels.
class Dataset {
public:
    Dataset(std::vector<std::vector<double>> rows,
            std::optional<std::vector<std::string>> labels = std::nullopt) {
        if (rows.empty())
            throw invalid_input("Dataset: need at least one vector");
        dim_ = rows.front().size();
        if (dim_ < 1)
            throw invalid_input("Dataset: vector dimension must be >= 1");
        n_ = rows.size();
        flat_.reserve(n_ * dim_);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != dim_)
                throw invalid_input("Dataset: inconsistent dimension at row " +
                                    std::to_string(i));
            flat_.insert(flat_.end(), rows[i].begin(), rows[i].end());
        }
        if (labels) {
            if (labels->size() != n_)
                throw invalid_input("Dataset: label count does not match vector count");
            labels_ = std::move(*labels);
        }
    }

    std::size_t size() const { return n_; }
    std::size_t dim() const { return dim_; }

    std::span<const double> vec(std::size_t i) const {
        return {flat_.data() + i * dim_, dim_};
    }

    bool has_labels() const { return !labels_.empty(); }
    const std::string& label(std::size_t i) const { return labels_[i]; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& flat() const { return flat_; }

private:
    std::size_t n_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> flat_;
    std::vector<std::string> labels_;
};

/// A fixed (cell -> dataset index) assignment with a filter weight used
/// while that cell's neighborhood is smoothed.
struct Pin {
    Cell cell;
    int index = 0;
    double weight = 8.0;
};

/// Grid geometry: dimensions, active-cell mask, wrap mode and pins.
class GridSpec {
public:
    GridSpec(int width, int height, WrapMode wrap = WrapMode::clamp)
        : width_(width), height_(height), wrap_(wrap) {
        if (width < 1 || height < 1)
            throw invalid_input("GridSpec: width and height must be >= 1");
        mask_.assign(static_cast<std::size_t>(width) * height, 1);
    }

    GridSpec(int width, int height, std::vector<std::uint8_t> mask,
             WrapMode wrap = WrapMode::clamp)
        : width_(width), height_(height), wrap_(wrap), mask_(std::move(mask)) {
        if (width < 1 || height < 1)
            throw invalid_input("GridSpec: width and height must be >= 1");
        if (mask_.size() != static_cast<std::size_t>(width) * height)
            throw invalid_input("GridSpec: mask size does not match grid");
        if (active_count() == 0)
            throw invalid_input("GridSpec: mask has no active cells");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    WrapMode wrap() const { return wrap_; }

    std::size_t cell_index(Cell c) const {
        return static_cast<std::size_t>(c.row) * width_ + c.col;
    }
    bool in_bounds(Cell c) const {
        return c.col >= 0 && c.col < width_ && c.row >= 0 && c.row < height_;
    }
    bool active(Cell c) const { return in_bounds(c) && mask_[cell_index(c)] != 0; }

    std::size_t active_count() const {
        return static_cast<std::size_t>(
            std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
    }

    /// Active cells in row-major order.
    std::vector<Cell> active_cells() const {
        std::vector<Cell> out;
        out.reserve(active_count());
        for (int r = 0; r < height_; ++r)
            for (int c = 0; c < width_; ++c)
                if (mask_[static_cast<std::size_t>(r) * width_ + c])
                    out.push_back({c, r});
        return out;
    }

    const std::vector<std::uint8_t>& mask() const { return mask_; }
    bool full() const { return active_count() == mask_.size(); }

    const std::vector<Pin>& pins() const { return pins_; }
    bool has_pins() const { return !pins_.empty(); }

    void set_pins(std::vector<Pin> pins) {
        for (std::size_t a = 0; a < pins.size(); ++a) {
            if (!active(pins[a].cell))
                throw invalid_input("GridSpec: pin on inactive cell");
            if (pins[a].weight <= 0.0)
                throw invalid_input("GridSpec: pin weight must be positive");
            for (std::size_t b = a + 1; b < pins.size(); ++b) {
                if (pins[a].cell == pins[b].cell)
                    throw invalid_input("GridSpec: two pins on the same cell");
                if (pins[a].index == pins[b].index)
                    throw invalid_input("GridSpec: dataset index pinned twice");
            }
        }
        pins_ = std::move(pins);
    }

    bool pinned_cell(Cell c) const {
        for (const Pin& p : pins_)
            if (p.cell == c) return true;
        return false;
    }

private:
    int width_ = 0;
    int height_ = 0;
    WrapMode wrap_ = WrapMode::clamp;
    std::vector<std::uint8_t> mask_;
    std::vector<Pin> pins_;
};

/// Bijection between dataset indices and active grid cells.
class Arrangement {
public:
    Arrangement(int width, int height, std::vector<Cell> cell_of)
        : width_(width), height_(height), cell_of_(std::move(cell_of)),
          index_of_(static_cast<std::size_t>(width) * height, -1) {
        for (std::size_t i = 0; i < cell_of_.size(); ++i) {
            const Cell c = cell_of_[i];
            if (c.col < 0 || c.col >= width_ || c.row < 0 || c.row >= height_)
                throw invalid_input("Arrangement: cell out of bounds");
            std::size_t at = static_cast<std::size_t>(c.row) * width_ + c.col;
            if (index_of_[at] != -1)
                throw invalid_input("Arrangement: two indices share a cell");
            index_of_[at] = static_cast<int>(i);
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return cell_of_.size(); }

    Cell cell_of(std::size_t index) const { return cell_of_[index]; }

    /// Dataset index at a cell, -1 when unoccupied.
    int index_at(Cell c) const {
        return index_of_[static_cast<std::size_t>(c.row) * width_ + c.col];
    }

    const std::vector<Cell>& cells() const { return cell_of_; }

    void swap_indices_at(Cell a, Cell b) {
        std::size_t ia = static_cast<std::size_t>(a.row) * width_ + a.col;
        std::size_t ib = static_cast<std::size_t>(b.row) * width_ + b.col;
        std::swap(index_of_[ia], index_of_[ib]);
        if (index_of_[ia] >= 0) cell_of_[index_of_[ia]] = a;
        if (index_of_[ib] >= 0) cell_of_[index_of_[ib]] = b;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Cell> cell_of_;
    std::vector<int> index_of_;
};

inline double hd_distance(std::span<const double> a, std::span<const double> b,
                          const DistanceConfig& cfg = {}) {
    if (a.size() != b.size())
        throw invalid_input("hd_distance: dimension mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return cfg.hd_metric == HdMetric::euclidean ? std::sqrt(sq) : sq;
}

namespace detail {

/// Squared grid distance as an exact integer; cells are unit squares.
inline std::int64_t grid_distance_sq(Cell a, Cell b, int width, int height,
                                     WrapMode wrap) {
    std::int64_t dx = std::abs(a.col - b.col);
    std::int64_t dy = std::abs(a.row - b.row);
    if (wrap == WrapMode::torus) {
        dx = std::min<std::int64_t>(dx, width - dx);
        dy = std::min<std::int64_t>(dy, height - dy);
    }
    return dx * dx + dy * dy;
}

} // namespace detail

inline double grid_distance(Cell a, Cell b, const GridSpec& spec) {
    if (!spec.active(a) || !spec.active(b))
        throw invalid_input("grid_distance: inactive cell");
    return std::sqrt(static_cast<double>(
        detail::grid_distance_sq(a, b, spec.width(), spec.height(), spec.wrap())));
}

/// Checks every Arrangement invariant; violations are data, not errors.
inline std::vector<std::string> validate(const Arrangement& arr,
                                         const GridSpec& spec,
                                         const Dataset& ds) {
    std::vector<std::string> out;
    if (arr.width() != spec.width() || arr.height() != spec.height())
        out.push_back("grid size mismatch");
    if (arr.size() != ds.size())
        out.push_back("index count does not match dataset size");
    if (spec.active_count() != ds.size())
        out.push_back("active cell count does not match dataset size");
    std::vector<std::uint8_t> seen(
        static_cast<std::size_t>(spec.width()) * spec.height(), 0);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const Cell c = arr.cell_of(i);
        if (!spec.in_bounds(c)) {
            out.push_back("index " + std::to_string(i) + " placed out of bounds");
            continue;
        }
        if (!spec.active(c))
            out.push_back("index " + std::to_string(i) + " placed on masked cell");
        if (seen[spec.cell_index(c)])
            out.push_back("not injective: duplicate cell (" + std::to_string(c.col) +
                          "," + std::to_string(c.row) + ")");
        seen[spec.cell_index(c)] = 1;
        if (arr.index_at(c) != static_cast<int>(i))
            out.push_back("index_of/cell_of disagree at index " + std::to_string(i));
    }
    for (const Pin& p : spec.pins()) {
        if (p.index < 0 || static_cast<std::size_t>(p.index) >= arr.size() ||
            !(arr.cell_of(p.index) == p.cell))
            out.push_back("pin broken at (" + std::to_string(p.cell.col) + "," +
                          std::to_string(p.cell.row) + ")");
    }
    return out;
}

/// Seeded RNG; all stochastic choices in the library flow through this so a
/// seed fully determines a run.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::size_t uniform_index(std::size_t n) {
        if (n == 0) throw invalid_input("uniform_index: empty range");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return static_cast<std::size_t>(v % n);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform_real() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[uniform_index(i)]);
    }

private:
    std::mt19937_64 gen_;
};

} // namespace gridsort
