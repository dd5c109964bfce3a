#pragma once

#include "core.hpp"

#include <limits>
#include <utility>

namespace gridsort {

/// Dense square assignment costs: costs(i, j) is the cost of giving input i
/// the slot j.
class CostMatrix {
public:
    explicit CostMatrix(std::size_t n) : n_(n), costs_(n * n, 0.0) {
        if (n < 1) throw invalid_input("CostMatrix: size must be >= 1");
    }

    explicit CostMatrix(const std::vector<std::vector<double>>& rows)
        : CostMatrix(rows.size()) {
        for (std::size_t i = 0; i < n_; ++i) {
            if (rows[i].size() != n_)
                throw invalid_input("CostMatrix: input is not square");
            for (std::size_t j = 0; j < n_; ++j) at(i, j) = rows[i][j];
        }
    }

    std::size_t size() const { return n_; }
    double& at(std::size_t i, std::size_t j) { return costs_[i * n_ + j]; }
    double at(std::size_t i, std::size_t j) const { return costs_[i * n_ + j]; }
    const double* row(std::size_t i) const { return costs_.data() + i * n_; }

private:
    std::size_t n_;
    std::vector<double> costs_;
};

struct LapResult {
    std::vector<int> row_to_col;
    double cost = 0.0;
};

/// Exact minimum-cost bijection via the Jonker-Volgenant algorithm:
/// column reduction, reduction transfer, two augmenting-row-reduction sweeps,
/// then shortest augmenting paths for the remaining free rows. O(n^3).
inline LapResult solve_lap(const CostMatrix& m) {
    const int n = static_cast<int>(m.size());
    for (std::size_t k = 0; k < m.size() * m.size(); ++k) {
        const double c = m.row(0)[k];
        if (!std::isfinite(c) || c < 0.0)
            throw invalid_input("solve_lap: costs must be finite and nonnegative");
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<int> row_to_col(n, -1);
    std::vector<int> col_to_row(n, -1);
    std::vector<double> price(n, 0.0); // column duals; only ever decrease

    // Column reduction, reverse column order.
    std::vector<int> matches(n, 0);
    for (int j = n - 1; j >= 0; --j) {
        double vmin = m.at(0, j);
        int imin = 0;
        for (int i = 1; i < n; ++i) {
            if (m.at(i, j) < vmin) {
                vmin = m.at(i, j);
                imin = i;
            }
        }
        price[j] = vmin;
        if (++matches[imin] == 1) {
            row_to_col[imin] = j;
            col_to_row[j] = imin;
        }
    }

    // Reduction transfer for rows that won exactly one column.
    std::vector<int> free_rows;
    free_rows.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (matches[i] == 0) {
            free_rows.push_back(i);
        } else if (matches[i] == 1 && n > 1) {
            const int j1 = row_to_col[i];
            double slack = kInf;
            for (int j = 0; j < n; ++j)
                if (j != j1) slack = std::min(slack, m.at(i, j) - price[j]);
            price[j1] -= slack;
        }
    }

    // Augmenting row reduction, two sweeps. The immediate-retry path is
    // capped so degenerate float ties cannot stall; leftover rows are
    // handled exactly by the augmentation phase below.
    for (int sweep = 0; sweep < 2 && !free_rows.empty(); ++sweep) {
        std::vector<int> postponed;
        std::size_t k = 0;
        int retries = 0;
        const int retry_cap = 4 * n;
        while (k < free_rows.size()) {
            const int i = free_rows[k++];
            double umin = m.at(i, 0) - price[0];
            double usub = kInf;
            int j1 = 0, j2 = -1;
            for (int j = 1; j < n; ++j) {
                const double h = m.at(i, j) - price[j];
                if (h < usub) {
                    if (h >= umin) {
                        usub = h;
                        j2 = j;
                    } else {
                        usub = umin;
                        j2 = j1;
                        umin = h;
                        j1 = j;
                    }
                }
            }
            int displaced = col_to_row[j1];
            if (umin < usub) {
                price[j1] -= usub - umin;
            } else if (displaced >= 0 && j2 >= 0) {
                j1 = j2;
                displaced = col_to_row[j1];
            }
            row_to_col[i] = j1;
            col_to_row[j1] = i;
            if (displaced >= 0) {
                if (umin < usub && retries < retry_cap) {
                    free_rows[--k] = displaced;
                    ++retries;
                } else {
                    postponed.push_back(displaced);
                }
            }
        }
        free_rows = std::move(postponed);
    }

    // Shortest augmenting path for each remaining free row.
    std::vector<double> dist(n);
    std::vector<int> pred(n);
    std::vector<int> cols(n);
    for (const int f : free_rows) {
        for (int j = 0; j < n; ++j) {
            dist[j] = m.at(f, j) - price[j];
            pred[j] = f;
            cols[j] = j;
        }
        int low = 0, up = 0, last = -1;
        int endofpath = -1;
        double min_d = 0.0;
        bool found = false;
        while (!found) {
            if (up == low) {
                // Re-partition: gather all columns at the current minimum.
                last = low - 1;
                min_d = dist[cols[up]];
                up = low + 1;
                for (int t = up; t < n; ++t) {
                    const int j = cols[t];
                    const double h = dist[j];
                    if (h <= min_d) {
                        if (h < min_d) {
                            up = low;
                            min_d = h;
                        }
                        cols[t] = cols[up];
                        cols[up++] = j;
                    }
                }
                for (int t = low; t < up; ++t) {
                    if (col_to_row[cols[t]] < 0) {
                        endofpath = cols[t];
                        found = true;
                        break;
                    }
                }
            }
            if (!found) {
                const int j1 = cols[low++];
                const int i = col_to_row[j1];
                const double h = m.at(i, j1) - price[j1] - min_d;
                for (int t = up; t < n; ++t) {
                    const int j = cols[t];
                    const double v2 = m.at(i, j) - price[j] - h;
                    if (v2 < dist[j]) {
                        pred[j] = i;
                        if (v2 == min_d) {
                            if (col_to_row[j] < 0) {
                                endofpath = j;
                                found = true;
                                break;
                            }
                            cols[t] = cols[up];
                            cols[up++] = j;
                        }
                        dist[j] = v2;
                    }
                }
            }
        }
        for (int t = 0; t <= last; ++t) {
            const int j = cols[t];
            price[j] += dist[j] - min_d;
        }
        int j = endofpath;
        while (true) {
            const int i = pred[j];
            col_to_row[j] = i;
            std::swap(row_to_col[i], j);
            if (i == f) break;
        }
    }

    LapResult res;
    res.row_to_col = std::move(row_to_col);
    for (int i = 0; i < n; ++i) res.cost += m.at(i, res.row_to_col[i]);
    return res;
}

/// costs[i][j] = ||inputs[i] - slots[j]||^q. q = 2 skips the square root.
inline CostMatrix build_cost_matrix(const std::vector<std::span<const double>>& inputs,
                                    const std::vector<std::span<const double>>& slots,
                                    double q = 2.0) {
    if (inputs.size() != slots.size())
        throw invalid_input("build_cost_matrix: input and slot counts differ");
    if (inputs.empty())
        throw invalid_input("build_cost_matrix: empty input");
    if (!(q > 0.0))
        throw invalid_input("build_cost_matrix: exponent must be positive");
    const std::size_t d = inputs.front().size();
    CostMatrix m(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i].size() != d)
            throw invalid_input("build_cost_matrix: input dimension mismatch");
        for (std::size_t j = 0; j < slots.size(); ++j) {
            if (slots[j].size() != d)
                throw invalid_input("build_cost_matrix: slot dimension mismatch");
            double sq = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double diff = inputs[i][k] - slots[j][k];
                sq += diff * diff;
            }
            m.at(i, j) = q == 2.0 ? sq : std::pow(sq, q * 0.5);
        }
    }
    return m;
}

namespace detail {

inline double permutation_cost(const CostMatrix& m, const std::vector<int>& perm) {
    double c = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) c += m.at(i, perm[i]);
    return c;
}

} // namespace detail

/// Exact optimum for small candidate sets (SSM quads, FLAS exchanges).
/// Up to 5 elements the lexicographic scan keeps the lexicographically
/// smallest optimal permutation; larger sets go through solve_lap.
inline std::vector<int> best_permutation_small(
    const std::vector<std::span<const double>>& inputs,
    const std::vector<std::span<const double>>& targets, double q = 2.0) {
    const CostMatrix m = build_cost_matrix(inputs, targets, q);
    const std::size_t n = inputs.size();
    if (n > 5) return solve_lap(m).row_to_col;

    std::vector<int> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
    std::vector<int> best = perm;
    double best_cost = detail::permutation_cost(m, perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
        const double c = detail::permutation_cost(m, perm);
        if (c < best_cost) {
            best_cost = c;
            best = perm;
        }
    }
    return best;
}

} // namespace gridsort
