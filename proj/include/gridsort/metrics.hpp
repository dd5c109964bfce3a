#pragma once

#include "core.hpp"

#include <atomic>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <thread>

namespace gridsort {

enum class TieMode { sorted, mean };

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

namespace detail {

inline double pow_abs(double x, double p) {
    x = std::fabs(x);
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    double ip;
    if (std::modf(p, &ip) == 0.0 && ip >= 1.0 && ip <= 64.0) {
        double acc = 1.0, base = x;
        auto e = static_cast<unsigned>(ip);
        while (e > 0) {
            if (e & 1u) acc *= base;
            base *= base;
            e >>= 1u;
        }
        return acc;
    }
    return std::pow(x, p);
}

inline unsigned metric_threads() {
    if (const char* env = std::getenv("GRIDSORT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<unsigned>(std::min(v, 64L));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : std::min(hw, 8u);
}

// Runs fn(chunk, begin, end) over fixed 64-item chunks. Chunk boundaries do
// not depend on the thread count and every partial result lands in its own
// chunk slot, so reductions done in chunk order are bitwise deterministic.
template <typename Fn>
inline void for_chunks(std::size_t n, Fn&& fn) {
    constexpr std::size_t kChunk = 64;
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    const unsigned threads =
        static_cast<unsigned>(std::min<std::size_t>(metric_threads(), chunks));
    if (threads <= 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            fn(c, c * kChunk, std::min(n, (c + 1) * kChunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1))
            fn(c, c * kChunk, std::min(n, (c + 1) * kChunk));
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

// Per-item neighbor view: HD distances to every other item plus the other
// items ordered for the HD and the grid side. The grid order sorts by
// (squared grid distance, HD distance, index), which already realizes the
// "sorted" tie mode and is invariant under grid isometries.
struct ItemNeighbors {
    std::vector<double> delta;
    std::vector<int> hd_order;
    std::vector<int> td_order;
    std::vector<std::int64_t> td_d2;
};

inline void build_item_neighbors(std::size_t i, const Dataset& ds,
                                 const Arrangement& arr, const GridSpec& spec,
                                 WrapMode wrap, const DistanceConfig& cfg,
                                 ItemNeighbors& nb) {
    const std::size_t n = ds.size();
    nb.delta.resize(n);
    const auto xi = ds.vec(i);
    for (std::size_t j = 0; j < n; ++j)
        nb.delta[j] = j == i ? 0.0 : hd_distance(xi, ds.vec(j), cfg);

    nb.hd_order.clear();
    nb.td_order.clear();
    for (std::size_t j = 0; j < n; ++j)
        if (j != i) nb.hd_order.push_back(static_cast<int>(j));
    nb.td_order = nb.hd_order;

    std::sort(nb.hd_order.begin(), nb.hd_order.end(), [&](int a, int b) {
        if (nb.delta[a] != nb.delta[b]) return nb.delta[a] < nb.delta[b];
        return a < b;
    });

    const Cell ci = arr.cell_of(i);
    std::vector<std::int64_t> d2(n, 0);
    for (std::size_t j = 0; j < n; ++j)
        if (j != i)
            d2[j] = grid_distance_sq(ci, arr.cell_of(j), spec.width(),
                                     spec.height(), wrap);
    std::sort(nb.td_order.begin(), nb.td_order.end(), [&](int a, int b) {
        if (d2[a] != d2[b]) return d2[a] < d2[b];
        if (nb.delta[a] != nb.delta[b]) return nb.delta[a] < nb.delta[b];
        return a < b;
    });
    nb.td_d2.resize(nb.td_order.size());
    for (std::size_t t = 0; t < nb.td_order.size(); ++t)
        nb.td_d2[t] = d2[nb.td_order[t]];
}

struct NpScratch {
    std::vector<int> hd_ring_of;
    std::vector<int> td_ring_of;
    std::vector<std::size_t> hd_start;
    std::vector<std::size_t> td_start;
};

// Expected k-neighborhood overlap for every k, with ties on either side
// resolved fractionally and consistently: a ring of size s cut after t
// members weights each member t/s, and the overlap of item j counts
// min(hd weight, grid weight). A perfect embedding therefore scores 1 for
// every k even though its boundary rings are tied on both sides.
inline void np_item(const ItemNeighbors& nb, std::size_t n, NpScratch& s,
                    std::vector<double>& curve) {
    const std::size_t K = nb.hd_order.size();
    if (K == 0) return;

    s.hd_ring_of.assign(n, -1);
    s.td_ring_of.assign(n, -1);
    s.hd_start.clear();
    s.td_start.clear();

    for (std::size_t t = 0; t < K; ++t) {
        if (t == 0 ||
            nb.delta[nb.hd_order[t]] != nb.delta[nb.hd_order[t - 1]])
            s.hd_start.push_back(t);
        s.hd_ring_of[nb.hd_order[t]] = static_cast<int>(s.hd_start.size()) - 1;
    }
    s.hd_start.push_back(K);
    for (std::size_t t = 0; t < K; ++t) {
        if (t == 0 || nb.td_d2[t] != nb.td_d2[t - 1]) s.td_start.push_back(t);
        s.td_ring_of[nb.td_order[t]] = static_cast<int>(s.td_start.size()) - 1;
    }
    s.td_start.push_back(K);

    int r = 0, q = 0;
    std::size_t t_hd = 0, t_td = 0;
    std::size_t full_both = 0, row_pre = 0, col_pre = 0, inter = 0;

    const auto scan_hd_ring = [&](int ring) {
        col_pre = 0;
        inter = 0;
        for (std::size_t t = s.hd_start[ring]; t < s.hd_start[ring + 1]; ++t) {
            const int j = nb.hd_order[t];
            if (s.td_ring_of[j] < q)
                ++col_pre;
            else if (s.td_ring_of[j] == q)
                ++inter;
        }
    };
    const auto scan_td_ring = [&](int ring, bool with_inter) {
        row_pre = 0;
        if (with_inter) inter = 0;
        for (std::size_t t = s.td_start[ring]; t < s.td_start[ring + 1]; ++t) {
            const int j = nb.td_order[t];
            if (s.hd_ring_of[j] < r)
                ++row_pre;
            else if (with_inter && s.hd_ring_of[j] == r)
                ++inter;
        }
    };

    scan_hd_ring(0); // also sets inter for (A_0, B_0); row_pre starts 0

    const int hd_rings = static_cast<int>(s.hd_start.size()) - 1;
    const int td_rings = static_cast<int>(s.td_start.size()) - 1;

    for (std::size_t k = 1; k <= K; ++k) {
        ++t_hd;
        ++t_td;
        const std::size_t a = s.hd_start[r + 1] - s.hd_start[r];
        const std::size_t b = s.td_start[q + 1] - s.td_start[q];
        const double alpha = static_cast<double>(t_hd) / static_cast<double>(a);
        const double beta = static_cast<double>(t_td) / static_cast<double>(b);
        const double overlap = static_cast<double>(full_both) +
                               beta * static_cast<double>(row_pre) +
                               alpha * static_cast<double>(col_pre) +
                               std::min(alpha, beta) * static_cast<double>(inter);
        curve[k - 1] += overlap / static_cast<double>(k);

        const bool hd_done = t_hd == a;
        const bool td_done = t_td == b;
        if (hd_done && td_done) {
            full_both += col_pre + row_pre + inter;
            ++r;
            ++q;
            t_hd = t_td = 0;
            if (r < hd_rings && q < td_rings) {
                scan_hd_ring(r);
                scan_td_ring(q, false);
            }
        } else if (hd_done) {
            full_both += col_pre;
            row_pre += inter;
            ++r;
            t_hd = 0;
            scan_hd_ring(r);
        } else if (td_done) {
            full_both += row_pre;
            col_pre += inter;
            ++q;
            t_td = 0;
            scan_td_ring(q, true);
        }
    }
}

inline void dpq_item(const ItemNeighbors& nb, TieMode mode,
                     std::vector<double>& hd_curve,
                     std::vector<double>& td_curve) {
    const std::size_t K = nb.hd_order.size();
    double run = 0.0;
    for (std::size_t t = 0; t < K; ++t) {
        run += nb.delta[nb.hd_order[t]];
        hd_curve[t] += run;
    }
    run = 0.0;
    if (mode == TieMode::sorted) {
        for (std::size_t t = 0; t < K; ++t) {
            run += nb.delta[nb.td_order[t]];
            td_curve[t] += run;
        }
    } else {
        std::size_t t = 0;
        while (t < K) {
            std::size_t u = t;
            double ring_sum = 0.0;
            while (u < K && nb.td_d2[u] == nb.td_d2[t])
                ring_sum += nb.delta[nb.td_order[u++]];
            const double ring_mean = ring_sum / static_cast<double>(u - t);
            for (std::size_t v = t; v < u; ++v) {
                run += ring_mean;
                td_curve[v] += run;
            }
            t = u;
        }
    }
}

} // namespace detail

/// p-norm of a curve; p = infinity gives the max element.
inline double curve_norm(std::span<const double> v, double p) {
    if (!(p >= 1.0)) throw invalid_input("curve_norm: p must be >= 1");
    if (p == kInfNorm) {
        double m = 0.0;
        for (const double x : v) m = std::max(m, std::fabs(x));
        return m;
    }
    double s = 0.0;
    for (const double x : v) s += detail::pow_abs(x, p);
    return std::pow(s, 1.0 / p);
}

/// Active cells at each squared grid distance from an origin cell,
/// ascending; members in row-major order.
struct NeighborRing {
    std::int64_t dist_sq = 0;
    std::vector<Cell> members;
};

inline std::vector<NeighborRing> neighbor_rings(Cell origin, const GridSpec& spec,
                                                WrapMode wrap) {
    if (!spec.active(origin))
        throw invalid_input("neighbor_rings: inactive origin cell");
    std::vector<std::pair<std::int64_t, Cell>> flat;
    for (const Cell c : spec.active_cells()) {
        if (c == origin) continue;
        flat.emplace_back(detail::grid_distance_sq(origin, c, spec.width(),
                                                   spec.height(), wrap),
                          c);
    }
    std::sort(flat.begin(), flat.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        if (a.second.row != b.second.row) return a.second.row < b.second.row;
        return a.second.col < b.second.col;
    });
    std::vector<NeighborRing> rings;
    for (const auto& [d2, c] : flat) {
        if (rings.empty() || rings.back().dist_sq != d2)
            rings.push_back({d2, {}});
        rings.back().members.push_back(c);
    }
    return rings;
}

/// NP_k for k = 1..N-1 (Eq. of the k-neighborhood preservation index), with
/// tied grid distances handled by exact expectation.
inline std::vector<double> np_k_curve(const Arrangement& arr, const Dataset& ds,
                                      const GridSpec& spec,
                                      WrapMode wrap = WrapMode::clamp,
                                      const DistanceConfig& cfg = {}) {
    const std::size_t n = ds.size();
    const std::size_t K = n - 1;
    std::vector<double> curve(K, 0.0);
    if (K == 0) return curve;

    const std::size_t chunks = (n + 63) / 64;
    std::vector<std::vector<double>> partial(chunks);
    detail::for_chunks(n, [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
        detail::ItemNeighbors nb;
        detail::NpScratch scratch;
        auto& acc = partial[chunk];
        acc.assign(K, 0.0);
        for (std::size_t i = lo; i < hi; ++i) {
            detail::build_item_neighbors(i, ds, arr, spec, wrap, cfg, nb);
            detail::np_item(nb, n, scratch, acc);
        }
    });
    for (const auto& acc : partial)
        for (std::size_t k = 0; k < K; ++k) curve[k] += acc[k];
    for (std::size_t k = 0; k < K; ++k) curve[k] /= static_cast<double>(n);
    return curve;
}

/// Neighborhood Preservation Quality: ratio of p-norms of the gain curves.
inline double npq(const Arrangement& arr, const Dataset& ds, const GridSpec& spec,
                  double p, WrapMode wrap = WrapMode::clamp,
                  const DistanceConfig& cfg = {}) {
    const std::size_t K = ds.size() - 1;
    if (K == 0) return 1.0;
    const std::vector<double> np = np_k_curve(arr, ds, spec, wrap, cfg);
    std::vector<double> gain2d(K), gainhd(K);
    for (std::size_t k = 1; k <= K; ++k) {
        const double expect = static_cast<double>(k) / static_cast<double>(K);
        gain2d[k - 1] = std::max(np[k - 1] - expect, 0.0);
        gainhd[k - 1] = 1.0 - expect;
    }
    const double denom = curve_norm(gainhd, p);
    if (denom == 0.0) return 1.0;
    return curve_norm(gain2d, p) / denom;
}

/// Distance Preservation Quality. tie_mode sorted ranks equal-grid-distance
/// neighbors by ascending HD distance (DPQ_p); mean uses the ring average
/// (DPQ_p^-).
inline double dpq(const Arrangement& arr, const Dataset& ds, const GridSpec& spec,
                  double p, TieMode tie_mode = TieMode::sorted,
                  WrapMode wrap = WrapMode::clamp, const DistanceConfig& cfg = {}) {
    const std::size_t n = ds.size();
    const std::size_t K = n - 1;
    if (K == 0) return 1.0;

    const std::size_t chunks = (n + 63) / 64;
    std::vector<std::vector<double>> hd_part(chunks), td_part(chunks);
    detail::for_chunks(n, [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
        detail::ItemNeighbors nb;
        auto& hd = hd_part[chunk];
        auto& td = td_part[chunk];
        hd.assign(K, 0.0);
        td.assign(K, 0.0);
        for (std::size_t i = lo; i < hi; ++i) {
            detail::build_item_neighbors(i, ds, arr, spec, wrap, cfg, nb);
            detail::dpq_item(nb, tie_mode, hd, td);
        }
    });
    std::vector<double> hd_curve(K, 0.0), td_curve(K, 0.0);
    for (std::size_t c = 0; c < chunks; ++c)
        for (std::size_t k = 0; k < K; ++k) {
            hd_curve[k] += hd_part[c][k];
            td_curve[k] += td_part[c][k];
        }

    // Global mean over ordered off-diagonal pairs; identical accumulation to
    // the k = K prefix, so the final HD gain is exactly zero.
    const double mean_d =
        hd_curve[K - 1] / (static_cast<double>(K) * static_cast<double>(n));
    if (mean_d == 0.0) return 1.0;

    std::vector<double> gain2d(K), gainhd(K);
    for (std::size_t k = 1; k <= K; ++k) {
        const double kn = static_cast<double>(k) * static_cast<double>(n);
        gainhd[k - 1] = (mean_d - hd_curve[k - 1] / kn) / mean_d;
        gain2d[k - 1] = std::max((mean_d - td_curve[k - 1] / kn) / mean_d, 0.0);
    }
    const double denom = curve_norm(gainhd, p);
    if (denom == 0.0) return 1.0;
    return curve_norm(gain2d, p) / denom;
}

/// Normalized energy E'_p = 1 - min_c (sum |c*delta - lambda|^p / sum
/// lambda^p)^(1/p). p = 2 uses the closed-form scale; other p a ternary
/// search on the convex objective.
inline double energy(const Arrangement& arr, const Dataset& ds,
                     const GridSpec& spec, double p,
                     WrapMode wrap = WrapMode::clamp,
                     const DistanceConfig& cfg = {}) {
    if (!(p >= 1.0)) throw invalid_input("energy: p must be >= 1");
    const std::size_t n = ds.size();
    if (n == 1) return 1.0;

    std::vector<double> hd, td;
    hd.reserve(n * n);
    td.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = ds.vec(i);
        const Cell ci = arr.cell_of(i);
        for (std::size_t j = 0; j < n; ++j) {
            hd.push_back(i == j ? 0.0 : hd_distance(xi, ds.vec(j), cfg));
            td.push_back(std::sqrt(static_cast<double>(detail::grid_distance_sq(
                ci, arr.cell_of(j), spec.width(), spec.height(), wrap))));
        }
    }

    const bool use_max = p == kInfNorm;
    const auto misfit = [&](double c) {
        double acc = 0.0;
        for (std::size_t t = 0; t < hd.size(); ++t) {
            const double r = std::fabs(c * hd[t] - td[t]);
            if (use_max)
                acc = std::max(acc, r);
            else
                acc += detail::pow_abs(r, p);
        }
        return acc;
    };

    double denom = 0.0;
    for (const double l : td)
        denom = use_max ? std::max(denom, l) : denom + detail::pow_abs(l, p);
    if (denom == 0.0) return 1.0;

    double c_best = 0.0;
    if (p == 2.0) {
        double num = 0.0, den = 0.0;
        for (std::size_t t = 0; t < hd.size(); ++t) {
            num += hd[t] * td[t];
            den += hd[t] * hd[t];
        }
        c_best = den > 0.0 ? num / den : 0.0;
    } else {
        double hi = 0.0;
        for (std::size_t t = 0; t < hd.size(); ++t)
            if (hd[t] > 0.0) hi = std::max(hi, td[t] / hd[t]);
        if (hi > 0.0) {
            double lo = 0.0;
            for (int it = 0; it < 120; ++it) {
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                if (misfit(m1) <= misfit(m2))
                    hi = m2;
                else
                    lo = m1;
            }
            c_best = 0.5 * (lo + hi);
        }
    }

    const double e = use_max ? misfit(c_best) / denom
                             : std::pow(misfit(c_best) / denom, 1.0 / p);
    return 1.0 - e;
}

/// Pearson correlation between the N^2 pairwise grid and HD distances.
inline double cross_correlation(const Arrangement& arr, const Dataset& ds,
                                const GridSpec& spec,
                                WrapMode wrap = WrapMode::clamp,
                                const DistanceConfig& cfg = {}) {
    const std::size_t n = ds.size();
    if (n < 2) throw undefined_metric("cross_correlation: need N >= 2");

    std::vector<double> hd, td;
    hd.reserve(n * n);
    td.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = ds.vec(i);
        const Cell ci = arr.cell_of(i);
        for (std::size_t j = 0; j < n; ++j) {
            hd.push_back(i == j ? 0.0 : hd_distance(xi, ds.vec(j), cfg));
            td.push_back(std::sqrt(static_cast<double>(detail::grid_distance_sq(
                ci, arr.cell_of(j), spec.width(), spec.height(), wrap))));
        }
    }
    const double m = static_cast<double>(hd.size());
    double hd_mean = 0.0, td_mean = 0.0;
    for (std::size_t t = 0; t < hd.size(); ++t) {
        hd_mean += hd[t];
        td_mean += td[t];
    }
    hd_mean /= m;
    td_mean /= m;
    double cov = 0.0, var_hd = 0.0, var_td = 0.0;
    for (std::size_t t = 0; t < hd.size(); ++t) {
        const double dh = hd[t] - hd_mean;
        const double dt = td[t] - td_mean;
        cov += dh * dt;
        var_hd += dh * dh;
        var_td += dt * dt;
    }
    if (var_hd == 0.0 || var_td == 0.0)
        throw undefined_metric("cross_correlation: zero distance variance");
    return std::clamp(cov / std::sqrt(var_hd * var_td), -1.0, 1.0);
}

/// Mean average precision of label retrieval by grid distance, with tied
/// ranks scored as the exact expectation over tie orders. Queries whose
/// class has no other member are skipped.
inline double arrangement_map(const Arrangement& arr, const Dataset& ds,
                              const GridSpec& spec,
                              WrapMode wrap = WrapMode::clamp) {
    if (!ds.has_labels())
        throw invalid_input("arrangement_map: dataset has no labels");
    const std::size_t n = ds.size();

    double ap_sum = 0.0;
    std::size_t queries = 0;
    std::vector<std::pair<std::int64_t, int>> order;
    for (std::size_t i = 0; i < n; ++i) {
        order.clear();
        const Cell ci = arr.cell_of(i);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                order.emplace_back(
                    detail::grid_distance_sq(ci, arr.cell_of(j), spec.width(),
                                             spec.height(), wrap),
                    static_cast<int>(j));
        std::sort(order.begin(), order.end());

        std::size_t total_rel = 0;
        for (const auto& [d2, j] : order)
            if (ds.label(j) == ds.label(i)) ++total_rel;
        if (total_rel == 0) continue;

        double ap = 0.0;
        std::size_t found = 0; // relevant items before the current ring
        std::size_t rank0 = 0; // items before the current ring
        std::size_t t = 0;
        while (t < order.size()) {
            std::size_t u = t;
            std::size_t g = 0;
            while (u < order.size() && order[u].first == order[t].first) {
                if (ds.label(order[u].second) == ds.label(i)) ++g;
                ++u;
            }
            const std::size_t s = u - t;
            if (g > 0) {
                const double gs = static_cast<double>(g) / static_cast<double>(s);
                const double step =
                    s > 1 ? static_cast<double>(g - 1) / static_cast<double>(s - 1)
                          : 0.0;
                for (std::size_t pos = 1; pos <= s; ++pos) {
                    const double expect_rel_prefix =
                        static_cast<double>(found) + 1.0 +
                        static_cast<double>(pos - 1) * step;
                    ap += gs * expect_rel_prefix /
                          static_cast<double>(rank0 + pos);
                }
            }
            found += g;
            rank0 += s;
            t = u;
        }
        ap_sum += ap / static_cast<double>(total_rel);
        ++queries;
    }
    if (queries == 0)
        throw undefined_metric("arrangement_map: no query has another item of its class");
    return ap_sum / static_cast<double>(queries);
}

/// One named metric to evaluate.
struct MetricRequest {
    enum class Kind { dpq, npq, energy, cc, map, npk } kind = Kind::dpq;
    double p = 16.0;
    TieMode tie = TieMode::sorted;
    std::string token; // as requested, used as the report key
};

/// Parses tokens like "dpq16", "dpq2-", "npq2", "e1", "einf", "cc", "map",
/// "npk".
inline MetricRequest parse_metric_token(const std::string& token) {
    MetricRequest r;
    r.token = token;
    if (token == "cc") {
        r.kind = MetricRequest::Kind::cc;
        return r;
    }
    if (token == "map") {
        r.kind = MetricRequest::Kind::map;
        return r;
    }
    if (token == "npk") {
        r.kind = MetricRequest::Kind::npk;
        return r;
    }
    std::string body = token;
    if (body.starts_with("dpq")) {
        r.kind = MetricRequest::Kind::dpq;
        body = body.substr(3);
        if (!body.empty() && body.back() == '-') {
            r.tie = TieMode::mean;
            body.pop_back();
        }
    } else if (body.starts_with("npq")) {
        r.kind = MetricRequest::Kind::npq;
        body = body.substr(3);
    } else if (body.starts_with("e")) {
        r.kind = MetricRequest::Kind::energy;
        body = body.substr(1);
    } else {
        throw invalid_input("unknown metric token: " + token);
    }
    if (body == "inf") {
        r.p = kInfNorm;
        return r;
    }
    try {
        std::size_t used = 0;
        r.p = std::stod(body, &used);
        if (used != body.size() || !(r.p >= 1.0)) throw std::exception();
    } catch (...) {
        throw invalid_input("bad p value in metric token: " + token);
    }
    return r;
}

/// Named metric values for one arrangement.
struct QualityReport {
    std::vector<std::pair<std::string, double>> values;
    std::vector<double> np_curve; // filled when npk was requested
};

inline QualityReport compute_report(const Arrangement& arr, const Dataset& ds,
                                    const GridSpec& spec,
                                    const std::vector<MetricRequest>& requests,
                                    WrapMode wrap = WrapMode::clamp,
                                    const DistanceConfig& cfg = {}) {
    QualityReport rep;
    for (const MetricRequest& r : requests) {
        switch (r.kind) {
        case MetricRequest::Kind::dpq:
            rep.values.emplace_back(r.token, dpq(arr, ds, spec, r.p, r.tie, wrap, cfg));
            break;
        case MetricRequest::Kind::npq:
            rep.values.emplace_back(r.token, npq(arr, ds, spec, r.p, wrap, cfg));
            break;
        case MetricRequest::Kind::energy:
            rep.values.emplace_back(r.token, energy(arr, ds, spec, r.p, wrap, cfg));
            break;
        case MetricRequest::Kind::cc:
            rep.values.emplace_back(r.token, cross_correlation(arr, ds, spec, wrap, cfg));
            break;
        case MetricRequest::Kind::map:
            rep.values.emplace_back(r.token, arrangement_map(arr, ds, spec, wrap));
            break;
        case MetricRequest::Kind::npk:
            rep.np_curve = np_k_curve(arr, ds, spec, wrap, cfg);
            break;
        }
    }
    return rep;
}

} // namespace gridsort
