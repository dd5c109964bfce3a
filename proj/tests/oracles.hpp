#pragma once

// Independent naive reference implementations used only to cross-check the
// library. Straight double loops, no shared machinery with the fast paths.

#include <gridsort/gridsort.hpp>

#include <cassert>

namespace oracle {

using namespace gridsort;

// ------------------------------------------------------------------ LAP

inline std::pair<std::vector<int>, double> brute_force_lap(const CostMatrix& m) {
    const std::size_t n = m.size();
    std::vector<int> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
    std::vector<int> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += m.at(i, perm[i]);
        if (c < best_cost) {
            best_cost = c;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {best, best_cost};
}

// --------------------------------------------------------------- filtering

inline MapState naive_box_filter(const MapState& map, const FilterSpec& spec,
                                 bool weighted) {
    const int w = map.width(), h = map.height();
    const std::size_t d = map.dim();
    MapState out(w, h, d);
    std::vector<double> acc(d);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::fill(acc.begin(), acc.end(), 0.0);
            double wsum = 0.0;
            for (int dy = -spec.radius_y; dy <= spec.radius_y; ++dy) {
                for (int dx = -spec.radius_x; dx <= spec.radius_x; ++dx) {
                    int xx = x + dx, yy = y + dy;
                    if (spec.border == WrapMode::clamp) {
                        if (xx < 0 || xx >= w || yy < 0 || yy >= h) continue;
                    } else {
                        xx = ((xx % w) + w) % w;
                        yy = ((yy % h) + h) % h;
                    }
                    const std::size_t cell =
                        static_cast<std::size_t>(yy) * w + xx;
                    const double weight = weighted ? map.weights()[cell] : 1.0;
                    for (std::size_t c = 0; c < d; ++c)
                        acc[c] += weight * map.raw()[cell * d + c];
                    wsum += weight;
                }
            }
            for (std::size_t c = 0; c < d; ++c)
                out.vec(x, y)[c] = acc[c] / wsum;
        }
    }
    return out;
}

// ----------------------------------------------------------------- metrics

inline double pnorm(const std::vector<double>& v, double p) {
    if (p == std::numeric_limits<double>::infinity()) {
        double m = 0.0;
        for (const double x : v) m = std::max(m, std::fabs(x));
        return m;
    }
    double s = 0.0;
    for (const double x : v) s += std::pow(std::fabs(x), p);
    return std::pow(s, 1.0 / p);
}

inline double lam(const Arrangement& arr, const GridSpec& spec, WrapMode wrap,
                  std::size_t i, std::size_t j) {
    const Cell a = arr.cell_of(i), b = arr.cell_of(j);
    double dx = std::fabs(static_cast<double>(a.col - b.col));
    double dy = std::fabs(static_cast<double>(a.row - b.row));
    if (wrap == WrapMode::torus) {
        dx = std::min(dx, spec.width() - dx);
        dy = std::min(dy, spec.height() - dy);
    }
    return std::sqrt(dx * dx + dy * dy);
}

inline double del(const Dataset& ds, const DistanceConfig& cfg, std::size_t i,
                  std::size_t j) {
    double sq = 0.0;
    for (std::size_t c = 0; c < ds.dim(); ++c) {
        const double diff = ds.vec(i)[c] - ds.vec(j)[c];
        sq += diff * diff;
    }
    return cfg.hd_metric == HdMetric::euclidean ? std::sqrt(sq) : sq;
}

// Fractional k-neighborhood membership of each candidate given its distance:
// 1 below the k-th order statistic, (k - #below)/#tied at it, 0 above.
inline std::vector<double> tie_weights(const std::vector<double>& dist,
                                       std::size_t k) {
    std::vector<double> sorted = dist;
    std::sort(sorted.begin(), sorted.end());
    const double thr = sorted[k - 1];
    std::size_t below = 0, tied = 0;
    for (const double v : dist) {
        if (v < thr) ++below;
        if (v == thr) ++tied;
    }
    std::vector<double> w(dist.size(), 0.0);
    for (std::size_t j = 0; j < dist.size(); ++j) {
        if (dist[j] < thr)
            w[j] = 1.0;
        else if (dist[j] == thr)
            w[j] = static_cast<double>(k - below) / static_cast<double>(tied);
    }
    return w;
}

inline std::vector<double> naive_np_curve(const Arrangement& arr,
                                          const Dataset& ds, const GridSpec& spec,
                                          WrapMode wrap = WrapMode::clamp,
                                          const DistanceConfig& cfg = {}) {
    const std::size_t n = ds.size();
    const std::size_t K = n - 1;
    std::vector<double> curve(K, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> dhd, d2d;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            dhd.push_back(del(ds, cfg, i, j));
            d2d.push_back(lam(arr, spec, wrap, i, j));
        }
        for (std::size_t k = 1; k <= K; ++k) {
            const std::vector<double> whd = tie_weights(dhd, k);
            const std::vector<double> w2d = tie_weights(d2d, k);
            double overlap = 0.0;
            for (std::size_t t = 0; t < whd.size(); ++t)
                overlap += std::min(whd[t], w2d[t]);
            curve[k - 1] += overlap / static_cast<double>(k);
        }
    }
    for (double& v : curve) v /= static_cast<double>(n);
    return curve;
}

inline double naive_npq(const Arrangement& arr, const Dataset& ds,
                        const GridSpec& spec, double p,
                        WrapMode wrap = WrapMode::clamp,
                        const DistanceConfig& cfg = {}) {
    const std::size_t K = ds.size() - 1;
    if (K == 0) return 1.0;
    const std::vector<double> np = naive_np_curve(arr, ds, spec, wrap, cfg);
    std::vector<double> g2(K), gh(K);
    for (std::size_t k = 1; k <= K; ++k) {
        const double expect = static_cast<double>(k) / static_cast<double>(K);
        g2[k - 1] = std::max(np[k - 1] - expect, 0.0);
        gh[k - 1] = 1.0 - expect;
    }
    return pnorm(g2, p) / pnorm(gh, p);
}

inline double naive_dpq(const Arrangement& arr, const Dataset& ds,
                        const GridSpec& spec, double p, TieMode tie,
                        WrapMode wrap = WrapMode::clamp,
                        const DistanceConfig& cfg = {}) {
    const std::size_t n = ds.size();
    const std::size_t K = n - 1;
    if (K == 0) return 1.0;

    std::vector<double> hd_sum(K, 0.0), td_sum(K, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        struct Other {
            double lam2;
            double delta;
            std::size_t j;
        };
        std::vector<Other> others;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double l = lam(arr, spec, wrap, i, j);
            others.push_back({l, del(ds, cfg, i, j), j});
            total += others.back().delta;
        }
        std::vector<double> hd;
        for (const Other& o : others) hd.push_back(o.delta);
        std::sort(hd.begin(), hd.end());
        double run = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            run += hd[k];
            hd_sum[k] += run;
        }

        std::sort(others.begin(), others.end(), [](const Other& a, const Other& b) {
            if (a.lam2 != b.lam2) return a.lam2 < b.lam2;
            if (a.delta != b.delta) return a.delta < b.delta;
            return a.j < b.j;
        });
        run = 0.0;
        if (tie == TieMode::sorted) {
            for (std::size_t k = 0; k < K; ++k) {
                run += others[k].delta;
                td_sum[k] += run;
            }
        } else {
            std::size_t t = 0;
            while (t < K) {
                std::size_t u = t;
                double ring = 0.0;
                while (u < K && others[u].lam2 == others[t].lam2)
                    ring += others[u++].delta;
                const double mean = ring / static_cast<double>(u - t);
                for (std::size_t v = t; v < u; ++v) {
                    run += mean;
                    td_sum[v] += run;
                }
                t = u;
            }
        }
    }

    const double mean_d = total / (static_cast<double>(n) * static_cast<double>(K));
    if (mean_d == 0.0) return 1.0;
    std::vector<double> g2(K), gh(K);
    for (std::size_t k = 1; k <= K; ++k) {
        const double kn = static_cast<double>(k) * static_cast<double>(n);
        gh[k - 1] = (mean_d - hd_sum[k - 1] / kn) / mean_d;
        g2[k - 1] = std::max((mean_d - td_sum[k - 1] / kn) / mean_d, 0.0);
    }
    const double denom = pnorm(gh, p);
    if (denom == 0.0) return 1.0;
    return pnorm(g2, p) / denom;
}

inline double naive_energy(const Arrangement& arr, const Dataset& ds,
                           const GridSpec& spec, double p,
                           WrapMode wrap = WrapMode::clamp,
                           const DistanceConfig& cfg = {}) {
    const std::size_t n = ds.size();
    if (n == 1) return 1.0;
    std::vector<double> hd, td;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            hd.push_back(i == j ? 0.0 : del(ds, cfg, i, j));
            td.push_back(i == j ? 0.0 : lam(arr, spec, wrap, i, j));
        }
    double denom = 0.0;
    for (const double l : td) denom += std::pow(l, p);
    if (denom == 0.0) return 1.0;

    const auto g = [&](double c) {
        double acc = 0.0;
        for (std::size_t t = 0; t < hd.size(); ++t)
            acc += std::pow(std::fabs(c * hd[t] - td[t]), p);
        return acc;
    };

    double hi = 0.0;
    for (std::size_t t = 0; t < hd.size(); ++t)
        if (hd[t] > 0.0) hi = std::max(hi, td[t] / hd[t]);
    double c_best = 0.0;
    if (hi > 0.0) {
        // coarse grid scan, then golden-section refinement around the best
        const int steps = 4096;
        double best_val = g(0.0);
        for (int s = 1; s <= steps; ++s) {
            const double c = hi * s / steps;
            const double v = g(c);
            if (v < best_val) {
                best_val = v;
                c_best = c;
            }
        }
        double lo = std::max(0.0, c_best - hi / steps);
        double up = std::min(hi, c_best + hi / steps);
        for (int it = 0; it < 200; ++it) {
            const double m1 = lo + (up - lo) / 3.0;
            const double m2 = up - (up - lo) / 3.0;
            if (g(m1) <= g(m2))
                up = m2;
            else
                lo = m1;
        }
        c_best = 0.5 * (lo + up);
    }
    return 1.0 - std::pow(g(c_best) / denom, 1.0 / p);
}

inline double naive_cc(const Arrangement& arr, const Dataset& ds,
                       const GridSpec& spec, WrapMode wrap = WrapMode::clamp,
                       const DistanceConfig& cfg = {}) {
    const std::size_t n = ds.size();
    std::vector<double> hd, td;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            hd.push_back(i == j ? 0.0 : del(ds, cfg, i, j));
            td.push_back(i == j ? 0.0 : lam(arr, spec, wrap, i, j));
        }
    const double m = static_cast<double>(hd.size());
    double mh = 0.0, mt = 0.0;
    for (std::size_t t = 0; t < hd.size(); ++t) {
        mh += hd[t];
        mt += td[t];
    }
    mh /= m;
    mt /= m;
    double cov = 0.0, vh = 0.0, vt = 0.0;
    for (std::size_t t = 0; t < hd.size(); ++t) {
        cov += (hd[t] - mh) * (td[t] - mt);
        vh += (hd[t] - mh) * (hd[t] - mh);
        vt += (td[t] - mt) * (td[t] - mt);
    }
    return cov / std::sqrt(vh * vt);
}

// Expected AP averaged over every order of each tied ring (rings must stay
// small enough to enumerate).
inline double naive_map(const Arrangement& arr, const Dataset& ds,
                        const GridSpec& spec, WrapMode wrap = WrapMode::clamp) {
    const std::size_t n = ds.size();
    double ap_sum = 0.0;
    std::size_t queries = 0;
    for (std::size_t i = 0; i < n; ++i) {
        struct Other {
            double lam2;
            std::size_t j;
        };
        std::vector<Other> others;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) others.push_back({lam(arr, spec, wrap, i, j), j});
        std::sort(others.begin(), others.end(), [](const Other& a, const Other& b) {
            if (a.lam2 != b.lam2) return a.lam2 < b.lam2;
            return a.j < b.j;
        });
        std::size_t m_q = 0;
        for (const Other& o : others)
            if (ds.label(o.j) == ds.label(i)) ++m_q;
        if (m_q == 0) continue;

        double ap = 0.0;
        std::size_t found = 0, rank0 = 0, t = 0;
        while (t < others.size()) {
            std::size_t u = t;
            while (u < others.size() && others[u].lam2 == others[t].lam2) ++u;
            const std::size_t s = u - t;
            assert(s <= 8 && "ring too large for enumeration oracle");
            std::vector<int> rel;
            for (std::size_t v = t; v < u; ++v)
                rel.push_back(ds.label(others[v].j) == ds.label(i) ? 1 : 0);
            std::sort(rel.begin(), rel.end());
            double avg = 0.0;
            std::size_t patterns = 0;
            do {
                double contrib = 0.0;
                std::size_t in_ring = 0;
                for (std::size_t pos = 0; pos < s; ++pos) {
                    if (rel[pos]) {
                        ++in_ring;
                        contrib += static_cast<double>(found + in_ring) /
                                   static_cast<double>(rank0 + pos + 1);
                    }
                }
                avg += contrib;
                ++patterns;
            } while (std::next_permutation(rel.begin(), rel.end()));
            ap += avg / static_cast<double>(patterns);
            for (const int r : rel) found += r;
            rank0 += s;
            t = u;
        }
        ap_sum += ap / static_cast<double>(m_q);
        ++queries;
    }
    return ap_sum / static_cast<double>(queries);
}

} // namespace oracle
