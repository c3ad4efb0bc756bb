#pragma once

// Independent brute-force oracles used only by tests. These deliberately
// avoid the library's algorithms: Bellman-Ford relaxation instead of
// Dijkstra, exhaustive alignment enumeration instead of the DTW recurrence,
// and per-cell segment intersection instead of DDA ray marching.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "midnav/geometry.hpp"
#include "midnav/scene.hpp"

namespace midnav::testing {

// Relaxes every 8-connected edge (same no-corner-cutting rule as the
// implementation) until a full pass changes nothing.
inline std::vector<double> bellman_ford_field(const TraversabilityGrid& grid,
                                              int source_ix, int source_iy) {
    const double inf = std::numeric_limits<double>::infinity();
    const int w = grid.width;
    const int h = grid.height;
    std::vector<double> dist(static_cast<std::size_t>(w) * h, inf);
    if (grid.is_blocked(source_ix, source_iy)) return dist;
    dist[static_cast<std::size_t>(source_iy) * w + source_ix] = 0.0;

    const double straight = grid.cell_size;
    const double diagonal = grid.cell_size * std::sqrt(2.0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int cy = 0; cy < h; ++cy) {
            for (int cx = 0; cx < w; ++cx) {
                const double d = dist[static_cast<std::size_t>(cy) * w + cx];
                if (d == inf || grid.is_blocked(cx, cy)) continue;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = cx + dx;
                        const int ny = cy + dy;
                        if (!grid.in_bounds(nx, ny) || grid.is_blocked(nx, ny))
                            continue;
                        const bool diag = dx != 0 && dy != 0;
                        if (diag && (grid.is_blocked(cx + dx, cy) ||
                                     grid.is_blocked(cx, cy + dy)))
                            continue;
                        const double nd = d + (diag ? diagonal : straight);
                        double& slot =
                            dist[static_cast<std::size_t>(ny) * w + nx];
                        if (nd < slot) {
                            slot = nd;
                            changed = true;
                        }
                    }
                }
            }
        }
    }
    return dist;
}

// Exhaustive minimum over all monotone alignments between a and b.
inline double brute_force_dtw(const std::vector<Vec2>& a,
                              const std::vector<Vec2>& b) {
    const double inf = std::numeric_limits<double>::infinity();
    struct Rec {
        const std::vector<Vec2>& a;
        const std::vector<Vec2>& b;
        double best = std::numeric_limits<double>::infinity();
        void go(std::size_t i, std::size_t j, double cost) {
            cost += distance(a[i], b[j]);
            if (cost >= best) return;
            if (i == a.size() - 1 && j == b.size() - 1) {
                best = cost;
                return;
            }
            if (i + 1 < a.size()) go(i + 1, j, cost);
            if (j + 1 < b.size()) go(i, j + 1, cost);
            if (i + 1 < a.size() && j + 1 < b.size()) go(i + 1, j + 1, cost);
        }
    } rec{a, b};
    if (a.empty() || b.empty()) return inf;
    rec.go(0, 0, 0.0);
    return rec.best;
}

// First crossing of an occupied column by the 2D segment from `origin` along
// `dir` (unit), via entry-interval intersection with every occupied cell.
inline double brute_force_first_hit(const Scene& scene, Vec2 origin, Vec2 dir,
                                    double max_range) {
    double best = std::numeric_limits<double>::infinity();
    for (int iy = 0; iy < scene.height; ++iy) {
        for (int ix = 0; ix < scene.width; ++ix) {
            if (!scene.is_occupied(ix, iy)) continue;
            const double x0 = ix * scene.cell_size;
            const double x1 = (ix + 1) * scene.cell_size;
            const double y0 = iy * scene.cell_size;
            const double y1 = (iy + 1) * scene.cell_size;

            double t_entry = 0.0;
            double t_exit = max_range;
            bool miss = false;
            const double o[2] = {origin.x, origin.y};
            const double d[2] = {dir.x, dir.y};
            const double lo[2] = {x0, y0};
            const double hi[2] = {x1, y1};
            for (int axis = 0; axis < 2 && !miss; ++axis) {
                if (std::abs(d[axis]) < 1e-15) {
                    if (o[axis] < lo[axis] || o[axis] > hi[axis]) miss = true;
                    continue;
                }
                double ta = (lo[axis] - o[axis]) / d[axis];
                double tb = (hi[axis] - o[axis]) / d[axis];
                if (ta > tb) std::swap(ta, tb);
                t_entry = std::max(t_entry, ta);
                t_exit = std::min(t_exit, tb);
                if (t_entry > t_exit) miss = true;
            }
            if (!miss && t_entry > 1e-12) best = std::min(best, t_entry);
        }
    }
    return best;
}

}  // namespace midnav::testing
