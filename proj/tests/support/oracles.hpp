#pragma once

// Test-only reference implementations, kept independent of the library
// code paths they check.

#include "fidnav/imaging.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace fidnav::test {

struct OracleBlob {
    std::int64_t area = 0;
    double cx = 0.0, cy = 0.0;
    int x_min = 0, y_min = 0, x_max = 0, y_max = 0;
};

// Plain recursive-style flood fill (explicit stack) over 8-neighborhoods.
// Deliberately naive: marks visited pixels in a separate grid and grows
// 1 pixel at a time.
inline std::vector<OracleBlob> flood_fill_components(const BinaryImage& bin,
                                                     std::int64_t min_area) {
    const int w = bin.width, h = bin.height;
    std::vector<char> visited(std::size_t(w) * h, 0);
    std::vector<OracleBlob> out;

    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            if (!bin.get(sx, sy) || visited[std::size_t(sy) * w + sx]) continue;

            OracleBlob b{0, 0, 0, sx, sy, sx, sy};
            std::int64_t sum_x = 0, sum_y = 0;
            std::vector<std::pair<int, int>> todo{{sx, sy}};
            visited[std::size_t(sy) * w + sx] = 1;
            while (!todo.empty()) {
                const auto [x, y] = todo.back();
                todo.pop_back();
                b.area += 1;
                sum_x += x;
                sum_y += y;
                b.x_min = std::min(b.x_min, x);
                b.x_max = std::max(b.x_max, x);
                b.y_min = std::min(b.y_min, y);
                b.y_max = std::max(b.y_max, y);
                const int nbrs[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                        {1, 0},   {-1, 1}, {0, 1},  {1, 1}};
                for (const auto& d : nbrs) {
                    const int nx = x + d[0], ny = y + d[1];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    if (!bin.get(nx, ny) || visited[std::size_t(ny) * w + nx]) continue;
                    visited[std::size_t(ny) * w + nx] = 1;
                    todo.emplace_back(nx, ny);
                }
            }
            if (b.area >= min_area) {
                b.cx = double(sum_x) / double(b.area);
                b.cy = double(sum_y) / double(b.area);
                out.push_back(b);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const OracleBlob& a, const OracleBlob& b) {
        if (a.y_min != b.y_min) return a.y_min < b.y_min;
        return a.x_min < b.x_min;
    });
    return out;
}

}  // namespace fidnav::test
