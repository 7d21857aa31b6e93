#include "fidnav/path_tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fidnav {

BinaryImage extract_path_mask(const Image& img, std::uint8_t threshold) {
    BinaryImage bright = binarize_fixed(img, threshold, Polarity::Bright);
    ComponentLabels cl = label_components(bright, 1);
    BinaryImage out(img.width, img.height);
    if (cl.blobs.empty()) return out;

    int best = 0;
    for (int i = 1; i < int(cl.blobs.size()); ++i)
        if (cl.blobs[i].area > cl.blobs[best].area) best = i;
    const int keep = cl.blobs[best].label;
    for (std::size_t i = 0; i < out.mask.size(); ++i)
        out.mask[i] = (cl.labels[i] == keep) ? 1 : 0;
    return out;
}

PathEstimate estimate_path(const BinaryImage& mask) {
    const int w = mask.width, h = mask.height;

    const int band_rows = std::max(1, h / 4);
    const int band_y0 = h - band_rows;

    std::int64_t band_count = 0, band_sum_x = 0;
    int fg_rows = 0;
    // Accumulators for the line fit x = a*y + b over per-row centroids.
    double sy = 0, sx = 0, syy = 0, sxy = 0;

    for (int y = 0; y < h; ++y) {
        std::int64_t row_count = 0, row_sum_x = 0;
        for (int x = 0; x < w; ++x) {
            if (!mask.get(x, y)) continue;
            ++row_count;
            row_sum_x += x;
        }
        if (row_count == 0) continue;
        ++fg_rows;
        const double cx = double(row_sum_x) / double(row_count);
        sy += y;
        sx += cx;
        syy += double(y) * y;
        sxy += double(y) * cx;
        if (y >= band_y0) {
            band_count += row_count;
            band_sum_x += row_sum_x;
        }
    }

    if (band_count < 5 || fg_rows < 3) return PathEstimate{};

    PathEstimate est;
    est.valid = true;

    const double half = (w - 1) / 2.0;
    const double mean_x = double(band_sum_x) / double(band_count);
    est.offset = (half > 0.0) ? (mean_x - half) / half : 0.0;

    const double n = fg_rows;
    const double denom = n * syy - sy * sy;  // > 0: rows are distinct and n >= 3
    const double a = (n * sxy - sy * sx) / denom;
    // Image y grows downward, so a strip leaning right going up the image
    // has negative dx/dy; flip the sign to make that case positive.
    est.gradient = std::atan(-a);
    return est;
}

SteeringCommand steering(const PathEstimate& est, const SteeringGains& gains,
                         double cruise_velocity) {
    if (gains.k_offset < 0 || gains.k_gradient < 0 || gains.max_rate <= 0)
        throw std::invalid_argument("invalid steering gains");
    if (cruise_velocity < 0)
        throw std::invalid_argument("cruise velocity must be >= 0");

    if (!est.valid) return SteeringCommand{0.0, 0.0};

    const double raw = -(gains.k_offset * est.offset + gains.k_gradient * est.gradient);
    SteeringCommand cmd;
    cmd.linear_velocity = cruise_velocity;
    cmd.angular_velocity = std::clamp(raw, -gains.max_rate, gains.max_rate);
    return cmd;
}

}  // namespace fidnav
