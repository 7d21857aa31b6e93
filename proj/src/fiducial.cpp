#include "fidnav/fiducial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace fidnav {

std::string to_string(FiducialPattern p) {
    switch (p) {
        case FiducialPattern::None: return "None";
        case FiducialPattern::LeftTurn: return "LeftTurn";
        case FiducialPattern::RightTurn: return "RightTurn";
        case FiducialPattern::Terminal: return "Terminal";
        case FiducialPattern::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::vector<Blob> detect_dots(const Image& img, std::uint8_t threshold,
                              std::int64_t min_area) {
    const BinaryImage dark = binarize_fixed(img, threshold, Polarity::Dark);
    std::vector<Blob> blobs = connected_components(dark, min_area);
    std::erase_if(blobs, [&](const Blob& b) {
        return b.x_min == 0 || b.y_min == 0 || b.x_max == img.width - 1 ||
               b.y_max == img.height - 1;
    });
    return blobs;
}

namespace {

double dist(const Blob& a, const Blob& b) {
    return std::hypot(a.cx - b.cx, a.cy - b.cy);
}

bool triangle_test(const std::vector<Blob>& d) {
    const double ax = d[1].cx - d[0].cx, ay = d[1].cy - d[0].cy;
    const double bx = d[2].cx - d[0].cx, by = d[2].cy - d[0].cy;
    const double area = 0.5 * std::abs(ax * by - ay * bx);
    const double longest =
        std::max({dist(d[0], d[1]), dist(d[0], d[2]), dist(d[1], d[2])});
    if (longest <= 0.0) return false;
    return area / (longest * longest) > 0.05;
}

bool square_test(const std::vector<Blob>& d, double tol) {
    std::array<double, 6> dd;
    int k = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) dd[k++] = dist(d[i], d[j]);
    std::sort(dd.begin(), dd.end());

    const double side_mean = (dd[0] + dd[1] + dd[2] + dd[3]) / 4.0;
    const double diag_mean = (dd[4] + dd[5]) / 2.0;
    if (side_mean <= 0.0) return false;

    for (int i = 0; i < 4; ++i)
        if (std::abs(dd[i] - side_mean) > tol * side_mean) return false;
    for (int i = 4; i < 6; ++i)
        if (std::abs(dd[i] - diag_mean) > tol * diag_mean) return false;
    const double ratio = diag_mean / side_mean;
    return std::abs(ratio - std::numbers::sqrt2) <= tol * std::numbers::sqrt2;
}

}  // namespace

FiducialPattern classify_pattern(const std::vector<Blob>& dots, double tol) {
    switch (dots.size()) {
        case 0: return FiducialPattern::None;
        case 1: return FiducialPattern::LeftTurn;
        case 3:
            return triangle_test(dots) ? FiducialPattern::RightTurn
                                       : FiducialPattern::Unknown;
        case 4:
            return square_test(dots, tol) ? FiducialPattern::Terminal
                                          : FiducialPattern::Unknown;
        default: return FiducialPattern::Unknown;
    }
}

FiducialDetection detect_fiducial(const Image& img, const FiducialConfig& cfg) {
    FiducialDetection det;
    std::int64_t bright = 0;
    for (const auto p : img.pixels) bright += (p >= cfg.threshold) ? 1 : 0;
    det.board_fraction = double(bright) / double(img.pixels.size());
    if (det.board_fraction < cfg.board_min_fraction) return det;  // no board in view

    det.dots = detect_dots(img, cfg.threshold, cfg.min_dot_area);
    det.pattern = classify_pattern(det.dots, cfg.tol);
    return det;
}

}  // namespace fidnav
