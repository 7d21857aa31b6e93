#pragma once

// Shared generators for synthetic test data: camera rigs with
// forward-projected ground truth, and rasterized strip masks.

#include "fidnav/imaging.hpp"
#include "fidnav/rng.hpp"
#include "fidnav/survey.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

namespace fidnav::test {

// Cameras spaced around a ring of the given radius, all looking at the
// origin, with pinhole intrinsics. Points near the origin project with
// positive depth in every view.
inline CameraSet make_ring_rig(int n_cams, Rng& rng, double radius = 5.0,
                               double focal = 800.0) {
    CameraSet cams;
    for (int i = 0; i < n_cams; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / n_cams +
                             rng.uniform(-0.1, 0.1);
        const Eigen::Vector3d center(radius * std::cos(theta),
                                     radius * std::sin(theta),
                                     rng.uniform(-1.0, 1.0));
        const Eigen::Vector3d zaxis = (-center).normalized();  // toward origin
        Eigen::Vector3d up(0, 0, 1);
        if (std::abs(zaxis.dot(up)) > 0.9) up = Eigen::Vector3d(0, 1, 0);
        const Eigen::Vector3d xaxis = up.cross(zaxis).normalized();
        const Eigen::Vector3d yaxis = zaxis.cross(xaxis);

        Eigen::Matrix3d rot;
        rot.row(0) = xaxis;
        rot.row(1) = yaxis;
        rot.row(2) = zaxis;

        Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
        k(0, 0) = focal;
        k(1, 1) = focal;
        k(0, 2) = 320.0;
        k(1, 2) = 240.0;

        Eigen::Matrix<double, 3, 4> p;
        p.leftCols<3>() = rot;
        p.col(3) = -rot * center;
        p = k * p;
        cams.emplace(i, CameraMatrix(p));
    }
    return cams;
}

inline Point3D random_point(Rng& rng, double extent = 1.0) {
    return Point3D{rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                   rng.uniform(-extent, extent)};
}

// Noiseless forward projections of pt in every camera of the rig.
inline std::vector<Observation> observe(const Point3D& pt, const CameraSet& cams) {
    std::vector<Observation> obs;
    for (const auto& [frame, cam] : cams) {
        const ImagePoint ip = project(cam, pt);
        obs.push_back({frame, ip.x, ip.y});
    }
    return obs;
}

// Vertical bright strip covering columns [x0, x1] on a dark background.
inline Image vertical_strip_image(int w, int h, int x0, int x1,
                                  std::uint8_t floor_v = 20,
                                  std::uint8_t strip_v = 220) {
    Image img(w, h, floor_v);
    for (int y = 0; y < h; ++y)
        for (int x = x0; x <= x1; ++x) img.at(x, y) = strip_v;
    return img;
}

// Mask of points within half_width of the line through the image center
// with direction angle measured from image vertical (positive = leaning
// right going up the image).
inline BinaryImage slanted_strip_mask(int w, int h, double angle, double half_width) {
    BinaryImage mask(w, h);
    const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
    // Direction of travel "up the image": x component sin(angle), y component
    // -cos(angle) (rows grow downward).
    const double dx = std::sin(angle), dy = -std::cos(angle);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double px = x - cx, py = y - cy;
            const double cross = px * dy - py * dx;
            mask.set(x, y, std::abs(cross) <= half_width);
        }
    }
    return mask;
}

inline BinaryImage random_mask(int w, int h, double density, Rng& rng) {
    BinaryImage mask(w, h);
    for (auto& m : mask.mask) m = rng.uniform01() < density ? 1 : 0;
    return mask;
}

}  // namespace fidnav::test
