#pragma once

#include "fidnav/imaging.hpp"

namespace fidnav {

/// Strip position in the lower-camera frame. offset is the centroid
/// displacement of the near-field strip from the vertical centerline,
/// normalized to [-1, 1] (positive = strip right of center). gradient is
/// the signed angle in radians of the strip axis from image vertical
/// (positive = strip leans right going up the image). When valid is
/// false both values are zero.
struct PathEstimate {
    double offset = 0.0;
    double gradient = 0.0;
    bool valid = false;
};

struct SteeringGains {
    double k_offset = 1.0;    // angular rate per unit offset
    double k_gradient = 1.5;  // angular rate per radian of gradient
    double max_rate = 1.2;    // |omega| cap, rad/s
};

/// angular_velocity is positive for a left (counterclockwise) turn.
struct SteeringCommand {
    double linear_velocity = 0.0;
    double angular_velocity = 0.0;
};

/// Bright-threshold the frame and keep only the largest bright component.
BinaryImage extract_path_mask(const Image& img, std::uint8_t threshold);

/// Offset from the bottom 25% of rows, gradient from a least-squares line
/// fit x = a*y + b over per-row foreground centroids. Invalid when the
/// bottom band holds fewer than 5 foreground pixels or fewer than 3 rows
/// have any foreground.
PathEstimate estimate_path(const BinaryImage& mask);

/// omega = clamp(-(k_offset*offset + k_gradient*gradient), +-max_rate),
/// v = cruise_velocity. A lost strip (invalid estimate) stops the robot.
SteeringCommand steering(const PathEstimate& est, const SteeringGains& gains,
                         double cruise_velocity);

}  // namespace fidnav
