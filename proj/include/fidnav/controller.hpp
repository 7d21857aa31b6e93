#pragma once

#include "fidnav/fiducial.hpp"
#include "fidnav/imaging.hpp"
#include "fidnav/path_tracker.hpp"

namespace fidnav {

enum class ControlMode { Following, Turning, Reacquiring, Stopped };
enum class TurnDirection { Left, Right };

struct ControllerConfig {
    SteeringGains gains{};
    double cruise_velocity = 0.2;   // m/s while following
    double turn_rate = 1.0;         // rad/s during turn maneuvers
    int cooldown_frames = 30;       // fiducial scan holdoff after an event
    std::uint8_t path_threshold = 128;
    FiducialConfig fiducial{};
    double reacquire_offset_tol = 0.3;  // |offset| accepted when rejoining the strip
    double reacquire_timeout = 5.0;     // seconds of searching before giving up
};

/// Navigation state machine: follow the strip, consume fiducial events,
/// execute open-loop 90 degree turns, stop at the second terminal board
/// (the first terminal is the start board). step() is the only mutator
/// and must be called serially per instance.
class Controller {
public:
    explicit Controller(const ControllerConfig& cfg = {});
    Controller(const SteeringGains& gains, double turn_rate, int cooldown_frames = 30);

    /// Consume one frame pair and emit the drive command for this tick.
    SteeringCommand step(const Image& lower, const Image& upper, double dt);

    ControlMode mode() const { return mode_; }
    int terminals_seen() const { return terminals_seen_; }
    int cooldown_remaining() const { return cooldown_; }
    bool lost_path() const { return lost_path_; }
    TurnDirection turn_direction() const { return turn_dir_; }
    double turned_angle() const { return turned_angle_; }
    const ControllerConfig& config() const { return cfg_; }

private:
    SteeringCommand follow_step(const Image& lower);
    SteeringCommand turning_step(double dt);

    ControllerConfig cfg_;
    ControlMode mode_ = ControlMode::Following;
    TurnDirection turn_dir_ = TurnDirection::Left;
    double turned_angle_ = 0.0;
    double reacquire_elapsed_ = 0.0;
    int terminals_seen_ = 0;
    int cooldown_ = 0;
    bool lost_path_ = false;
};

}  // namespace fidnav
