#include "fidnav/controller.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fidnav {

namespace {

void validate(const ControllerConfig& cfg) {
    if (cfg.gains.k_offset < 0 || cfg.gains.k_gradient < 0 || cfg.gains.max_rate <= 0)
        throw std::invalid_argument("invalid steering gains");
    if (cfg.turn_rate <= 0)
        throw std::invalid_argument("turn rate must be positive");
    if (cfg.cooldown_frames < 0)
        throw std::invalid_argument("cooldown frames must be >= 0");
    if (cfg.cruise_velocity < 0)
        throw std::invalid_argument("cruise velocity must be >= 0");
}

}  // namespace

Controller::Controller(const ControllerConfig& cfg) : cfg_(cfg) { validate(cfg_); }

Controller::Controller(const SteeringGains& gains, double turn_rate, int cooldown_frames) {
    cfg_.gains = gains;
    cfg_.turn_rate = turn_rate;
    cfg_.cooldown_frames = cooldown_frames;
    validate(cfg_);
}

SteeringCommand Controller::follow_step(const Image& lower) {
    const PathEstimate est = estimate_path(extract_path_mask(lower, cfg_.path_threshold));
    return steering(est, cfg_.gains, cfg_.cruise_velocity);
}

SteeringCommand Controller::turning_step(double dt) {
    SteeringCommand cmd;
    cmd.linear_velocity = 0.0;
    cmd.angular_velocity =
        (turn_dir_ == TurnDirection::Left) ? cfg_.turn_rate : -cfg_.turn_rate;
    turned_angle_ += cfg_.turn_rate * dt;
    if (turned_angle_ >= std::numbers::pi / 2.0) {
        mode_ = ControlMode::Reacquiring;
        reacquire_elapsed_ = 0.0;
    }
    return cmd;
}

SteeringCommand Controller::step(const Image& lower, const Image& upper, double dt) {
    if (dt <= 0)
        throw std::invalid_argument("dt must be positive");

    switch (mode_) {
        case ControlMode::Stopped:
            return SteeringCommand{0.0, 0.0};

        case ControlMode::Following: {
            if (cooldown_ > 0) {
                --cooldown_;
                return follow_step(lower);
            }
            const FiducialDetection det = detect_fiducial(upper, cfg_.fiducial);
            switch (det.pattern) {
                case FiducialPattern::LeftTurn:
                case FiducialPattern::RightTurn:
                    turn_dir_ = (det.pattern == FiducialPattern::LeftTurn)
                                    ? TurnDirection::Left
                                    : TurnDirection::Right;
                    mode_ = ControlMode::Turning;
                    turned_angle_ = 0.0;
                    cooldown_ = cfg_.cooldown_frames;
                    return turning_step(dt);
                case FiducialPattern::Terminal:
                    ++terminals_seen_;
                    if (terminals_seen_ >= 2) {
                        mode_ = ControlMode::Stopped;  // destination reached
                        return SteeringCommand{0.0, 0.0};
                    }
                    cooldown_ = cfg_.cooldown_frames;  // start board: arm and continue
                    return follow_step(lower);
                default:  // Unknown or None: keep tracking the strip
                    return follow_step(lower);
            }
        }

        case ControlMode::Turning:
            return turning_step(dt);

        case ControlMode::Reacquiring: {
            const PathEstimate est =
                estimate_path(extract_path_mask(lower, cfg_.path_threshold));
            if (est.valid && std::abs(est.offset) < cfg_.reacquire_offset_tol) {
                mode_ = ControlMode::Following;
                return steering(est, cfg_.gains, cfg_.cruise_velocity);
            }
            reacquire_elapsed_ += dt;
            if (reacquire_elapsed_ > cfg_.reacquire_timeout) {
                mode_ = ControlMode::Stopped;
                lost_path_ = true;
                return SteeringCommand{0.0, 0.0};
            }
            SteeringCommand cmd;
            cmd.angular_velocity = (turn_dir_ == TurnDirection::Left)
                                       ? cfg_.turn_rate
                                       : -cfg_.turn_rate;
            return cmd;
        }
    }
    return SteeringCommand{0.0, 0.0};
}

}  // namespace fidnav
