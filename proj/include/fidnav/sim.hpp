#pragma once

#include "fidnav/controller.hpp"
#include "fidnav/fiducial.hpp"
#include "fidnav/imaging.hpp"
#include "fidnav/rng.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fidnav {

struct Pose2D {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // radians in (-pi, pi], counterclockwise from +x
};

/// A marker board standing in the world. facing is the outward normal of
/// the printed face; trigger_distance is how close the robot must be for
/// the board to fill the upper camera.
struct Board {
    double x = 0.0;
    double y = 0.0;
    double facing = 0.0;
    FiducialPattern pattern = FiducialPattern::Terminal;
    double trigger_distance = 0.5;
};

/// Floor plan: a bright strip along a waypoint polyline on a dark floor,
/// with marker boards at the start, at every turn, and at the destination.
struct World {
    std::vector<std::array<double, 2>> path;
    double strip_width = 0.1;
    std::vector<Board> boards;
    std::uint8_t floor_intensity = 30;
    std::uint8_t strip_intensity = 230;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Three 3 m legs (east, south, east) with right-angle turns; terminal
/// boards at start and destination, one right-turn and one left-turn board.
/// Each board sits trigger_distance beyond its corner along the approach
/// direction so the turn fires when the robot reaches the corner.
World default_world();

class WorldConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parse the JSON world schema; errors name the offending key.
World world_from_json(const std::string& text);
World load_world_file(const std::string& path);
std::string world_to_json(const World& world);

struct LowerCamera {
    double view_width_m = 0.5;
    double view_height_m = 0.5;
    int px_w = 64;
    int px_h = 64;
    double forward_offset_m = 0.3;  // view center ahead of the robot
};

struct UpperCamera {
    int px_w = 96;
    int px_h = 96;
};

/// Orthographic top-down floor view, axis-aligned to the robot heading
/// (image up = robot forward). Strip pixels take strip_intensity, the rest
/// floor_intensity; Gaussian noise (world.noise_sigma) is added last.
Image render_lower(const World& world, const Pose2D& pose, const LowerCamera& cam,
                   Rng& rng);

/// Board face seen by the forward camera: the nearest board within its
/// trigger distance and within +-30 degrees of the robot heading fills the
/// frame (bright background, dark dots rotated by the viewing angle); with
/// no board in range the frame is all floor_intensity.
Image render_upper(const World& world, const Pose2D& pose, const UpperCamera& cam,
                   Rng& rng);

/// Canonical marker face: dot pattern inscribed in a circle of radius
/// pattern_radius_px around the frame center, rotated by `rotation`.
Image render_board_face(FiducialPattern pattern, int px_w, int px_h, double rotation,
                        double pattern_radius_px, double dot_radius_px,
                        std::uint8_t bright, std::uint8_t dark);

/// Wrap to (-pi, pi].
double wrap_angle(double a);

/// Unicycle step: heading integrates first, then position moves along the
/// new heading.
Pose2D advance(const Pose2D& pose, const SteeringCommand& cmd, double dt);

double distance_to_polyline(double x, double y,
                            std::span<const std::array<double, 2>> path);

enum class EpisodeOutcome { ReachedDestination, LostPath, Timeout };

std::string to_string(EpisodeOutcome o);

struct EpisodeReport {
    EpisodeOutcome outcome = EpisodeOutcome::Timeout;
    int steps = 0;
    Pose2D final_pose;
    double max_cross_track_error = 0.0;
    std::vector<Pose2D> trajectory;  // pose at the start of each step
};

/// Called once per step with the freshly rendered frame pair.
using FrameSink = std::function<void(int step, const Image& lower, const Image& upper)>;

struct EpisodeOptions {
    double dt = 0.05;
    int max_steps = 5000;
    ControllerConfig controller{};
    LowerCamera lower_cam{};
    UpperCamera upper_cam{};
    FrameSink frame_sink;  // optional
};

/// Closed loop render -> control -> advance, from the first waypoint,
/// until the controller stops or max_steps elapse. All randomness comes
/// from one stream seeded with world.seed.
EpisodeReport run_episode(const World& world, const EpisodeOptions& opts = {});

/// Stable JSON rendering of a report (trajectory omitted).
std::string episode_report_json(const EpisodeReport& report);

}  // namespace fidnav
