#include "fidnav/sim.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace fidnav {

namespace {

constexpr double kPi = std::numbers::pi;

void validate_world(const World& w) {
    if (w.path.size() < 2)
        throw WorldConfigError("path needs at least 2 waypoints");
    if (w.strip_width <= 0)
        throw WorldConfigError("strip_width must be positive");
    if (int(w.strip_intensity) <= int(w.floor_intensity) + 50)
        throw WorldConfigError(
            "strip_intensity must exceed floor_intensity by more than 50");
    if (w.noise_sigma < 0)
        throw WorldConfigError("noise_sigma must be >= 0");
    for (const auto& b : w.boards)
        if (b.trigger_distance <= 0)
            throw WorldConfigError("board trigger_m must be positive");
}

std::uint8_t add_noise(std::uint8_t base, double sigma, Rng& rng) {
    const double v = base + sigma * rng.gaussian();
    return std::uint8_t(std::clamp<long>(std::lround(v), 0, 255));
}

void apply_noise(Image& img, double sigma, Rng& rng) {
    if (sigma <= 0) return;
    for (auto& p : img.pixels) p = add_noise(p, sigma, rng);
}

double segment_distance(double x, double y, const std::array<double, 2>& a,
                        const std::array<double, 2>& b) {
    const double ux = b[0] - a[0], uy = b[1] - a[1];
    const double len2 = ux * ux + uy * uy;
    double t = 0.0;
    if (len2 > 0.0)
        t = std::clamp(((x - a[0]) * ux + (y - a[1]) * uy) / len2, 0.0, 1.0);
    const double px = a[0] + t * ux, py = a[1] + t * uy;
    return std::hypot(x - px, y - py);
}

}  // namespace

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi)
        a += 2.0 * kPi;
    else if (a > kPi)
        a -= 2.0 * kPi;
    return a;
}

double distance_to_polyline(double x, double y,
                            std::span<const std::array<double, 2>> path) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        best = std::min(best, segment_distance(x, y, path[i], path[i + 1]));
    return best;
}

Pose2D advance(const Pose2D& pose, const SteeringCommand& cmd, double dt) {
    if (dt <= 0)
        throw std::invalid_argument("dt must be positive");
    Pose2D next;
    next.heading = wrap_angle(pose.heading + cmd.angular_velocity * dt);
    next.x = pose.x + cmd.linear_velocity * std::cos(next.heading) * dt;
    next.y = pose.y + cmd.linear_velocity * std::sin(next.heading) * dt;
    return next;
}

Image render_lower(const World& world, const Pose2D& pose, const LowerCamera& cam,
                   Rng& rng) {
    Image img(cam.px_w, cam.px_h);
    const double ch = std::cos(pose.heading), sh = std::sin(pose.heading);
    const double half_strip = world.strip_width / 2.0;
    const std::span<const std::array<double, 2>> path{world.path};

    for (int py = 0; py < cam.px_h; ++py) {
        // Row 0 is the far edge of the view (image up = robot forward).
        const double v = (py + 0.5) / cam.px_h;
        const double fwd = (0.5 - v) * cam.view_height_m + cam.forward_offset_m;
        for (int px = 0; px < cam.px_w; ++px) {
            const double u = (px + 0.5) / cam.px_w;
            const double right = (u - 0.5) * cam.view_width_m;
            const double wx = pose.x + fwd * ch + right * sh;
            const double wy = pose.y + fwd * sh - right * ch;
            const bool on_strip = distance_to_polyline(wx, wy, path) <= half_strip;
            img.at(px, py) = on_strip ? world.strip_intensity : world.floor_intensity;
        }
    }
    apply_noise(img, world.noise_sigma, rng);
    return img;
}

Image render_board_face(FiducialPattern pattern, int px_w, int px_h, double rotation,
                        double pattern_radius_px, double dot_radius_px,
                        std::uint8_t bright, std::uint8_t dark) {
    Image img(px_w, px_h, bright);

    std::vector<std::array<double, 2>> centers;
    const double cx = (px_w - 1) / 2.0, cy = (px_h - 1) / 2.0;
    auto place = [&](double angle) {
        centers.push_back({cx + pattern_radius_px * std::cos(angle + rotation),
                           cy + pattern_radius_px * std::sin(angle + rotation)});
    };
    switch (pattern) {
        case FiducialPattern::LeftTurn:
            centers.push_back({cx, cy});
            break;
        case FiducialPattern::RightTurn:
            // Equilateral triangle, one vertex up (image y grows downward).
            place(-kPi / 2.0);
            place(-kPi / 2.0 + 2.0 * kPi / 3.0);
            place(-kPi / 2.0 + 4.0 * kPi / 3.0);
            break;
        case FiducialPattern::Terminal:
            // Corners at 45 degree diagonals: sides axis-aligned at rotation 0.
            for (int k = 0; k < 4; ++k) place(kPi / 4.0 + k * kPi / 2.0);
            break;
        default:
            break;  // None/Unknown render as a blank board
    }

    const double r2 = dot_radius_px * dot_radius_px;
    for (const auto& c : centers) {
        const int x0 = std::max(0, int(std::floor(c[0] - dot_radius_px)) - 1);
        const int x1 = std::min(px_w - 1, int(std::ceil(c[0] + dot_radius_px)) + 1);
        const int y0 = std::max(0, int(std::floor(c[1] - dot_radius_px)) - 1);
        const int y1 = std::min(px_h - 1, int(std::ceil(c[1] + dot_radius_px)) + 1);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double dx = x - c[0], dy = y - c[1];
                if (dx * dx + dy * dy <= r2) img.at(x, y) = dark;
            }
        }
    }
    return img;
}

Image render_upper(const World& world, const Pose2D& pose, const UpperCamera& cam,
                   Rng& rng) {
    const Board* best = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& b : world.boards) {
        const double d = std::hypot(b.x - pose.x, b.y - pose.y);
        if (d > b.trigger_distance || d <= 1e-9) continue;
        const double bearing = std::atan2(b.y - pose.y, b.x - pose.x);
        if (std::abs(wrap_angle(bearing - pose.heading)) > kPi / 6.0) continue;
        if (d < best_dist) {
            best_dist = d;
            best = &b;
        }
    }

    Image img(cam.px_w, cam.px_h, world.floor_intensity);
    if (best != nullptr) {
        const double view_angle = wrap_angle(pose.heading + kPi - best->facing);
        const double side = std::min(cam.px_w, cam.px_h);
        img = render_board_face(best->pattern, cam.px_w, cam.px_h, view_angle,
                                0.30 * side, 0.06 * cam.px_w,
                                world.strip_intensity, world.floor_intensity);
    }
    apply_noise(img, world.noise_sigma, rng);
    return img;
}

World default_world() {
    World w;
    w.path = {{0.0, 0.0}, {3.0, 0.0}, {3.0, -3.0}, {6.0, -3.0}};
    w.strip_width = 0.1;
    w.floor_intensity = 30;
    w.strip_intensity = 230;
    w.noise_sigma = 4.0;
    w.seed = 42;
    w.boards = {
        {0.3, 0.0, kPi, FiducialPattern::Terminal, 0.5},        // start board
        {3.5, 0.0, kPi, FiducialPattern::RightTurn, 0.5},       // corner 1
        {3.0, -3.5, kPi / 2.0, FiducialPattern::LeftTurn, 0.5}, // corner 2
        {6.5, -3.0, kPi, FiducialPattern::Terminal, 0.5},       // destination
    };
    return w;
}

namespace {

FiducialPattern pattern_from_config(const std::string& s) {
    if (s == "left") return FiducialPattern::LeftTurn;
    if (s == "right") return FiducialPattern::RightTurn;
    if (s == "terminal") return FiducialPattern::Terminal;
    throw WorldConfigError("boards[].pattern must be \"left\", \"right\" or \"terminal\"");
}

std::string pattern_to_config(FiducialPattern p) {
    switch (p) {
        case FiducialPattern::LeftTurn: return "left";
        case FiducialPattern::RightTurn: return "right";
        case FiducialPattern::Terminal: return "terminal";
        default: throw WorldConfigError("board pattern must be left, right or terminal");
    }
}

template <typename T>
T get_key(const nlohmann::json& j, const char* key) {
    if (!j.contains(key))
        throw WorldConfigError(std::string("missing key: ") + key);
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw WorldConfigError(std::string("invalid value for key: ") + key);
    }
}

}  // namespace

World world_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw WorldConfigError(std::string("invalid JSON: ") + e.what());
    }

    World w;
    w.path.clear();
    for (const auto& p : get_key<std::vector<std::vector<double>>>(j, "path")) {
        if (p.size() != 2)
            throw WorldConfigError("invalid value for key: path (waypoints are [x,y])");
        w.path.push_back({p[0], p[1]});
    }
    w.strip_width = get_key<double>(j, "strip_width");

    w.boards.clear();
    if (!j.contains("boards"))
        throw WorldConfigError("missing key: boards");
    for (const auto& jb : j.at("boards")) {
        Board b;
        const auto pos = get_key<std::vector<double>>(jb, "pos");
        if (pos.size() != 2)
            throw WorldConfigError("invalid value for key: pos (expected [x,y])");
        b.x = pos[0];
        b.y = pos[1];
        b.facing = get_key<double>(jb, "facing_rad");
        b.pattern = pattern_from_config(get_key<std::string>(jb, "pattern"));
        b.trigger_distance = get_key<double>(jb, "trigger_m");
        w.boards.push_back(b);
    }

    const int floor_i = get_key<int>(j, "floor_intensity");
    const int strip_i = get_key<int>(j, "strip_intensity");
    if (floor_i < 0 || floor_i > 255)
        throw WorldConfigError("invalid value for key: floor_intensity");
    if (strip_i < 0 || strip_i > 255)
        throw WorldConfigError("invalid value for key: strip_intensity");
    w.floor_intensity = std::uint8_t(floor_i);
    w.strip_intensity = std::uint8_t(strip_i);
    w.noise_sigma = get_key<double>(j, "noise_sigma");
    w.seed = get_key<std::uint64_t>(j, "seed");

    validate_world(w);
    return w;
}

World load_world_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open world file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return world_from_json(ss.str());
}

std::string world_to_json(const World& w) {
    nlohmann::json j;
    j["path"] = w.path;
    j["strip_width"] = w.strip_width;
    j["boards"] = nlohmann::json::array();
    for (const auto& b : w.boards) {
        j["boards"].push_back({{"pos", {b.x, b.y}},
                               {"facing_rad", b.facing},
                               {"pattern", pattern_to_config(b.pattern)},
                               {"trigger_m", b.trigger_distance}});
    }
    j["floor_intensity"] = int(w.floor_intensity);
    j["strip_intensity"] = int(w.strip_intensity);
    j["noise_sigma"] = w.noise_sigma;
    j["seed"] = w.seed;
    return j.dump(2) + "\n";
}

std::string to_string(EpisodeOutcome o) {
    switch (o) {
        case EpisodeOutcome::ReachedDestination: return "ReachedDestination";
        case EpisodeOutcome::LostPath: return "LostPath";
        case EpisodeOutcome::Timeout: return "Timeout";
    }
    return "Timeout";
}

EpisodeReport run_episode(const World& world, const EpisodeOptions& opts) {
    validate_world(world);
    if (opts.max_steps < 1)
        throw std::invalid_argument("max_steps must be >= 1");

    Pose2D pose{world.path[0][0], world.path[0][1], 0.0};
    pose.heading = std::atan2(world.path[1][1] - world.path[0][1],
                              world.path[1][0] - world.path[0][0]);

    Rng rng(world.seed);
    Controller ctrl(opts.controller);
    const std::span<const std::array<double, 2>> path{world.path};

    EpisodeReport report;
    report.trajectory.reserve(std::size_t(opts.max_steps));

    for (int step = 0; step < opts.max_steps; ++step) {
        const Image lower = render_lower(world, pose, opts.lower_cam, rng);
        const Image upper = render_upper(world, pose, opts.upper_cam, rng);
        if (opts.frame_sink) opts.frame_sink(step, lower, upper);

        report.trajectory.push_back(pose);
        report.max_cross_track_error = std::max(
            report.max_cross_track_error, distance_to_polyline(pose.x, pose.y, path));

        const SteeringCommand cmd = ctrl.step(lower, upper, opts.dt);
        report.steps = step + 1;
        if (ctrl.mode() == ControlMode::Stopped) {
            report.outcome = ctrl.lost_path() ? EpisodeOutcome::LostPath
                                              : EpisodeOutcome::ReachedDestination;
            report.final_pose = pose;
            return report;
        }
        pose = advance(pose, cmd, opts.dt);
    }

    report.outcome = EpisodeOutcome::Timeout;
    report.final_pose = pose;
    return report;
}

std::string episode_report_json(const EpisodeReport& report) {
    nlohmann::json j;
    j["outcome"] = to_string(report.outcome);
    j["steps"] = report.steps;
    j["final_pose"] = {{"x", report.final_pose.x},
                       {"y", report.final_pose.y},
                       {"heading", report.final_pose.heading}};
    j["max_cross_track_error"] = report.max_cross_track_error;
    return j.dump(2) + "\n";
}

}  // namespace fidnav
