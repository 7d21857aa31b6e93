// Command-line front end: classify marker images, trace strip frames,
// run simulated episodes, survey marker discs from observation logs.
//
// Exit codes: 0 success, 1 domain failure, 2 usage or parse error.

#include "fidnav/controller.hpp"
#include "fidnav/fiducial.hpp"
#include "fidnav/imaging.hpp"
#include "fidnav/path_tracker.hpp"
#include "fidnav/sim.hpp"
#include "fidnav/survey.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

int run_classify(const std::string& image_path, int threshold, std::int64_t min_area,
                 double tol, const std::string& expect) {
    fidnav::Image img;
    try {
        img = fidnav::load_pnm_file(image_path);
    } catch (const std::exception& e) {
        std::cerr << "classify: " << e.what() << "\n";
        return 2;
    }

    fidnav::FiducialConfig cfg;
    cfg.threshold = std::uint8_t(threshold);
    cfg.min_dot_area = min_area;
    cfg.tol = tol;
    const fidnav::FiducialDetection det = fidnav::detect_fiducial(img, cfg);

    nlohmann::json out;
    out["pattern"] = fidnav::to_string(det.pattern);
    out["dots"] = nlohmann::json::array();
    for (const auto& d : det.dots)
        out["dots"].push_back({{"cx", d.cx}, {"cy", d.cy}, {"area", d.area}});
    std::cout << out.dump() << "\n";

    if (!expect.empty() && fidnav::to_string(det.pattern) != expect) {
        std::cerr << "classify: expected " << expect << ", got "
                  << fidnav::to_string(det.pattern) << "\n";
        return 1;
    }
    return 0;
}

int run_track(const std::string& dir, const std::vector<double>& gains_kv,
              double max_rate, double cruise, int threshold) {
    std::vector<fs::path> frames;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.rfind("lower_", 0) == 0 && name.size() >= 4 &&
            name.substr(name.size() - 4) == ".pgm")
            frames.push_back(entry.path());
    }
    if (ec) {
        std::cerr << "track: cannot read directory " << dir << ": " << ec.message()
                  << "\n";
        return 2;
    }
    std::sort(frames.begin(), frames.end());
    if (frames.empty()) {
        std::cerr << "track: no lower_*.pgm frames in " << dir << "\n";
        return 1;
    }

    fidnav::SteeringGains gains;
    gains.k_offset = gains_kv[0];
    gains.k_gradient = gains_kv[1];
    gains.max_rate = max_rate;

    std::cout << "frame,offset,gradient,omega,valid\n";
    for (const auto& path : frames) {
        fidnav::Image img;
        try {
            img = fidnav::load_pnm_file(path.string());
        } catch (const std::exception& e) {
            std::cerr << "track: skipping " << path.filename().string() << ": "
                      << e.what() << "\n";
            continue;
        }
        const auto est = fidnav::estimate_path(
            fidnav::extract_path_mask(img, std::uint8_t(threshold)));
        const auto cmd = fidnav::steering(est, gains, cruise);
        if (est.valid) {
            std::cout << path.filename().string() << "," << fmt_double(est.offset)
                      << "," << fmt_double(est.gradient) << ","
                      << fmt_double(cmd.angular_velocity) << ",true\n";
        } else {
            std::cout << path.filename().string() << ",,,0,false\n";
        }
    }
    return 0;
}

int run_sim(const std::string& world_path, std::optional<std::uint64_t> seed,
            int max_steps, const std::string& dump_dir) {
    fidnav::World world;
    try {
        world = fidnav::load_world_file(world_path);
    } catch (const std::exception& e) {
        std::cerr << "sim: " << e.what() << "\n";
        return 2;
    }
    if (seed) world.seed = *seed;

    fidnav::EpisodeOptions opts;
    opts.max_steps = max_steps;
    if (!dump_dir.empty()) {
        std::error_code ec;
        fs::create_directories(dump_dir, ec);
        if (ec) {
            std::cerr << "sim: cannot create " << dump_dir << ": " << ec.message()
                      << "\n";
            return 2;
        }
        opts.frame_sink = [dump_dir](int step, const fidnav::Image& lower,
                                     const fidnav::Image& upper) {
            char name[32];
            std::snprintf(name, sizeof(name), "lower_%06d.pgm", step);
            fidnav::save_pnm_file(lower, (fs::path(dump_dir) / name).string());
            std::snprintf(name, sizeof(name), "upper_%06d.pgm", step);
            fidnav::save_pnm_file(upper, (fs::path(dump_dir) / name).string());
        };
    }

    const fidnav::EpisodeReport report = fidnav::run_episode(world, opts);
    std::cout << fidnav::episode_report_json(report);
    return report.outcome == fidnav::EpisodeOutcome::ReachedDestination ? 0 : 1;
}

int run_survey(const std::string& obs_path, const std::string& cams_path) {
    std::ifstream obs_in(obs_path);
    if (!obs_in) {
        std::cerr << "survey: cannot open " << obs_path << "\n";
        return 2;
    }
    std::ifstream cams_in(cams_path);
    if (!cams_in) {
        std::cerr << "survey: cannot open " << cams_path << "\n";
        return 2;
    }

    std::vector<fidnav::DiscRecord> records;
    fidnav::CameraSet cams;
    try {
        records = fidnav::read_observations_csv(obs_in);
        cams = fidnav::read_cameras_csv(cams_in);
    } catch (const fidnav::CsvError& e) {
        std::cerr << "survey: " << e.what() << "\n";
        return 2;
    }
    if (records.empty()) {
        std::cerr << "survey: no observations\n";
        return 1;
    }

    fidnav::SurveyResult result;
    try {
        result = fidnav::survey_markers(records, cams);
    } catch (const std::exception& e) {
        std::cerr << "survey: " << e.what() << "\n";
        return 1;
    }

    std::cout << "marker_id,disc_id,X,Y,Z,reproj_error,n_obs\n";
    for (const auto& d : result.discs) {
        std::cout << d.marker_id << "," << d.disc_id << "," << fmt_double(d.position.x)
                  << "," << fmt_double(d.position.y) << "," << fmt_double(d.position.z)
                  << "," << fmt_double(d.reproj_error) << "," << d.n_obs << "\n";
    }
    for (const auto& s : result.skipped)
        std::cerr << "skipped " << s.marker_id << " disc " << s.disc_id << ": "
                  << s.reason << "\n";
    return result.discs.empty() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fiducial strip navigation toolkit"};
    app.require_subcommand(1);

    // classify
    std::string image_path, expect;
    int cls_threshold = 128;
    std::int64_t cls_min_area = 9;
    double cls_tol = 0.15;
    auto* classify = app.add_subcommand("classify", "classify a marker board image");
    classify->add_option("image", image_path, "PNM image of the board")->required();
    classify->add_option("--threshold", cls_threshold, "bright/dark threshold")
        ->capture_default_str();
    classify->add_option("--min-area", cls_min_area, "minimum dot area in pixels")
        ->capture_default_str();
    classify->add_option("--tol", cls_tol, "shape test tolerance")->capture_default_str();
    classify->add_option("--expect", expect,
                         "fail (exit 1) unless the pattern matches this name");

    // track
    std::string frames_dir;
    std::vector<double> gains_kv{1.0, 1.5};
    double max_rate = 1.2, cruise = 0.2;
    int trk_threshold = 128;
    auto* track = app.add_subcommand("track", "per-frame strip estimates as CSV");
    track->add_option("frames", frames_dir, "directory of lower_*.pgm frames")
        ->required();
    track->add_option("--gains", gains_kv, "k_offset,k_gradient")
        ->delimiter(',')
        ->expected(2)
        ->capture_default_str();
    track->add_option("--max-rate", max_rate, "angular rate cap, rad/s")
        ->capture_default_str();
    track->add_option("--cruise", cruise, "forward speed, m/s")->capture_default_str();
    track->add_option("--threshold", trk_threshold, "strip threshold")
        ->capture_default_str();

    // sim
    std::string world_path, dump_dir;
    std::optional<std::uint64_t> seed;
    int max_steps = 5000;
    auto* sim = app.add_subcommand("sim", "run a closed-loop episode");
    sim->add_option("world", world_path, "world config JSON")->required();
    sim->add_option("--seed", seed, "override the world RNG seed");
    sim->add_option("--max-steps", max_steps, "step budget")->capture_default_str();
    sim->add_option("--dump-frames", dump_dir, "write rendered frames to this directory");

    // survey
    std::string obs_path, cams_path;
    auto* survey = app.add_subcommand("survey", "triangulate marker discs");
    survey->add_option("--obs", obs_path, "observations CSV")->required();
    survey->add_option("--cams", cams_path, "cameras CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (classify->parsed())
            return run_classify(image_path, cls_threshold, cls_min_area, cls_tol, expect);
        if (track->parsed())
            return run_track(frames_dir, gains_kv, max_rate, cruise, trk_threshold);
        if (sim->parsed()) return run_sim(world_path, seed, max_steps, dump_dir);
        if (survey->parsed()) return run_survey(obs_path, cams_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
