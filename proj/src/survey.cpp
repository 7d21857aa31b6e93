#include "fidnav/survey.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <set>
#include <sstream>

namespace fidnav {

CameraMatrix::CameraMatrix(const Eigen::Matrix<double, 3, 4>& p) : p_(p) {
    if (!p.allFinite())
        throw std::invalid_argument("camera matrix has non-finite entries");
    if (std::abs(p.leftCols<3>().determinant()) <= 1e-12)
        throw std::invalid_argument("camera matrix left 3x3 block is singular");
}

CameraMatrix CameraMatrix::from_row_major(const std::array<double, 12>& entries) {
    Eigen::Matrix<double, 3, 4> p;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) p(r, c) = entries[std::size_t(r) * 4 + c];
    return CameraMatrix(p);
}

namespace {

constexpr double kSingularW = 1e-12;

Eigen::Vector4d homogeneous(const Point3D& pt) {
    return Eigen::Vector4d(pt.x, pt.y, pt.z, 1.0);
}

const CameraMatrix& camera_for(const CameraSet& cams, int frame) {
    auto it = cams.find(frame);
    if (it == cams.end())
        throw std::invalid_argument("no camera for frame " + std::to_string(frame));
    return it->second;
}

}  // namespace

ImagePoint project(const CameraMatrix& cam, const Point3D& pt) {
    const Eigen::Vector3d uvw = cam.matrix() * homogeneous(pt);
    if (std::abs(uvw.z()) <= kSingularW)
        throw ProjectionSingularity("point lies on the camera plane");
    return ImagePoint{uvw.x() / uvw.z(), uvw.y() / uvw.z()};
}

Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraMatrix& cam,
                                                const Point3D& pt) {
    const auto& p = cam.matrix();
    const Eigen::Vector3d uvw = p * homogeneous(pt);
    const double w = uvw.z();
    if (std::abs(w) <= kSingularW)
        throw ProjectionSingularity("point lies on the camera plane");
    const double u = uvw.x(), v = uvw.y();
    Eigen::Matrix<double, 2, 3> j;
    for (int k = 0; k < 3; ++k) {
        j(0, k) = (p(0, k) * w - u * p(2, k)) / (w * w);
        j(1, k) = (p(1, k) * w - v * p(2, k)) / (w * w);
    }
    return j;
}

Point3D dlt_triangulate(std::span<const Observation> obs, const CameraSet& cams) {
    std::set<int> frames;
    for (const auto& o : obs) frames.insert(o.frame);
    if (frames.size() < 2)
        throw std::invalid_argument(
            "triangulation needs observations from at least 2 distinct frames");

    Eigen::MatrixXd a(2 * obs.size(), 4);
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto& p = camera_for(cams, obs[i].frame).matrix();
        const double s = 1.0 / std::max({std::abs(obs[i].x), std::abs(obs[i].y), 1.0});
        a.row(2 * i) = s * (obs[i].x * p.row(2) - p.row(0));
        a.row(2 * i + 1) = s * (obs[i].y * p.row(2) - p.row(1));
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::Vector4d xh = svd.matrixV().col(3);
    if (std::abs(xh(3)) < 1e-10)
        throw std::runtime_error("degenerate triangulation: point at infinity");
    return Point3D{xh(0) / xh(3), xh(1) / xh(3), xh(2) / xh(3)};
}

double reprojection_error(const Point3D& pt, std::span<const Observation> obs,
                          const CameraSet& cams) {
    double err = 0.0;
    for (const auto& o : obs) {
        const ImagePoint proj = project(camera_for(cams, o.frame), pt);
        const double dx = proj.x - o.x, dy = proj.y - o.y;
        err += dx * dx + dy * dy;
    }
    return err;
}

RefineResult refine_triangulation(const Point3D& init, std::span<const Observation> obs,
                                  const CameraSet& cams, const RefineOptions& opts) {
    Point3D pt = init;
    double err = reprojection_error(pt, obs, cams);
    if (!std::isfinite(err))
        throw NumericError("non-finite error at refinement start", init, err);

    double damping = opts.initial_damping;
    int iters = 0;
    bool converged = false;

    while (iters < opts.max_iters && !converged) {
        ++iters;
        if (err <= 1e-30) break;

        Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
        Eigen::Vector3d g = Eigen::Vector3d::Zero();
        for (const auto& o : obs) {
            const auto& cam = camera_for(cams, o.frame);
            const ImagePoint proj = project(cam, pt);
            const Eigen::Vector2d r(proj.x - o.x, proj.y - o.y);
            const auto j = projection_jacobian(cam, pt);
            h += j.transpose() * j;
            g += j.transpose() * r;
        }
        if (!h.allFinite() || !g.allFinite())
            throw NumericError("non-finite normal equations", pt, err);
        if (g.norm() <= 1e-15) break;

        bool accepted = false;
        while (damping <= 1e15) {
            const Eigen::Matrix3d damped = h + damping * Eigen::Matrix3d::Identity();
            const Eigen::Vector3d step = damped.ldlt().solve(-g);
            double trial_err = std::numeric_limits<double>::infinity();
            const Point3D trial{pt.x + step.x(), pt.y + step.y(), pt.z + step.z()};
            if (step.allFinite()) {
                try {
                    trial_err = reprojection_error(trial, obs, cams);
                } catch (const ProjectionSingularity&) {
                    // step crossed a camera plane; treat as rejected
                }
            }
            if (std::isfinite(trial_err) && trial_err < err) {
                converged = (err - trial_err) / err < opts.rel_tol;
                pt = trial;
                err = trial_err;
                damping /= 10.0;
                accepted = true;
                break;
            }
            damping *= 10.0;
        }
        if (!accepted) break;  // damping exhausted: stationary point
    }

    return RefineResult{pt, err, iters};
}

SurveyResult survey_markers(std::span<const DiscRecord> records, const CameraSet& cams) {
    if (records.empty())
        throw std::invalid_argument("no disc records to survey");

    SurveyResult result;
    for (const auto& rec : records) {
        std::set<int> frames;
        for (const auto& o : rec.observations) frames.insert(o.frame);
        if (frames.size() < 2) {
            result.skipped.push_back(
                {rec.marker_id, rec.disc_id,
                 "needs >= 2 observations in distinct frames, has " +
                     std::to_string(frames.size())});
            continue;
        }
        const Point3D init = dlt_triangulate(rec.observations, cams);
        const RefineResult refined =
            refine_triangulation(init, rec.observations, cams);
        result.discs.push_back({rec.marker_id, rec.disc_id, refined.point,
                                refined.error, int(rec.observations.size())});
    }
    std::sort(result.discs.begin(), result.discs.end(), [](const auto& a, const auto& b) {
        if (a.marker_id != b.marker_id) return a.marker_id < b.marker_id;
        return a.disc_id < b.disc_id;
    });
    return result;
}

CsvError::CsvError(const std::string& message, int line)
    : std::runtime_error(message + " (line " + std::to_string(line) + ")"),
      line_(line) {}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, int line, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw CsvError(std::string("bad ") + what + " value '" + s + "'", line);
    }
}

int parse_int(const std::string& s, int line, const char* what) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw CsvError(std::string("bad ") + what + " value '" + s + "'", line);
    }
}

}  // namespace

std::vector<DiscRecord> read_observations_csv(std::istream& in) {
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line))
        throw CsvError("empty observations file", 1);
    ++lineno;
    if (split_csv(line) != std::vector<std::string>{"marker_id", "disc_id", "frame", "x", "y"})
        throw CsvError("expected header marker_id,disc_id,frame,x,y", lineno);

    std::vector<DiscRecord> records;
    std::map<std::pair<std::string, int>, std::size_t> index;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 5)
            throw CsvError("expected 5 fields, got " + std::to_string(f.size()), lineno);
        const int disc = parse_int(f[1], lineno, "disc_id");
        Observation obs{parse_int(f[2], lineno, "frame"),
                        parse_double(f[3], lineno, "x"),
                        parse_double(f[4], lineno, "y")};
        const auto key = std::make_pair(f[0], disc);
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(key, records.size());
            records.push_back({f[0], disc, {obs}});
        } else {
            records[it->second].observations.push_back(obs);
        }
    }
    return records;
}

CameraSet read_cameras_csv(std::istream& in) {
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line))
        throw CsvError("empty cameras file", 1);
    ++lineno;
    {
        const auto header = split_csv(line);
        if (header.size() != 13 || header[0] != "frame")
            throw CsvError("expected header frame,p11,...,p34", lineno);
    }

    CameraSet cams;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 13)
            throw CsvError("expected 13 fields, got " + std::to_string(f.size()), lineno);
        const int frame = parse_int(f[0], lineno, "frame");
        std::array<double, 12> entries;
        for (int i = 0; i < 12; ++i)
            entries[i] = parse_double(f[i + 1], lineno, "camera entry");
        try {
            cams.emplace(frame, CameraMatrix::from_row_major(entries));
        } catch (const std::invalid_argument& e) {
            throw CsvError(e.what(), lineno);
        }
    }
    return cams;
}

}  // namespace fidnav
