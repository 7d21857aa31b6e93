#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fidnav {

struct Point3D {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct ImagePoint {
    double x = 0.0;
    double y = 0.0;
};

/// 3x4 projection matrix. The left 3x3 block must be invertible (finite
/// camera); scaling the whole matrix does not change projections.
class CameraMatrix {
public:
    explicit CameraMatrix(const Eigen::Matrix<double, 3, 4>& p);
    static CameraMatrix from_row_major(const std::array<double, 12>& entries);

    const Eigen::Matrix<double, 3, 4>& matrix() const { return p_; }

private:
    Eigen::Matrix<double, 3, 4> p_;
};

/// One 2D measurement of a disc: pixel position in a given frame.
struct Observation {
    int frame = 0;
    double x = 0.0;
    double y = 0.0;
};

/// All measurements of one disc of one marker.
struct DiscRecord {
    std::string marker_id;
    int disc_id = 0;
    std::vector<Observation> observations;
};

using CameraSet = std::map<int, CameraMatrix>;

/// The 3D point projected numerically onto the camera plane (|w| <= 1e-12).
class ProjectionSingularity : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite value hit during refinement; carries the last good iterate.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& message, const Point3D& last_good, double error)
        : std::runtime_error(message), last_good_(last_good), error_(error) {}
    const Point3D& last_good() const { return last_good_; }
    double error() const { return error_; }

private:
    Point3D last_good_;
    double error_;
};

/// Pinhole projection: (u, v, w) = P * (x, y, z, 1), result (u/w, v/w).
ImagePoint project(const CameraMatrix& cam, const Point3D& pt);

/// d(projection)/d(point), 2x3, evaluated analytically.
Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraMatrix& cam,
                                                const Point3D& pt);

/// Linear initialization: stacks x*(row3 . X) - row1 . X = 0 and
/// y*(row3 . X) - row2 . X = 0 per observation (rows scaled by
/// 1/max(|x|,|y|,1) for conditioning) and takes the smallest-singular
/// direction of the system. Needs >= 2 observations in distinct frames.
Point3D dlt_triangulate(std::span<const Observation> obs, const CameraSet& cams);

/// Sum of squared distances between projections of pt and the observations.
double reprojection_error(const Point3D& pt, std::span<const Observation> obs,
                          const CameraSet& cams);

struct RefineOptions {
    int max_iters = 100;
    double rel_tol = 1e-12;
    double initial_damping = 1e-3;
};

struct RefineResult {
    Point3D point;
    double error = 0.0;
    int iterations = 0;
};

/// Damped least-squares descent on the reprojection error. Damping grows
/// x10 on rejected steps and shrinks /10 on accepted ones; only improving
/// steps are taken, so the returned error never exceeds the initial one.
RefineResult refine_triangulation(const Point3D& init, std::span<const Observation> obs,
                                  const CameraSet& cams, const RefineOptions& opts = {});

struct SurveyedDisc {
    std::string marker_id;
    int disc_id = 0;
    Point3D position;
    double reproj_error = 0.0;
    int n_obs = 0;
};

struct SkippedDisc {
    std::string marker_id;
    int disc_id = 0;
    std::string reason;
};

struct SurveyResult {
    std::vector<SurveyedDisc> discs;     // sorted by (marker_id, disc_id)
    std::vector<SkippedDisc> skipped;
};

/// DLT then refinement for every disc independently. Discs with too few
/// distinct-frame observations land in the skipped list.
SurveyResult survey_markers(std::span<const DiscRecord> records, const CameraSet& cams);

/// CSV row that does not match the expected schema; line() is 1-based.
class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& message, int line);
    int line() const { return line_; }

private:
    int line_;
};

/// Header "marker_id,disc_id,frame,x,y"; one observation per row, grouped
/// into DiscRecords in first-appearance order.
std::vector<DiscRecord> read_observations_csv(std::istream& in);

/// Header "frame,p11,...,p34" with 12 row-major entries per camera.
CameraSet read_cameras_csv(std::istream& in);

}  // namespace fidnav
