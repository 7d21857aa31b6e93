#pragma once

#include "fidnav/imaging.hpp"

#include <string>
#include <vector>

namespace fidnav {

/// Marker meanings: one dot = left turn, three dots in a triangle = right
/// turn, four dots in a square = start/destination board.
enum class FiducialPattern { None, LeftTurn, RightTurn, Terminal, Unknown };

std::string to_string(FiducialPattern p);

struct FiducialDetection {
    FiducialPattern pattern = FiducialPattern::None;
    std::vector<Blob> dots;       // empty when pattern == None
    double board_fraction = 0.0;  // fraction of frame pixels that are bright
};

struct FiducialConfig {
    std::uint8_t threshold = 128;
    std::int64_t min_dot_area = 9;
    double tol = 0.15;                 // relative tolerance for shape tests
    double board_min_fraction = 0.5;   // bright fraction required to accept a board
};

/// Dark blobs on the frame, excluding any that touch the image border
/// (partially visible dots are unreliable).
std::vector<Blob> detect_dots(const Image& img, std::uint8_t threshold,
                              std::int64_t min_area);

/// Classify by dot count and centroid geometry. Shape tests are scale-free:
/// 3 dots need triangle_area / longest_side^2 > 0.05; 4 dots need the four
/// shortest pairwise distances and the two longest each within tol of their
/// means, and diagonal/side mean ratio within tol of sqrt(2).
FiducialPattern classify_pattern(const std::vector<Blob>& dots, double tol = 0.15);

/// Board gate plus classification: a frame whose bright fraction is below
/// board_min_fraction carries no board and yields None.
FiducialDetection detect_fiducial(const Image& img, const FiducialConfig& cfg = {});

}  // namespace fidnav
