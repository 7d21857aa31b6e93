#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fidnav {

/// 8-bit grayscale image, row-major.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(int w, int h, std::uint8_t fill = 0);

    std::uint8_t at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }

    bool operator==(const Image&) const = default;
};

/// Boolean foreground mask with the same layout as Image.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> mask;  // 0 = background, 1 = foreground

    BinaryImage() = default;
    BinaryImage(int w, int h, bool fill = false);

    bool get(int x, int y) const { return mask[std::size_t(y) * width + x] != 0; }
    void set(int x, int y, bool v) { mask[std::size_t(y) * width + x] = v ? 1 : 0; }

    std::int64_t count_foreground() const;

    bool operator==(const BinaryImage&) const = default;
};

/// Connected pixel region. Centroid is the unweighted mean of member
/// pixel coordinates; the bounding box is inclusive.
struct Blob {
    int label = 0;
    std::int64_t area = 0;
    double cx = 0.0;
    double cy = 0.0;
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;
};

enum class Polarity { Bright, Dark };

/// Parse failure in PNM data; offset() is the byte position of the problem.
class PnmError : public std::runtime_error {
public:
    PnmError(const std::string& message, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Reads P2/P5 graymaps; P3/P6 color inputs are converted to gray with
/// round(0.299 R + 0.587 G + 0.114 B). maxval must be <= 255. Header
/// comments ("#...\n") are accepted.
Image load_pnm(std::span<const std::uint8_t> bytes);

/// Emits binary P5 with maxval 255. load_pnm(save_pnm(img)) == img.
std::vector<std::uint8_t> save_pnm(const Image& img);

Image load_pnm_file(const std::string& path);
void save_pnm_file(const Image& img, const std::string& path);

/// Bright: pixel >= threshold is foreground. Dark: pixel < threshold.
BinaryImage binarize_fixed(const Image& img, std::uint8_t threshold, Polarity polarity);

/// Local-mean threshold: foreground where pixel >= mean(window x window
/// neighborhood) - offset_c. Out-of-image samples replicate the nearest
/// edge pixel. window must be odd and no larger than either dimension.
BinaryImage binarize_adaptive(const Image& img, int window, int offset_c);

/// Dense label map plus per-component stats. labels uses 0 for background
/// and 1..blobs.size() matching blobs[i].label == i + 1.
struct ComponentLabels {
    std::vector<int> labels;
    std::vector<Blob> blobs;
};

/// 8-connected components with area >= min_area, ordered by (y_min, x_min)
/// of the bounding box and relabeled 1..n in that order.
ComponentLabels label_components(const BinaryImage& bin, std::int64_t min_area = 1);
std::vector<Blob> connected_components(const BinaryImage& bin, std::int64_t min_area = 1);

}  // namespace fidnav
