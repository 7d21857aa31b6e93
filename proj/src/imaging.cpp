#include "fidnav/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>

namespace fidnav {

Image::Image(int w, int h, std::uint8_t fill) : width(w), height(h) {
    if (w < 1 || h < 1)
        throw std::invalid_argument("Image dimensions must be positive");
    pixels.assign(std::size_t(w) * h, fill);
}

BinaryImage::BinaryImage(int w, int h, bool fill) : width(w), height(h) {
    if (w < 1 || h < 1)
        throw std::invalid_argument("BinaryImage dimensions must be positive");
    mask.assign(std::size_t(w) * h, fill ? 1 : 0);
}

std::int64_t BinaryImage::count_foreground() const {
    return std::accumulate(mask.begin(), mask.end(), std::int64_t{0});
}

PnmError::PnmError(const std::string& message, std::size_t offset)
    : std::runtime_error(message + " (byte offset " + std::to_string(offset) + ")"),
      offset_(offset) {}

namespace {

bool is_pnm_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

// Cursor over the raw bytes; tracks the offset for error reporting.
struct PnmReader {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    void skip_space_and_comments() {
        while (pos < bytes.size()) {
            if (is_pnm_space(bytes[pos])) {
                ++pos;
            } else if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    // Whitespace-delimited decimal token.
    int next_int(const char* what) {
        skip_space_and_comments();
        if (pos >= bytes.size())
            throw PnmError(std::string("unexpected end of data reading ") + what, pos);
        std::size_t start = pos;
        long value = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            value = value * 10 + (bytes[pos] - '0');
            if (value > 1'000'000'000L)
                throw PnmError(std::string("value out of range for ") + what, start);
            ++pos;
        }
        if (pos == start)
            throw PnmError(std::string("expected integer for ") + what, start);
        return static_cast<int>(value);
    }
};

std::uint8_t luma(int r, int g, int b) {
    return static_cast<std::uint8_t>(std::lround(0.299 * r + 0.587 * g + 0.114 * b));
}

}  // namespace

Image load_pnm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P')
        throw PnmError("not a PNM file (missing magic)", 0);
    const char kind = static_cast<char>(bytes[1]);
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
        throw PnmError(std::string("unsupported PNM magic P") + kind, 1);

    PnmReader rd{bytes, 2};
    const int width = rd.next_int("width");
    const int height = rd.next_int("height");
    if (width < 1 || height < 1)
        throw PnmError("image dimensions must be positive", 2);
    const std::size_t maxval_at = rd.pos;
    const int maxval = rd.next_int("maxval");
    if (maxval < 1 || maxval > 255)
        throw PnmError("maxval out of range (must be 1..255)", maxval_at);

    Image img(width, height);
    const std::size_t n = std::size_t(width) * height;

    if (kind == '5' || kind == '6') {
        // Binary raster starts after a single whitespace byte.
        if (rd.pos >= bytes.size() || !is_pnm_space(bytes[rd.pos]))
            throw PnmError("expected whitespace before binary raster", rd.pos);
        ++rd.pos;
        const std::size_t samples = (kind == '6') ? 3 * n : n;
        if (bytes.size() - rd.pos < samples)
            throw PnmError("truncated pixel data", bytes.size());
        if (kind == '5') {
            std::copy_n(bytes.begin() + rd.pos, n, img.pixels.begin());
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t o = rd.pos + 3 * i;
                img.pixels[i] = luma(bytes[o], bytes[o + 1], bytes[o + 2]);
            }
        }
    } else {
        const bool color = (kind == '3');
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t at = rd.pos;
            int r = rd.next_int("pixel sample");
            if (r > 255) throw PnmError("pixel sample exceeds 255", at);
            if (color) {
                at = rd.pos;
                const int g = rd.next_int("pixel sample");
                if (g > 255) throw PnmError("pixel sample exceeds 255", at);
                at = rd.pos;
                const int b = rd.next_int("pixel sample");
                if (b > 255) throw PnmError("pixel sample exceeds 255", at);
                img.pixels[i] = luma(r, g, b);
            } else {
                img.pixels[i] = static_cast<std::uint8_t>(r);
            }
        }
    }
    return img;
}

std::vector<std::uint8_t> save_pnm(const Image& img) {
    std::string header = "P5\n" + std::to_string(img.width) + " " +
                         std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out;
    out.reserve(header.size() + img.pixels.size());
    out.insert(out.end(), header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

Image load_pnm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return load_pnm(bytes);
}

void save_pnm_file(const Image& img, const std::string& path) {
    const auto bytes = save_pnm(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

BinaryImage binarize_fixed(const Image& img, std::uint8_t threshold, Polarity polarity) {
    BinaryImage out(img.width, img.height);
    const bool bright = (polarity == Polarity::Bright);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const bool ge = img.pixels[i] >= threshold;
        out.mask[i] = (ge == bright) ? 1 : 0;
    }
    return out;
}

BinaryImage binarize_adaptive(const Image& img, int window, int offset_c) {
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument("adaptive window must be odd and >= 3");
    if (window > img.width || window > img.height)
        throw std::invalid_argument("adaptive window larger than image");

    const int w = img.width, h = img.height, r = window / 2;

    // Separable edge-replicated box sums: horizontal pass then vertical.
    // Out-of-range samples repeat the nearest edge value, so the window
    // always holds window*window samples.
    std::vector<std::int64_t> hsum(std::size_t(w) * h);
    std::vector<std::int64_t> prefix(w + 1);
    for (int y = 0; y < h; ++y) {
        prefix[0] = 0;
        for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + img.at(x, y);
        const std::int64_t left_edge = img.at(0, y);
        const std::int64_t right_edge = img.at(w - 1, y);
        for (int x = 0; x < w; ++x) {
            const int lo = x - r, hi = x + r;
            std::int64_t s = prefix[std::min(hi + 1, w)] - prefix[std::max(lo, 0)];
            if (lo < 0) s += std::int64_t(-lo) * left_edge;
            if (hi > w - 1) s += std::int64_t(hi - (w - 1)) * right_edge;
            hsum[std::size_t(y) * w + x] = s;
        }
    }

    BinaryImage out(w, h);
    const std::int64_t area = std::int64_t(window) * window;
    std::vector<std::int64_t> vprefix(h + 1);
    for (int x = 0; x < w; ++x) {
        vprefix[0] = 0;
        for (int y = 0; y < h; ++y)
            vprefix[y + 1] = vprefix[y] + hsum[std::size_t(y) * w + x];
        const std::int64_t top_edge = hsum[x];
        const std::int64_t bottom_edge = hsum[std::size_t(h - 1) * w + x];
        for (int y = 0; y < h; ++y) {
            const int lo = y - r, hi = y + r;
            std::int64_t s = vprefix[std::min(hi + 1, h)] - vprefix[std::max(lo, 0)];
            if (lo < 0) s += std::int64_t(-lo) * top_edge;
            if (hi > h - 1) s += std::int64_t(hi - (h - 1)) * bottom_edge;
            // pixel >= sum/area - offset_c, kept in integers
            const std::int64_t lhs = std::int64_t(img.at(x, y)) * area;
            out.set(x, y, lhs >= s - std::int64_t(offset_c) * area);
        }
    }
    return out;
}

ComponentLabels label_components(const BinaryImage& bin, std::int64_t min_area) {
    const int w = bin.width, h = bin.height;
    ComponentLabels out;
    out.labels.assign(std::size_t(w) * h, 0);
    if (min_area < 1) min_area = 1;

    struct Stats {
        std::int64_t area = 0;
        std::int64_t sum_x = 0, sum_y = 0;
        int x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    };
    std::vector<Stats> stats;
    std::vector<std::pair<int, int>> stack;

    int next = 0;
    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            const std::size_t si = std::size_t(sy) * w + sx;
            if (!bin.mask[si] || out.labels[si] != 0) continue;
            ++next;
            Stats st{0, 0, 0, sx, sy, sx, sy};
            stack.clear();
            stack.emplace_back(sx, sy);
            out.labels[si] = next;
            while (!stack.empty()) {
                auto [x, y] = stack.back();
                stack.pop_back();
                ++st.area;
                st.sum_x += x;
                st.sum_y += y;
                st.x_min = std::min(st.x_min, x);
                st.x_max = std::max(st.x_max, x);
                st.y_min = std::min(st.y_min, y);
                st.y_max = std::max(st.y_max, y);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        const std::size_t ni = std::size_t(ny) * w + nx;
                        if (bin.mask[ni] && out.labels[ni] == 0) {
                            out.labels[ni] = next;
                            stack.emplace_back(nx, ny);
                        }
                    }
                }
            }
            stats.push_back(st);
        }
    }

    // Keep components meeting min_area, order by bbox (y_min, x_min),
    // then relabel 1..n. Scan order breaks exact bbox ties.
    std::vector<int> kept;
    for (int i = 0; i < int(stats.size()); ++i)
        if (stats[i].area >= min_area) kept.push_back(i);
    std::stable_sort(kept.begin(), kept.end(), [&](int a, int b) {
        if (stats[a].y_min != stats[b].y_min) return stats[a].y_min < stats[b].y_min;
        return stats[a].x_min < stats[b].x_min;
    });

    std::vector<int> relabel(stats.size() + 1, 0);
    out.blobs.reserve(kept.size());
    for (int i = 0; i < int(kept.size()); ++i) {
        const Stats& st = stats[kept[i]];
        relabel[kept[i] + 1] = i + 1;
        Blob b;
        b.label = i + 1;
        b.area = st.area;
        b.cx = double(st.sum_x) / double(st.area);
        b.cy = double(st.sum_y) / double(st.area);
        b.x_min = st.x_min;
        b.y_min = st.y_min;
        b.x_max = st.x_max;
        b.y_max = st.y_max;
        out.blobs.push_back(b);
    }
    for (auto& l : out.labels) l = relabel[l];
    return out;
}

std::vector<Blob> connected_components(const BinaryImage& bin, std::int64_t min_area) {
    return label_components(bin, min_area).blobs;
}

}  // namespace fidnav
