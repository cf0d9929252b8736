#include "depthmark/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "depthmark/error.hpp"

namespace depthmark {

namespace {

// Multi-source BFS from all measured pixels; each hole takes the value of
// the pixel that first reaches it. Queue order (row-major seeds, fixed
// neighbor order) makes tie-breaking deterministic.
void fill_holes(DepthImage& img) {
    const int w = img.width, h = img.height;
    std::deque<std::pair<int, int>> queue;
    std::vector<std::uint8_t> assigned(img.valid.begin(), img.valid.end());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (img.is_valid(x, y)) queue.emplace_back(x, y);

    static constexpr int dx[4] = {1, -1, 0, 0};
    static constexpr int dy[4] = {0, 0, 1, -1};
    while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        for (int k = 0; k < 4; ++k) {
            int nx = x + dx[k], ny = y + dy[k];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            std::size_t ni = img.index(nx, ny);
            if (assigned[ni]) continue;
            assigned[ni] = 1;
            img.depth[ni] = img.at(x, y);
            queue.emplace_back(nx, ny);
        }
    }
}

std::vector<double> median_filter(const DepthImage& img, int window) {
    const int w = img.width, h = img.height, r = window / 2;
    std::vector<double> out(img.depth.size());
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(window) * window);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            vals.clear();
            for (int oy = -r; oy <= r; ++oy)
                for (int ox = -r; ox <= r; ++ox) {
                    int nx = x + ox, ny = y + oy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    vals.push_back(img.at(nx, ny));
                }
            auto mid = vals.begin() + vals.size() / 2;
            std::nth_element(vals.begin(), mid, vals.end());
            out[img.index(x, y)] = *mid;
        }
    return out;
}

}  // namespace

DepthImage preprocess(const DepthImage& img, const PreprocessConfig& cfg) {
    if (img.count_valid() == 0)
        throw InvalidArgument("preprocess: image has no valid pixels");
    if (cfg.median_window < 1 || cfg.median_window % 2 == 0)
        throw InvalidArgument("preprocess: median window must be odd and >= 1");

    DepthImage filled = img;
    fill_holes(filled);
    std::vector<double> smooth = cfg.median_window > 1
                                     ? median_filter(filled, cfg.median_window)
                                     : filled.depth;

    const int w = img.width, h = img.height;
    const double pitch = img.pitch_mm;
    DepthImage out = img;  // keeps the measured-pixel mask and metadata
    auto value = [&](int x, int y) { return smooth[static_cast<std::size_t>(y) * w + x]; };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double gx, gy;
            if (w == 1) {
                gx = 0.0;
            } else if (x == 0) {
                gx = (value(1, y) - value(0, y)) / pitch;
            } else if (x == w - 1) {
                gx = (value(w - 1, y) - value(w - 2, y)) / pitch;
            } else {
                gx = (value(x + 1, y) - value(x - 1, y)) / (2.0 * pitch);
            }
            if (h == 1) {
                gy = 0.0;
            } else if (y == 0) {
                gy = (value(x, 1) - value(x, 0)) / pitch;
            } else if (y == h - 1) {
                gy = (value(x, h - 1) - value(x, h - 2)) / pitch;
            } else {
                gy = (value(x, y + 1) - value(x, y - 1)) / (2.0 * pitch);
            }
            out.depth[out.index(x, y)] = 1.0 / std::sqrt(1.0 + gx * gx + gy * gy);
        }
    return out;
}

}  // namespace depthmark
