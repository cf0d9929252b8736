#include "depthmark/detect.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "depthmark/error.hpp"
#include "depthmark/rng.hpp"

namespace depthmark {

std::pair<std::vector<double>, std::vector<int>> kmeans_1d(
    const std::vector<double>& values, int k, std::uint64_t seed, int max_iterations) {
    if (k < 1) throw InvalidArgument("kmeans_1d: k must be >= 1");
    if (values.empty()) throw InvalidArgument("kmeans_1d: empty input");

    Rng rng(seed);
    std::vector<double> centers;
    centers.reserve(k);

    // k-means++ seeding: first center uniform, then proportional to the
    // squared distance to the nearest chosen center.
    centers.push_back(values[rng.index(values.size())]);
    std::vector<double> d2(values.size());
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (double c : centers) best = std::min(best, (values[i] - c) * (values[i] - c));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            centers.push_back(values[rng.index(values.size())]);
            continue;
        }
        double target = rng.uniform() * total;
        double acc = 0.0;
        std::size_t pick = values.size() - 1;
        for (std::size_t i = 0; i < values.size(); ++i) {
            acc += d2[i];
            if (acc >= target) {
                pick = i;
                break;
            }
        }
        centers.push_back(values[pick]);
    }

    std::vector<int> assign(values.size(), 0);
    for (int iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < values.size(); ++i) {
            int best = 0;
            double bestd = std::abs(values[i] - centers[0]);
            for (int c = 1; c < k; ++c) {
                double d = std::abs(values[i] - centers[c]);
                if (d < bestd) {
                    bestd = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        std::vector<double> sum(k, 0.0);
        std::vector<int> count(k, 0);
        for (std::size_t i = 0; i < values.size(); ++i) {
            sum[assign[i]] += values[i];
            ++count[assign[i]];
        }
        for (int c = 0; c < k; ++c)
            if (count[c] > 0) centers[c] = sum[c] / count[c];
        if (!changed && iter > 0) break;
    }
    return {std::move(centers), std::move(assign)};
}

namespace {

FaceBox bbox_of(const std::vector<std::size_t>& pix, int width) {
    int minx = std::numeric_limits<int>::max(), miny = minx;
    int maxx = -1, maxy = -1;
    for (std::size_t p : pix) {
        int x = static_cast<int>(p % width), y = static_cast<int>(p / width);
        minx = std::min(minx, x);
        maxx = std::max(maxx, x);
        miny = std::min(miny, y);
        maxy = std::max(maxy, y);
    }
    return FaceBox{static_cast<double>(minx), static_cast<double>(miny),
                   static_cast<double>(maxx - minx + 1), static_cast<double>(maxy - miny + 1)};
}

// 8-connected components over a pixel label mask.
std::vector<std::vector<std::size_t>> components(const std::vector<std::uint8_t>& mask,
                                                 int width, int height) {
    std::vector<std::vector<std::size_t>> comps;
    std::vector<std::uint8_t> seen(mask.size(), 0);
    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || seen[start]) continue;
        comps.emplace_back();
        auto& comp = comps.back();
        std::deque<std::size_t> queue{start};
        seen[start] = 1;
        while (!queue.empty()) {
            std::size_t p = queue.front();
            queue.pop_front();
            comp.push_back(p);
            int x = static_cast<int>(p % width), y = static_cast<int>(p / width);
            for (int oy = -1; oy <= 1; ++oy)
                for (int ox = -1; ox <= 1; ++ox) {
                    if (ox == 0 && oy == 0) continue;
                    int nx = x + ox, ny = y + oy;
                    if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
                    std::size_t np = static_cast<std::size_t>(ny) * width + nx;
                    if (mask[np] && !seen[np]) {
                        seen[np] = 1;
                        queue.push_back(np);
                    }
                }
        }
    }
    return comps;
}

}  // namespace

FaceDetection detect_face(const DepthImage& img, const DetectConfig& cfg) {
    std::vector<std::size_t> valid_pix;
    std::vector<double> values;
    for (std::size_t i = 0; i < img.depth.size(); ++i)
        if (img.valid[i]) {
            valid_pix.push_back(i);
            values.push_back(img.depth[i]);
        }
    if (valid_pix.empty()) throw InvalidArgument("detect_face: no valid pixels");

    std::set<double> distinct(values.begin(), values.end());
    if (static_cast<int>(distinct.size()) < cfg.clusters)
        return FaceDetection{bbox_of(valid_pix, img.width), true};

    auto [centers, assign] = kmeans_1d(values, cfg.clusters, cfg.seed, cfg.max_iterations);

    // The face is the cluster nearest the camera.
    std::vector<double> sum(cfg.clusters, 0.0);
    std::vector<int> count(cfg.clusters, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum[assign[i]] += values[i];
        ++count[assign[i]];
    }
    int face_cluster = -1;
    double best_mean = std::numeric_limits<double>::infinity();
    for (int c = 0; c < cfg.clusters; ++c) {
        if (count[c] == 0) continue;
        double mean = sum[c] / count[c];
        if (mean < best_mean) {
            best_mean = mean;
            face_cluster = c;
        }
    }

    std::vector<std::uint8_t> mask(img.depth.size(), 0);
    for (std::size_t i = 0; i < valid_pix.size(); ++i)
        if (assign[i] == face_cluster) mask[valid_pix[i]] = 1;

    auto comps = components(mask, img.width, img.height);
    double min_area = cfg.min_component_frac * static_cast<double>(valid_pix.size());
    std::vector<std::size_t> kept;
    std::size_t largest = 0;
    for (const auto& comp : comps) {
        if (static_cast<double>(comp.size()) >= min_area)
            kept.insert(kept.end(), comp.begin(), comp.end());
        largest = std::max(largest, comp.size());
    }
    if (kept.empty()) {
        // Everything fell under the speckle threshold; keep the largest blob.
        for (const auto& comp : comps)
            if (comp.size() == largest) {
                kept = comp;
                break;
            }
    }
    return FaceDetection{bbox_of(kept, img.width), false};
}

}  // namespace depthmark
