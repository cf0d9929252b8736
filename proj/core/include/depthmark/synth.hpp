#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "depthmark/depth_image.hpp"

namespace depthmark {

// Parametric depth head: ellipsoid base with a nose ridge, eye sockets,
// brow ridge, mouth groove, cheeks and a chin bulge, rendered by
// z-buffer projection after yaw rotation. Landmarks are anchored to
// fixed surface angles, so ground truth is analytic and exactly
// reproducible from the parameters.

struct HeadParams {
    double yaw_deg = 0.0;          // [-90, 90], positive turns the "_r" side away
    double scale = 1.0;
    double expression_amp = 0.0;   // deepens/extends the mouth groove
    double occlusion_frac = 0.0;   // 0 disables; else rect area as fraction of face box
    double noise_sigma_mm = 0.0;
    std::uint64_t seed = 0;        // identity perturbation + noise + occluder position
};

struct RenderConfig {
    int width = 200;
    int height = 250;
    double pitch_mm = 1.0;
    double scale_mm = 0.1;
    double center_depth_mm = 600.0;
    double visibility_normal_min = 0.05;  // view component of the surface normal
    double visibility_zbuffer_mm = 2.0;   // de-occlusion tolerance
};

struct SynthSample {
    DepthImage image;
    Shape gt;            // all 22 landmarks, visibility flagged
    double yaw_deg = 0;
    FaceBox box;         // tight box of rendered head pixels
};

SynthSample render_head(const HeadParams& params, const RenderConfig& cfg = {});

// Pre-rotation landmark positions on the parametric surface (head
// coordinates, mm). Deterministic in params; exposed so tests can verify
// that projection commutes with the yaw rotation.
std::vector<Eigen::Vector3d> head_landmark_points(const HeadParams& params);

// n samples with per-sample identity perturbations; yaw uniform in
// [yaw_lo, yaw_hi]. Deterministic under seed.
std::vector<SynthSample> make_dataset(int n, double yaw_lo_deg, double yaw_hi_deg,
                                      const HeadParams& base, std::uint64_t seed,
                                      const RenderConfig& cfg = {});

// Places the rendered head into a larger scene with a torso slab and
// background panels at the given depths, keeping an invalid halo around
// the head silhouette (depth discontinuities measure as dropouts).
struct SceneConfig {
    double torso_depth_mm = 900.0;
    double background_depth_mm = 2000.0;
    int halo_px = 10;
    int speckle_count = 0;  // stray near-depth pixels in the background
};
DepthImage compose_scene(const SynthSample& sample, const SceneConfig& scene,
                         std::uint64_t seed);

}  // namespace depthmark
