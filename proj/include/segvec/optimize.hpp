#pragma once

#include <cstddef>
#include <vector>

#include "segvec/render.hpp"

namespace segvec {

inline constexpr double kLrPoints = 1.0;
inline constexpr double kLrColors = 0.01;

// Adam state over the flattened document parameters: for each path its
// control point coordinates (x, y interleaved) followed by its 3 fill channels.
struct OptimizerState {
    double lr_points = kLrPoints;
    double lr_colors = kLrColors;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::size_t step = 0;
    std::vector<double> m;
    std::vector<double> v;
};

struct OptimizeResult {
    VectorDocument best;  // lowest total loss seen, including the starting point
    VectorDocument last;  // final iterate; continue from here with the same state
    double initial_loss = 0.0;
    double best_loss = 0.0;
    double final_loss = 0.0;
    std::size_t best_iteration = 0;  // 0 = starting document
    std::vector<double> losses;      // total loss of iterate 0..iterations
};

std::size_t parameter_count(const VectorDocument& doc);

// Adam with separate point / colour learning rates. Fill channels are clamped
// to [0,1] after every step. Throws std::invalid_argument if the state's
// moments do not match the document's parameter count.
OptimizeResult optimize(const VectorDocument& doc, const RasterImage& target, std::size_t iterations,
                        OptimizerState& state, const RenderConfig& cfg = {}, double lambda_xing = 0.01);

}  // namespace segvec
