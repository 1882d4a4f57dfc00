#include "segvec/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace segvec {

std::size_t parameter_count(const VectorDocument& doc) {
    std::size_t n = 0;
    for (const BezierPath& p : doc.paths) n += 2 * p.points().size() + 3;
    return n;
}

namespace {

void adam_step(VectorDocument& doc, const Gradients& grad, OptimizerState& st) {
    ++st.step;
    const double t = static_cast<double>(st.step);
    const double bc1 = 1.0 - std::pow(st.beta1, t);
    const double bc2 = 1.0 - std::pow(st.beta2, t);
    std::size_t i = 0;
    auto update = [&](double& param, double g, double lr) {
        st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * g;
        st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * g * g;
        const double mhat = st.m[i] / bc1;
        const double vhat = st.v[i] / bc2;
        param -= lr * mhat / (std::sqrt(vhat) + st.eps);
        ++i;
    };
    for (std::size_t k = 0; k < doc.paths.size(); ++k) {
        BezierPath& path = doc.paths[k];
        const PathGradient& pg = grad.paths[k];
        auto pts = path.points();
        for (std::size_t j = 0; j < pts.size(); ++j) {
            update(pts[j].x, pg.points[j].x, st.lr_points);
            update(pts[j].y, pg.points[j].y, st.lr_points);
        }
        Rgb fill = path.fill();
        for (int c = 0; c < 3; ++c) {
            update(fill[c], pg.fill[c], st.lr_colors);
            fill[c] = std::clamp(fill[c], 0.0, 1.0);
        }
        path.set_fill(fill);
    }
}

}  // namespace

OptimizeResult optimize(const VectorDocument& doc, const RasterImage& target, std::size_t iterations,
                        OptimizerState& state, const RenderConfig& cfg, double lambda_xing) {
    const std::size_t n = parameter_count(doc);
    if (state.m.empty() && state.v.empty() && state.step == 0) {
        state.m.assign(n, 0.0);
        state.v.assign(n, 0.0);
    }
    if (state.m.size() != n || state.v.size() != n) {
        throw std::invalid_argument("optimize: optimizer state does not match the document parameters");
    }

    OptimizeResult res;
    VectorDocument cur = doc;
    res.losses.reserve(iterations + 1);
    for (std::size_t it = 0; it <= iterations; ++it) {
        // The last pass only scores the final iterate.
        const LossValue loss = total_loss(cur, target, cfg, lambda_xing);
        res.losses.push_back(loss.total);
        if (it == 0 || loss.total < res.best_loss) {
            res.best_loss = loss.total;
            res.best = cur;
            res.best_iteration = it;
        }
        if (it == iterations) break;
        adam_step(cur, loss.grad, state);
    }
    res.initial_loss = res.losses.front();
    res.final_loss = res.losses.back();
    res.last = std::move(cur);
    return res;
}

}  // namespace segvec
