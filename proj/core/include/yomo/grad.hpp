#pragma once

#include <span>
#include <vector>

#include "yomo/losses.hpp"
#include "yomo/model.hpp"
#include "yomo/noise.hpp"

namespace yomo {

// Joint gradient of the batch loss.
struct GradientBundle {
    std::vector<double> d_theta_c;  // extractor parameters
    std::vector<double> d_theta;    // ansatz angles
    // Per-feature derivative of the loss w.r.t. a shared additive shift of
    // encoding angle i across the batch (the sum over samples of dL/dz_i);
    // used to cross-check the shift-rule path.
    std::vector<double> d_z_total;
    LossBreakdown loss;
};

// Exact reverse-mode gradient: loss -> head -> state (adjoint sweep that
// walks the gates backward, un-applying each and accumulating per-angle
// derivatives) -> extractor. Requires exact noiseless simulation; passing a
// noise model is a configuration error.
GradientBundle backprop_gradients(const Model& model, const SampleBatch& batch,
                                  const LossConfig& cfg, const NoiseModel* noise = nullptr);

// Shift-rule derivative of the batch loss for one angle parameter:
// indices [0, n_theta) address ansatz angles, [n_theta, n_theta + n_f)
// address shared encoder-angle shifts. Each circuit output is differentiated
// as [f(angle + pi/2) - f(angle - pi/2)] / 2 and chained through the loss
// derivative taken at the unshifted point.
double parameter_shift_gradient(const Model& model, const SampleBatch& batch,
                                const LossConfig& cfg, int param_index);

// Full oracle bundle from the shift rule: ansatz angles directly, extractor
// parameters by chaining per-sample dL/dz through the extractor's reverse
// pass.
GradientBundle parameter_shift_gradients(const Model& model, const SampleBatch& batch,
                                         const LossConfig& cfg);

// Adam with bias correction; beta/epsilon defaults are the conventional
// ones, the learning rate is the training default.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long long t = 0;
    double lr = 5e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState make_adam_state(size_t n_params, double lr);

// One in-place update; deterministic, no hidden state beyond `state`.
void adam_step(AdamState& state, std::vector<double>& params, std::span<const double> grads);

}  // namespace yomo
