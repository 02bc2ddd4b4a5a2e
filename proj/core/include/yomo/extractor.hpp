#pragma once

#include <span>
#include <string>
#include <vector>

#include "yomo/rng.hpp"

namespace yomo {

// Classical front-end mapping a d-dimensional input to n_f encoding angles.
// Both architectures squash the output through pi * tanh, so every angle
// lands in [-pi, pi].
enum class ExtractorKind { affine, mlp1 };

struct ExtractorConfig {
    ExtractorKind kind = ExtractorKind::affine;
    int d = 0;       // input dimension
    int n_f = 0;     // output (feature/angle) count
    int hidden = 0;  // mlp1 only: hidden width
};

// Flat parameter layout:
//   affine: W (n_f x d, row-major), b (n_f)
//   mlp1:   W1 (hidden x d), b1 (hidden), W2 (n_f x hidden), b2 (n_f)
struct FeatureExtractor {
    ExtractorConfig config;
    std::vector<double> params;
};

// Intermediates saved by forward() for the reverse pass.
struct ExtractorCache {
    std::vector<double> x;
    std::vector<double> hidden_act;  // mlp1 only: tanh of the hidden layer
    std::vector<double> z;           // final output (pi * tanh of out_pre)
};

struct ExtractorGradients {
    std::vector<double> d_params;
    std::vector<double> d_x;
};

int param_count(const ExtractorConfig& config);

ExtractorKind parse_extractor_kind(const std::string& text);
std::string format_extractor_kind(ExtractorKind kind);

// Weights drawn uniform(-1/sqrt(d), 1/sqrt(d)), biases zero.
FeatureExtractor init_extractor(const ExtractorConfig& config, RngStream& rng);

// Returns z in [-pi, pi]^{n_f}; fills `cache` when given.
std::vector<double> forward(const FeatureExtractor& ext, std::span<const double> x,
                            ExtractorCache* cache = nullptr);

// Exact reverse-mode derivatives of forward for the cached input.
ExtractorGradients backward(const FeatureExtractor& ext, const ExtractorCache& cache,
                            std::span<const double> d_z);

}  // namespace yomo
