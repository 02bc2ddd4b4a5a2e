#include "yomo/extractor.hpp"

#include <cmath>

#include "yomo/errors.hpp"

namespace yomo {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_config(const ExtractorConfig& config) {
    if (config.d < 1) throw ConfigError("extractor input dimension must be positive");
    if (config.n_f < 1) throw ConfigError("extractor output dimension must be positive");
    if (config.kind == ExtractorKind::mlp1 && config.hidden < 1) {
        throw ConfigError("mlp1 extractor needs a positive hidden width");
    }
}

void check_extractor(const FeatureExtractor& ext) {
    check_config(ext.config);
    const int expected = param_count(ext.config);
    if (static_cast<int>(ext.params.size()) != expected) {
        throw ConfigError("extractor has " + std::to_string(ext.params.size()) +
                          " parameters, architecture requires " + std::to_string(expected));
    }
}

// y = pi * tanh(W x + b) computed from a parameter block; returns the output.
std::vector<double> affine_tanh(std::span<const double> weights, std::span<const double> bias,
                                std::span<const double> x, double scale) {
    const size_t rows = bias.size();
    const size_t cols = x.size();
    std::vector<double> out(rows);
    for (size_t j = 0; j < rows; ++j) {
        double pre = bias[j];
        for (size_t i = 0; i < cols; ++i) pre += weights[j * cols + i] * x[i];
        out[j] = scale * std::tanh(pre);
    }
    return out;
}

}  // namespace

int param_count(const ExtractorConfig& config) {
    check_config(config);
    if (config.kind == ExtractorKind::affine) return config.n_f * config.d + config.n_f;
    return config.hidden * config.d + config.hidden + config.n_f * config.hidden + config.n_f;
}

ExtractorKind parse_extractor_kind(const std::string& text) {
    if (text == "affine") return ExtractorKind::affine;
    if (text == "mlp1") return ExtractorKind::mlp1;
    throw ConfigError("unknown extractor architecture \"" + text +
                      "\"; expected \"affine\" or \"mlp1\"");
}

std::string format_extractor_kind(ExtractorKind kind) {
    return kind == ExtractorKind::affine ? "affine" : "mlp1";
}

FeatureExtractor init_extractor(const ExtractorConfig& config, RngStream& rng) {
    check_config(config);
    FeatureExtractor ext;
    ext.config = config;
    ext.params.assign(param_count(config), 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(config.d));
    auto fill_weights = [&](size_t offset, size_t count) {
        for (size_t i = 0; i < count; ++i) {
            ext.params[offset + i] = rng.next_uniform(-bound, bound);
        }
    };
    if (config.kind == ExtractorKind::affine) {
        fill_weights(0, static_cast<size_t>(config.n_f) * config.d);
    } else {
        const size_t w1 = static_cast<size_t>(config.hidden) * config.d;
        fill_weights(0, w1);
        fill_weights(w1 + config.hidden, static_cast<size_t>(config.n_f) * config.hidden);
    }
    return ext;
}

std::vector<double> forward(const FeatureExtractor& ext, std::span<const double> x,
                            ExtractorCache* cache) {
    check_extractor(ext);
    const ExtractorConfig& c = ext.config;
    if (static_cast<int>(x.size()) != c.d) {
        throw ArgumentError("extractor expects input dimension " + std::to_string(c.d) +
                            ", got " + std::to_string(x.size()));
    }
    std::span<const double> params(ext.params);
    std::vector<double> hidden_act;
    std::vector<double> z;
    if (c.kind == ExtractorKind::affine) {
        z = affine_tanh(params.subspan(0, static_cast<size_t>(c.n_f) * c.d),
                        params.subspan(static_cast<size_t>(c.n_f) * c.d, c.n_f), x, kPi);
    } else {
        const size_t w1 = static_cast<size_t>(c.hidden) * c.d;
        const size_t w2_off = w1 + c.hidden;
        const size_t b2_off = w2_off + static_cast<size_t>(c.n_f) * c.hidden;
        hidden_act = affine_tanh(params.subspan(0, w1), params.subspan(w1, c.hidden), x, 1.0);
        z = affine_tanh(params.subspan(w2_off, static_cast<size_t>(c.n_f) * c.hidden),
                        params.subspan(b2_off, c.n_f), hidden_act, kPi);
    }
    if (cache != nullptr) {
        cache->x.assign(x.begin(), x.end());
        cache->hidden_act = hidden_act;
        cache->z = z;
    }
    return z;
}

ExtractorGradients backward(const FeatureExtractor& ext, const ExtractorCache& cache,
                            std::span<const double> d_z) {
    check_extractor(ext);
    const ExtractorConfig& c = ext.config;
    if (static_cast<int>(d_z.size()) != c.n_f) {
        throw ArgumentError("extractor backward expects " + std::to_string(c.n_f) +
                            " output gradients, got " + std::to_string(d_z.size()));
    }
    if (static_cast<int>(cache.x.size()) != c.d ||
        static_cast<int>(cache.z.size()) != c.n_f ||
        (c.kind == ExtractorKind::mlp1 &&
         static_cast<int>(cache.hidden_act.size()) != c.hidden)) {
        throw ArgumentError("extractor backward: cache does not match the architecture");
    }

    ExtractorGradients out;
    out.d_params.assign(ext.params.size(), 0.0);
    out.d_x.assign(c.d, 0.0);

    // d/d(pre) of pi*tanh(pre), recovered from the cached output.
    std::vector<double> d_pre(c.n_f);
    for (int j = 0; j < c.n_f; ++j) {
        const double t = cache.z[j] / kPi;
        d_pre[j] = d_z[j] * kPi * (1.0 - t * t);
    }

    if (c.kind == ExtractorKind::affine) {
        const size_t b_off = static_cast<size_t>(c.n_f) * c.d;
        for (int j = 0; j < c.n_f; ++j) {
            for (int i = 0; i < c.d; ++i) {
                out.d_params[static_cast<size_t>(j) * c.d + i] += d_pre[j] * cache.x[i];
                out.d_x[i] += d_pre[j] * ext.params[static_cast<size_t>(j) * c.d + i];
            }
            out.d_params[b_off + j] += d_pre[j];
        }
        return out;
    }

    const size_t w1 = static_cast<size_t>(c.hidden) * c.d;
    const size_t b1_off = w1;
    const size_t w2_off = w1 + c.hidden;
    const size_t b2_off = w2_off + static_cast<size_t>(c.n_f) * c.hidden;

    std::vector<double> d_hidden(c.hidden, 0.0);
    for (int j = 0; j < c.n_f; ++j) {
        for (int m = 0; m < c.hidden; ++m) {
            const size_t idx = w2_off + static_cast<size_t>(j) * c.hidden + m;
            out.d_params[idx] += d_pre[j] * cache.hidden_act[m];
            d_hidden[m] += d_pre[j] * ext.params[idx];
        }
        out.d_params[b2_off + j] += d_pre[j];
    }
    for (int m = 0; m < c.hidden; ++m) {
        const double h = cache.hidden_act[m];
        const double d_hpre = d_hidden[m] * (1.0 - h * h);
        for (int i = 0; i < c.d; ++i) {
            out.d_params[static_cast<size_t>(m) * c.d + i] += d_hpre * cache.x[i];
            out.d_x[i] += d_hpre * ext.params[static_cast<size_t>(m) * c.d + i];
        }
        out.d_params[b1_off + m] += d_hpre;
    }
    return out;
}

}  // namespace yomo
