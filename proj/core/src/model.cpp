#include "yomo/model.hpp"

#include "yomo/errors.hpp"

namespace yomo {

namespace {

constexpr double kPi = 3.14159265358979323846;

ModelConfig resolve(ModelConfig config) {
    if (config.n_f == 0) config.n_f = 3 * config.n_q;
    if (config.K < 2) throw ConfigError("class count K must be at least 2 for classification");
    if (config.d < 1) throw ConfigError("input dimension d must be positive");
    if (config.n_f < 1) throw ConfigError("feature count n_f must be positive");
    return config;
}

}  // namespace

Model build_model(const ModelConfig& raw_config, RngStream& rng) {
    Model model;
    model.config = resolve(raw_config);
    const ModelConfig& c = model.config;

    ExtractorConfig ext_config;
    ext_config.kind = c.extractor;
    ext_config.d = c.d;
    ext_config.n_f = c.n_f;
    ext_config.hidden = c.hidden;
    RngStream ext_rng = rng.derive(1);
    model.extractor = init_extractor(ext_config, ext_rng);

    model.circuit = compose(build_encoder(c.n_q, c.n_f, c.axis_mode), build_ansatz(c.n_q, c.N_b));
    model.theta.resize(model.circuit.n_theta);
    RngStream theta_rng = rng.derive(2);
    for (double& t : model.theta) t = theta_rng.next_uniform(-kPi, kPi);

    if (c.head == Head::yomo) {
        model.partition = build_partition(c.n_q, c.K);
    } else if (c.observables.empty()) {
        model.observables = default_observables(c.n_q, c.K);
    } else {
        if (static_cast<int>(c.observables.size()) != c.K) {
            throw ConfigError("vanilla head needs exactly K=" + std::to_string(c.K) +
                              " observables, got " + std::to_string(c.observables.size()));
        }
        for (const std::string& text : c.observables) {
            Observable obs = parse_observable(text);
            if (static_cast<int>(obs.ops.size()) != c.n_q) {
                throw ConfigError("observable \"" + text + "\" has " +
                                  std::to_string(obs.ops.size()) + " operators, model has n_q=" +
                                  std::to_string(c.n_q));
            }
            model.observables.push_back(std::move(obs));
        }
    }
    return model;
}

std::vector<double> model_features(const Model& model, std::span<const double> x) {
    return forward(model.extractor, x);
}

std::vector<double> model_scores(const Model& model, std::span<const double> x) {
    const std::vector<double> z = forward(model.extractor, x);
    const StateVector state = execute(model.circuit, z, model.theta);
    if (model.config.head == Head::yomo) {
        return aggregate_mean(probabilities(state), model.partition);
    }
    std::vector<double> mu(model.observables.size());
    for (size_t k = 0; k < model.observables.size(); ++k) {
        mu[k] = expectation(state, model.observables[k]);
    }
    return vanilla_probs(mu);
}

BatchPrediction model_batch_prediction(const Model& model, const SampleBatch& batch,
                                       bool renormalize) {
    if (batch.inputs.size() != batch.labels.size()) {
        throw ArgumentError("batch has " + std::to_string(batch.inputs.size()) +
                            " inputs but " + std::to_string(batch.labels.size()) + " labels");
    }
    std::vector<std::vector<double>> scores;
    scores.reserve(batch.inputs.size());
    for (const std::vector<double>& x : batch.inputs) scores.push_back(model_scores(model, x));
    return make_batch_prediction(std::move(scores), batch.labels, renormalize);
}

LossBreakdown model_loss(const Model& model, const SampleBatch& batch, const LossConfig& cfg) {
    return total_loss(model_batch_prediction(model, batch, cfg.renormalize_scores), cfg);
}

int total_param_count(const Model& model) {
    return param_count(model.extractor.config) + static_cast<int>(model.theta.size());
}

}  // namespace yomo
