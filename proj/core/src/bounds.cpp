#include "yomo/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "yomo/errors.hpp"

namespace yomo {

namespace {

void check_probability_open(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError(std::string(what) + " must lie strictly inside (0,1), got " +
                          std::to_string(p));
    }
}

void check_margin_inputs(double margin, double lipschitz, int K) {
    if (!(margin > 0.0)) throw DomainError("margin must be positive, got " + std::to_string(margin));
    if (!(lipschitz > 0.0)) {
        throw DomainError("Lipschitz constant must be positive, got " + std::to_string(lipschitz));
    }
    if (K < 2) throw DomainError("class count K must be at least 2, got " + std::to_string(K));
}

void check_shots(long long shots) {
    if (shots < 1) throw DomainError("shot count must be at least 1, got " + std::to_string(shots));
}

long long ceil_to_count(double raw) {
    if (!(raw < 9.0e18)) throw DomainError("shot bound exceeds the representable count range");
    return static_cast<long long>(std::ceil(raw));
}

}  // namespace

long long yomo_shots(double p, double target_delta) {
    check_probability_open(target_delta, "target delta");
    check_probability_open(p, "p");
    if (p <= 0.5) throw DomainError("bound requires p > 1/2, got p = " + std::to_string(p));
    const double gap = p - 0.5;
    return ceil_to_count(std::log(1.0 / target_delta) / (2.0 * gap * gap));
}

long long vanilla_shots(double margin, double lipschitz, int K, double target_delta) {
    check_margin_inputs(margin, lipschitz, K);
    check_probability_open(target_delta, "target delta");
    const double prefactor = 8.0 * lipschitz * lipschitz / (margin * margin);
    return ceil_to_count(prefactor * std::log(2.0 * K / target_delta));
}

double yomo_error_bound(double p, long long shots) {
    check_shots(shots);
    if (!(p >= 0.5 && p < 1.0)) {
        throw DomainError("bound requires p in [1/2, 1), got p = " + std::to_string(p));
    }
    const double gap = p - 0.5;
    return std::exp(-2.0 * static_cast<double>(shots) * gap * gap);
}

double vanilla_error_bound(double margin, double lipschitz, int K, long long shots) {
    check_margin_inputs(margin, lipschitz, K);
    check_shots(shots);
    const double scaled = margin / (4.0 * lipschitz);
    const double bound =
        2.0 * K * std::exp(-2.0 * static_cast<double>(shots) * scaled * scaled);
    return std::min(1.0, bound);
}

double fewer_shots_threshold(double margin, double lipschitz, int K, double target_delta) {
    check_margin_inputs(margin, lipschitz, K);
    check_probability_open(target_delta, "target delta");
    const double ratio = std::log(1.0 / target_delta) / std::log(2.0 * K / target_delta);
    return 0.5 + margin / (4.0 * lipschitz) * std::sqrt(ratio);
}

std::optional<double> smaller_delta_threshold(double margin, double lipschitz, int K,
                                              long long shots) {
    check_margin_inputs(margin, lipschitz, K);
    check_shots(shots);
    const double scaled = margin / (4.0 * lipschitz);
    const double radicand =
        scaled * scaled - std::log(2.0 * K) / (2.0 * static_cast<double>(shots));
    if (radicand < 0.0) return std::nullopt;
    return 0.5 + std::sqrt(radicand);
}

double single_shot_threshold(double margin, double lipschitz, int K) {
    check_margin_inputs(margin, lipschitz, K);
    const double exponent = -margin * margin / (8.0 * lipschitz * lipschitz);
    return std::max(0.0, 1.0 - 2.0 * K * std::exp(exponent));
}

double majority_vote_error_exact(double p, long long shots) {
    check_probability_open(p, "p");
    check_shots(shots);
    const long long cutoff = shots / 2;  // error iff correct votes <= floor(N/2)
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double lg_n = std::lgamma(static_cast<double>(shots) + 1.0);
    std::vector<double> log_terms;
    log_terms.reserve(static_cast<size_t>(cutoff) + 1);
    double max_log = -std::numeric_limits<double>::infinity();
    for (long long k = 0; k <= cutoff; ++k) {
        const double log_term = lg_n - std::lgamma(static_cast<double>(k) + 1.0) -
                                std::lgamma(static_cast<double>(shots - k) + 1.0) +
                                static_cast<double>(k) * log_p +
                                static_cast<double>(shots - k) * log_q;
        log_terms.push_back(log_term);
        max_log = std::max(max_log, log_term);
    }
    double total = 0.0;
    for (double lt : log_terms) total += std::exp(lt - max_log);
    const double result = std::exp(max_log) * total;
    return std::min(1.0, result);
}

MarginReport measure_margin(const Model& model,
                            const std::vector<std::vector<double>>& inputs) {
    if (model.config.head != Head::vanilla) {
        throw ConfigError("margin measurement applies to the vanilla head only");
    }
    if (inputs.empty()) throw ArgumentError("margin measurement needs at least one input");
    MarginReport report;
    report.per_sample.reserve(inputs.size());
    for (const std::vector<double>& x : inputs) {
        const std::vector<double> z = forward(model.extractor, x);
        const StateVector state = execute(model.circuit, z, model.theta);
        std::vector<double> mu(model.observables.size());
        for (size_t k = 0; k < model.observables.size(); ++k) {
            mu[k] = expectation(state, model.observables[k]);
        }
        std::partial_sort(mu.begin(), mu.begin() + 2, mu.end(), std::greater<double>());
        report.per_sample.push_back(mu[0] - mu[1]);
    }
    std::vector<double> sorted = report.per_sample;
    std::sort(sorted.begin(), sorted.end());
    report.min = sorted.front();
    const size_t n = sorted.size();
    report.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    return report;
}

}  // namespace yomo
