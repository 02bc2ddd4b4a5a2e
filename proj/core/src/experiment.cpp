#include "yomo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <utility>

#include "yomo/errors.hpp"
#include "yomo/grad.hpp"

namespace yomo {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Comma-separated values, trimmed; empty input means an empty list.
std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= value.size()) {
        size_t comma = value.find(',', start);
        if (comma == std::string::npos) comma = value.size();
        std::string item = trim(value.substr(start, comma - start));
        if (!item.empty()) out.push_back(item);
        start = comma + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        out += items[i];
    }
    return out;
}

long long parse_ll(const std::string& field, const std::string& value) {
    long long v = 0;
    const char* b = value.data();
    const char* e = b + value.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || value.empty())
        throw ConfigError(field + ": expected an integer, got '" + value + "'");
    return v;
}

int parse_int(const std::string& field, const std::string& value) {
    long long v = parse_ll(field, value);
    if (v < INT_MIN || v > INT_MAX)
        throw ConfigError(field + ": value " + value + " is out of range");
    return static_cast<int>(v);
}

uint64_t parse_u64(const std::string& field, const std::string& value) {
    uint64_t v = 0;
    const char* b = value.data();
    const char* e = b + value.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || value.empty())
        throw ConfigError(field + ": expected an unsigned integer, got '" + value + "'");
    return v;
}

double parse_double(const std::string& field, const std::string& value) {
    double v = 0.0;
    const char* b = value.data();
    const char* e = b + value.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || value.empty())
        throw ConfigError(field + ": expected a number, got '" + value + "'");
    if (!std::isfinite(v)) throw ConfigError(field + ": value must be finite, got '" + value + "'");
    return v;
}

std::string head_name(Head head) { return head == Head::yomo ? "yomo" : "vanilla"; }

Head parse_head(const std::string& field, const std::string& value) {
    if (value == "yomo") return Head::yomo;
    if (value == "vanilla") return Head::vanilla;
    throw ConfigError(field + ": must be 'yomo' or 'vanilla', got '" + value + "'");
}

std::string axis_mode_name(EncoderAxisMode mode) {
    return mode == EncoderAxisMode::layer_cycle ? "layer" : "per_gate";
}

EncoderAxisMode parse_axis_mode(const std::string& field, const std::string& value) {
    if (value == "layer") return EncoderAxisMode::layer_cycle;
    if (value == "per_gate") return EncoderAxisMode::per_gate_cycle;
    throw ConfigError(field + ": must be 'layer' or 'per_gate', got '" + value + "'");
}

// One key. Type errors throw here; range coupling is validate_config's job.
void set_field(ExperimentConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value) {
    const std::string field = section + "." + key;
    auto unknown = [&]() -> void { throw ConfigError("unknown config key '" + field + "'"); };
    if (section == "model") {
        if (key == "head") cfg.model.head = parse_head(field, value);
        else if (key == "n_q") cfg.model.n_q = parse_int(field, value);
        else if (key == "N_b") cfg.model.N_b = parse_int(field, value);
        else if (key == "K") cfg.model.K = parse_int(field, value);
        else if (key == "n_f") cfg.model.n_f = parse_int(field, value);
        else if (key == "extractor") {
            try {
                cfg.model.extractor = parse_extractor_kind(value);
            } catch (const ConfigError& e) {
                throw ConfigError(field + ": " + e.what());
            }
        } else if (key == "hidden") cfg.model.hidden = parse_int(field, value);
        else if (key == "encoder_axes") cfg.model.axis_mode = parse_axis_mode(field, value);
        else if (key == "observables") cfg.model.observables = split_list(value);
        else unknown();
    } else if (section == "data") {
        if (key == "source") cfg.data.source = value;
        else if (key == "n_per_class") cfg.data.n_per_class = parse_int(field, value);
        else if (key == "spread") cfg.data.spread = parse_double(field, value);
        else if (key == "d") cfg.data.d = parse_int(field, value);
        else if (key == "n_train") cfg.data.n_train = parse_int(field, value);
        else if (key == "n_test") cfg.data.n_test = parse_int(field, value);
        else if (key == "train_images") cfg.data.train_images = value;
        else if (key == "train_labels") cfg.data.train_labels = value;
        else if (key == "test_images") cfg.data.test_images = value;
        else if (key == "test_labels") cfg.data.test_labels = value;
        else if (key == "downsample") cfg.data.downsample_side = parse_int(field, value);
        else if (key == "seed") cfg.data.seed = parse_u64(field, value);
        else unknown();
    } else if (section == "train") {
        if (key == "tau") cfg.tau = parse_double(field, value);
        else if (key == "gamma") cfg.gamma = parse_double(field, value);
        else if (key == "omega") cfg.omega = parse_double(field, value);
        else if (key == "lr") cfg.lr = parse_double(field, value);
        else if (key == "epochs") cfg.epochs = parse_int(field, value);
        else if (key == "batch") cfg.batch = parse_int(field, value);
        else unknown();
    } else if (section == "eval") {
        if (key == "shots") {
            std::vector<Shots> shots;
            for (const std::string& item : split_list(value)) {
                try {
                    shots.push_back(parse_shots(item));
                } catch (const ConfigError& e) {
                    throw ConfigError(field + ": " + e.what());
                }
            }
            cfg.shots = std::move(shots);
        } else if (key == "noise") cfg.noise = split_list(value);
        else if (key == "noise_p1") cfg.noise_p1 = parse_double(field, value);
        else if (key == "noise_p2") cfg.noise_p2 = parse_double(field, value);
        else if (key == "trajectories") cfg.trajectories = parse_int(field, value);
        else if (key == "repeats") cfg.repeats = parse_int(field, value);
        else if (key == "seeds") {
            std::vector<uint64_t> seeds;
            for (const std::string& item : split_list(value)) seeds.push_back(parse_u64(field, item));
            cfg.seeds = std::move(seeds);
        } else unknown();
    } else if (section == "output") {
        if (key == "dir") cfg.out_dir = value;
        else unknown();
    } else {
        throw ConfigError("unknown config section '" + section + "'");
    }
}

// Every out-of-range field is rejected with its name in the message.
void validate_config(const ExperimentConfig& cfg) {
    const ModelConfig& m = cfg.model;
    auto bad = [](const std::string& msg) -> void { throw ConfigError(msg); };
    if (m.n_q < 1 || m.n_q > 20)
        bad("model.n_q must be in [1, 20], got " + std::to_string(m.n_q));
    if (m.N_b < 1) bad("model.N_b must be at least 1, got " + std::to_string(m.N_b));
    if (m.K < 2) bad("model.K must be at least 2, got " + std::to_string(m.K));
    if (m.n_f < 0) bad("model.n_f must be non-negative, got " + std::to_string(m.n_f));
    if (m.hidden < 0) bad("model.hidden must be non-negative, got " + std::to_string(m.hidden));
    if (m.extractor == ExtractorKind::mlp1 && m.hidden < 1)
        bad("model.hidden must be at least 1 for the mlp1 extractor");
    if (m.head == Head::yomo && static_cast<long long>(m.K) > (1LL << m.n_q))
        bad("model.K (" + std::to_string(m.K) + ") exceeds the 2^n_q = " +
            std::to_string(1LL << m.n_q) + " basis states available to the yomo head");

    const DataSpec& d = cfg.data;
    if (d.source != "synth_blobs" && d.source != "synth_digits" && d.source != "idx")
        bad("data.source must be one of synth_blobs, synth_digits, idx; got '" + d.source + "'");
    if (d.n_per_class < 1)
        bad("data.n_per_class must be at least 1, got " + std::to_string(d.n_per_class));
    if (!(d.spread >= 0.0)) bad("data.spread must be non-negative");
    if (d.d < 1) bad("data.d must be at least 1, got " + std::to_string(d.d));
    if (d.n_train < 1) bad("data.n_train must be at least 1, got " + std::to_string(d.n_train));
    if (d.n_test < 1) bad("data.n_test must be at least 1, got " + std::to_string(d.n_test));
    if (d.downsample_side < 0)
        bad("data.downsample must be non-negative, got " + std::to_string(d.downsample_side));
    if (d.source == "idx") {
        if (d.train_images.empty()) bad("data.train_images is required when data.source = idx");
        if (d.train_labels.empty()) bad("data.train_labels is required when data.source = idx");
        if (d.test_images.empty()) bad("data.test_images is required when data.source = idx");
        if (d.test_labels.empty()) bad("data.test_labels is required when data.source = idx");
    }

    if (!(cfg.tau > 0.0 && cfg.tau < 1.0)) bad("train.tau must be in (0, 1)");
    if (!(cfg.gamma >= 0.0)) bad("train.gamma must be non-negative");
    if (!(cfg.omega >= 0.0)) bad("train.omega must be non-negative");
    if (!(cfg.lr > 0.0)) bad("train.lr must be positive");
    if (cfg.epochs < 1) bad("train.epochs must be at least 1, got " + std::to_string(cfg.epochs));
    if (cfg.batch < 1) bad("train.batch must be at least 1, got " + std::to_string(cfg.batch));

    if (cfg.shots.empty()) bad("eval.shots needs at least one entry");
    if (cfg.noise.empty()) bad("eval.noise needs at least one entry");
    for (const std::string& name : cfg.noise) {
        if (name == "none" || name == "custom") continue;
        try {
            preset_by_name(name);
        } catch (const ConfigError& e) {
            throw ConfigError("eval.noise: " + std::string(e.what()));
        }
    }
    if (!(cfg.noise_p1 >= 0.0 && cfg.noise_p1 <= 1.0)) bad("eval.noise_p1 must be in [0, 1]");
    if (!(cfg.noise_p2 >= 0.0 && cfg.noise_p2 <= 1.0)) bad("eval.noise_p2 must be in [0, 1]");
    if (cfg.trajectories < 1)
        bad("eval.trajectories must be at least 1, got " + std::to_string(cfg.trajectories));
    if (cfg.repeats < 1) bad("eval.repeats must be at least 1, got " + std::to_string(cfg.repeats));
    if (cfg.seeds.empty()) bad("eval.seeds needs at least one entry");

    if (cfg.out_dir.empty()) bad("output.dir must not be empty");
}

std::string timestamp_utc() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw FormatError("write failed for '" + path + "'");
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw FormatError("cannot create output directory '" + dir + "': " + ec.message());
}

// One evaluation row in the module-`inference` schema. `cfg` must carry the
// resolved model config so the run id is stable.
std::string eval_row(const ExperimentConfig& cfg, const Model& model, const AccuracyReport& rep,
                     const std::string& noise_name, const Shots& shots, uint64_t seed) {
    std::ostringstream row;
    row << run_id(cfg, seed) << ',' << head_name(model.config.head) << ',' << model.config.n_q
        << ',' << model.config.N_b << ',' << format_double(cfg.tau) << ',' << noise_name << ','
        << format_shots(shots) << ',' << rep.repeats << ',' << format_double(rep.mean) << ','
        << format_double(rep.std_err) << ',' << seed;
    return row.str();
}

// All (noise, shots) rows for one trained model and seed.
std::vector<std::string> eval_rows(const ExperimentConfig& cfg, const Model& model,
                                   const Dataset& test_ds, uint64_t seed) {
    ExperimentConfig resolved = cfg;
    resolved.model = model.config;
    std::vector<std::string> rows;
    for (const std::string& name : cfg.noise) {
        std::optional<NoiseModel> nm = resolve_noise(cfg, name);
        for (const Shots& shots : cfg.shots) {
            NoiseEvalConfig ncfg{cfg.trajectories, RngStream(seed).derive(7).next_u64()};
            AccuracyReport rep = evaluate_accuracy(model, test_ds, shots, nm ? &*nm : nullptr,
                                                   ncfg, cfg.repeats, seed);
            rows.push_back(eval_row(resolved, model, rep, name, shots, seed));
        }
    }
    return rows;
}

ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis,
                            const std::string& value) {
    ExperimentConfig cfg = base;
    if (axis == "shots") set_field(cfg, "eval", "shots", value);
    else if (axis == "noise") set_field(cfg, "eval", "noise", value);
    else if (axis == "n_q") set_field(cfg, "model", "n_q", value);
    else if (axis == "N_b") set_field(cfg, "model", "N_b", value);
    else if (axis == "tau") set_field(cfg, "train", "tau", value);
    else throw ConfigError("unknown sweep axis '" + axis +
                           "' (valid: shots, n_q, N_b, tau, noise)");
    validate_config(cfg);
    return cfg;
}

std::string join_fields(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    return out;
}

// CSV cells must stay comma-free; error messages swap them out.
std::string sanitize_cell(std::string text) {
    std::replace(text.begin(), text.end(), ',', ';');
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

std::string sweep_failure_row(const std::string& axis, const std::string& value,
                              const std::string& message, uint64_t seed) {
    std::vector<std::string> fields(14);
    fields[0] = axis;
    fields[1] = value;
    fields[2] = "error: " + sanitize_cell(message);
    fields[13] = std::to_string(seed);
    return join_fields(fields);
}

}  // namespace

uint64_t fnv1a64(const void* data, size_t size, uint64_t seed) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t cut = line.find_first_of("#;");
        if (cut != std::string::npos) line.erase(cut);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "config line " + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where + ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "data" && section != "train" &&
                section != "eval" && section != "output")
                throw ConfigError(where + ": unknown config section '" + section + "'");
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (section.empty())
            throw ConfigError(where + ": key '" + key + "' appears before any [section]");
        set_field(cfg, section, key, value);
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "[model]\n";
    out << "head = " << head_name(cfg.model.head) << "\n";
    out << "n_q = " << cfg.model.n_q << "\n";
    out << "N_b = " << cfg.model.N_b << "\n";
    out << "K = " << cfg.model.K << "\n";
    out << "n_f = " << cfg.model.n_f << "\n";
    out << "extractor = " << format_extractor_kind(cfg.model.extractor) << "\n";
    out << "hidden = " << cfg.model.hidden << "\n";
    out << "encoder_axes = " << axis_mode_name(cfg.model.axis_mode) << "\n";
    out << "observables = " << join(cfg.model.observables) << "\n";
    out << "\n[data]\n";
    out << "source = " << cfg.data.source << "\n";
    out << "n_per_class = " << cfg.data.n_per_class << "\n";
    out << "spread = " << format_double(cfg.data.spread) << "\n";
    out << "d = " << cfg.data.d << "\n";
    out << "n_train = " << cfg.data.n_train << "\n";
    out << "n_test = " << cfg.data.n_test << "\n";
    out << "train_images = " << cfg.data.train_images << "\n";
    out << "train_labels = " << cfg.data.train_labels << "\n";
    out << "test_images = " << cfg.data.test_images << "\n";
    out << "test_labels = " << cfg.data.test_labels << "\n";
    out << "downsample = " << cfg.data.downsample_side << "\n";
    out << "seed = " << cfg.data.seed << "\n";
    out << "\n[train]\n";
    out << "tau = " << format_double(cfg.tau) << "\n";
    out << "gamma = " << format_double(cfg.gamma) << "\n";
    out << "omega = " << format_double(cfg.omega) << "\n";
    out << "lr = " << format_double(cfg.lr) << "\n";
    out << "epochs = " << cfg.epochs << "\n";
    out << "batch = " << cfg.batch << "\n";
    out << "\n[eval]\n";
    std::vector<std::string> shot_items;
    for (const Shots& s : cfg.shots) shot_items.push_back(format_shots(s));
    out << "shots = " << join(shot_items) << "\n";
    out << "noise = " << join(cfg.noise) << "\n";
    out << "noise_p1 = " << format_double(cfg.noise_p1) << "\n";
    out << "noise_p2 = " << format_double(cfg.noise_p2) << "\n";
    out << "trajectories = " << cfg.trajectories << "\n";
    out << "repeats = " << cfg.repeats << "\n";
    std::vector<std::string> seed_items;
    for (uint64_t s : cfg.seeds) seed_items.push_back(std::to_string(s));
    out << "seeds = " << join(seed_items) << "\n";
    out << "\n[output]\n";
    out << "dir = " << cfg.out_dir << "\n";
    return out.str();
}

void apply_override(ExperimentConfig& cfg, const std::string& dotted_key,
                    const std::string& value) {
    size_t dot = dotted_key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= dotted_key.size())
        throw ConfigError("override key must look like section.key, got '" + dotted_key + "'");
    set_field(cfg, dotted_key.substr(0, dot), dotted_key.substr(dot + 1), value);
}

LossConfig loss_config(const ExperimentConfig& cfg) {
    LossConfig lc;
    lc.tau = cfg.tau;
    lc.gamma = cfg.gamma;
    lc.omega = cfg.omega;
    lc.head = cfg.model.head;
    return lc;
}

std::optional<NoiseModel> resolve_noise(const ExperimentConfig& cfg, const std::string& name) {
    if (name == "none") return std::nullopt;
    if (name == "custom") {
        if (!(cfg.noise_p1 >= 0.0 && cfg.noise_p1 <= 1.0))
            throw ConfigError("eval.noise_p1 must be in [0, 1]");
        if (!(cfg.noise_p2 >= 0.0 && cfg.noise_p2 <= 1.0))
            throw ConfigError("eval.noise_p2 must be in [0, 1]");
        return NoiseModel{"custom", cfg.noise_p1, cfg.noise_p2};
    }
    return preset_by_name(name);
}

std::pair<Dataset, Dataset> load_datasets(const DataSpec& data, int K_for_blobs) {
    std::pair<Dataset, Dataset> pair;
    if (data.source == "synth_blobs") {
        pair = synth_blobs(K_for_blobs, data.d, data.n_per_class, data.spread, data.seed);
    } else if (data.source == "synth_digits") {
        pair = synth_digits(data.n_train, data.n_test, data.seed);
    } else if (data.source == "idx") {
        Dataset train = load_idx(data.train_images, data.train_labels);
        Dataset test = load_idx(data.test_images, data.test_labels);
        train.split = "train";
        test.split = "test";
        int K = std::max(train.K, test.K);
        train.K = K;
        test.K = K;
        pair = {std::move(train), std::move(test)};
    } else {
        throw ConfigError("data.source must be one of synth_blobs, synth_digits, idx; got '" +
                          data.source + "'");
    }
    if (data.downsample_side > 0) {
        pair.first = downsample(pair.first, data.downsample_side);
        pair.second = downsample(pair.second, data.downsample_side);
    }
    return pair;
}

std::string run_id(const ExperimentConfig& cfg, uint64_t seed) {
    // The output directory names where results go, not what the run is;
    // normalize it so relocating a run keeps its identity.
    ExperimentConfig keyed = cfg;
    keyed.out_dir = "out";
    std::string text = serialize_config(keyed);
    uint64_t h = fnv1a64(text.data(), text.size());
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((seed >> (8 * i)) & 0xff);
    h = fnv1a64(bytes, sizeof bytes, h);
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TrainOutput train_model(const ExperimentConfig& cfg, uint64_t seed) {
    validate_config(cfg);
    auto [train_ds, test_ds] = load_datasets(cfg.data, cfg.model.K);
    if (train_ds.K != cfg.model.K)
        throw ConfigError("model.K (" + std::to_string(cfg.model.K) +
                          ") does not match the dataset's class count (" +
                          std::to_string(train_ds.K) + ")");

    ModelConfig mc = cfg.model;
    mc.d = train_ds.d();
    RngStream root(seed);
    Model model = build_model(mc, root);
    LossConfig lc = loss_config(cfg);

    const size_t n_ext = model.extractor.params.size();
    const size_t n_theta = model.theta.size();
    std::vector<double> params(n_ext + n_theta);
    std::copy(model.extractor.params.begin(), model.extractor.params.end(), params.begin());
    std::copy(model.theta.begin(), model.theta.end(), params.begin() + n_ext);
    AdamState adam = make_adam_state(params.size(), cfg.lr);

    SampleBatch test_batch{test_ds.inputs, test_ds.labels};
    std::vector<double> grads(params.size());

    TrainOutput out;
    out.history.reserve(static_cast<size_t>(cfg.epochs));
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        uint64_t epoch_seed =
            root.derive({3ULL, static_cast<uint64_t>(epoch)}).next_u64();
        LossBreakdown sum;
        long long seen = 0;
        for (const std::vector<int>& idx : batches(train_ds, cfg.batch, epoch_seed)) {
            SampleBatch batch;
            batch.inputs.reserve(idx.size());
            batch.labels.reserve(idx.size());
            for (int i : idx) {
                batch.inputs.push_back(train_ds.inputs[static_cast<size_t>(i)]);
                batch.labels.push_back(train_ds.labels[static_cast<size_t>(i)]);
            }
            GradientBundle g = backprop_gradients(model, batch, lc);
            const double w = static_cast<double>(idx.size());
            sum.ce += g.loss.ce * w;
            sum.ps += g.loss.ps * w;
            sum.entropy += g.loss.entropy * w;
            sum.total += g.loss.total * w;
            seen += static_cast<long long>(idx.size());
            std::copy(g.d_theta_c.begin(), g.d_theta_c.end(), grads.begin());
            std::copy(g.d_theta.begin(), g.d_theta.end(), grads.begin() + n_ext);
            adam_step(adam, params, grads);
            std::copy(params.begin(), params.begin() + n_ext, model.extractor.params.begin());
            std::copy(params.begin() + n_ext, params.end(), model.theta.begin());
        }
        EpochRecord rec;
        rec.epoch = epoch;
        const double inv = 1.0 / static_cast<double>(seen);
        rec.train_loss = {sum.ce * inv, sum.ps * inv, sum.entropy * inv, sum.total * inv};
        rec.test_loss = model_loss(model, test_batch, lc).total;
        out.history.push_back(rec);
    }

    uint64_t digest = 0xcbf29ce484222325ULL;
    for (const EpochRecord& rec : out.history) {
        const double vals[5] = {rec.train_loss.ce, rec.train_loss.ps, rec.train_loss.entropy,
                                rec.train_loss.total, rec.test_loss};
        digest = fnv1a64(vals, sizeof vals, digest);
    }
    out.history_digest = digest;
    out.model = std::move(model);
    out.train_ds = std::move(train_ds);
    out.test_ds = std::move(test_ds);
    return out;
}

TrainPaths run_train(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const uint64_t seed = cfg.seeds.front();
    TrainOutput out = train_model(cfg, seed);

    ExperimentConfig resolved = cfg;
    resolved.model = out.model.config;
    const std::string id = run_id(resolved, seed);
    ensure_dir(cfg.out_dir);

    TrainPaths paths;
    paths.checkpoint = cfg.out_dir + "/model_" + id + ".ckpt";
    Checkpoint ckpt;
    ckpt.config_text = serialize_config(resolved);
    ckpt.extractor_params = out.model.extractor.params;
    ckpt.theta = out.model.theta;
    ckpt.history_digest = out.history_digest;
    save_checkpoint(paths.checkpoint, ckpt);

    std::ostringstream csv;
    csv << "# yomo train " << timestamp_utc() << "\n";
    csv << loss_trace_csv_header() << "\n";
    for (const EpochRecord& rec : out.history) {
        csv << rec.epoch << ',' << format_double(rec.train_loss.ce) << ','
            << format_double(rec.train_loss.ps) << ',' << format_double(rec.train_loss.entropy)
            << ',' << format_double(rec.train_loss.total) << ',' << format_double(rec.test_loss)
            << "\n";
    }
    paths.loss_csv = cfg.out_dir + "/loss_" + id + ".csv";
    write_text_file(paths.loss_csv, csv.str());
    return paths;
}

ExperimentConfig checkpoint_config(const std::string& checkpoint_path) {
    return parse_config_text(load_checkpoint(checkpoint_path).config_text);
}

std::string run_eval(const std::string& checkpoint_path, const ExperimentConfig& cfg) {
    validate_config(cfg);
    Checkpoint ckpt = load_checkpoint(checkpoint_path);

    auto [train_ds, test_ds] = load_datasets(cfg.data, cfg.model.K);
    (void)train_ds;
    if (test_ds.K != cfg.model.K)
        throw ConfigError("model.K (" + std::to_string(cfg.model.K) +
                          ") does not match the dataset's class count (" +
                          std::to_string(test_ds.K) + ")");
    ModelConfig mc = cfg.model;
    mc.d = test_ds.d();
    RngStream root(cfg.seeds.front());
    Model model = build_model(mc, root);
    restore_parameters(model, ckpt);

    std::ostringstream csv;
    csv << "# yomo eval " << timestamp_utc() << "\n";
    csv << eval_csv_header() << "\n";
    for (uint64_t seed : cfg.seeds)
        for (const std::string& row : eval_rows(cfg, model, test_ds, seed)) csv << row << "\n";

    ensure_dir(cfg.out_dir);
    const std::string path =
        cfg.out_dir + "/eval_" + run_id(cfg, cfg.seeds.front()) + ".csv";
    write_text_file(path, csv.str());
    return path;
}

std::string run_sweep(const ExperimentConfig& base, const std::string& axis,
                      const std::vector<std::string>& values, int threads) {
    validate_config(base);
    if (values.empty()) throw ConfigError("sweep needs at least one axis value");
    if (threads < 1) throw ConfigError("threads must be at least 1, got " + std::to_string(threads));
    const bool retrain = (axis == "n_q" || axis == "N_b" || axis == "tau");
    if (!retrain && axis != "shots" && axis != "noise")
        throw ConfigError("unknown sweep axis '" + axis +
                          "' (valid: shots, n_q, N_b, tau, noise)");

    const size_t V = values.size();
    const size_t S = base.seeds.size();

    // Per-value configs; a bad value becomes failure rows, not a dead sweep.
    std::vector<ExperimentConfig> value_cfgs(V);
    std::vector<std::string> value_errors(V);
    for (size_t v = 0; v < V; ++v) {
        try {
            value_cfgs[v] = apply_axis(base, axis, values[v]);
        } catch (const std::exception& e) {
            value_errors[v] = e.what();
        }
    }

    // blocks[v * S + s] holds the finished rows of one (value, seed) cell.
    std::vector<std::vector<std::string>> blocks(V * S);

    auto run_retrain_cell = [&](size_t v, size_t s) {
        const uint64_t seed = base.seeds[s];
        if (!value_errors[v].empty()) {
            blocks[v * S + s] = {sweep_failure_row(axis, values[v], value_errors[v], seed)};
            return;
        }
        try {
            TrainOutput out = train_model(value_cfgs[v], seed);
            std::vector<std::string> rows;
            for (const std::string& row : eval_rows(value_cfgs[v], out.model, out.test_ds, seed))
                rows.push_back(axis + "," + values[v] + ",ok," + row);
            blocks[v * S + s] = std::move(rows);
        } catch (const std::exception& e) {
            blocks[v * S + s] = {sweep_failure_row(axis, values[v], e.what(), seed)};
        }
    };

    auto run_reuse_cell = [&](size_t s) {
        const uint64_t seed = base.seeds[s];
        TrainOutput out;
        try {
            out = train_model(base, seed);
        } catch (const std::exception& e) {
            for (size_t v = 0; v < V; ++v)
                blocks[v * S + s] = {sweep_failure_row(axis, values[v], e.what(), seed)};
            return;
        }
        for (size_t v = 0; v < V; ++v) {
            if (!value_errors[v].empty()) {
                blocks[v * S + s] = {sweep_failure_row(axis, values[v], value_errors[v], seed)};
                continue;
            }
            try {
                std::vector<std::string> rows;
                for (const std::string& row :
                     eval_rows(value_cfgs[v], out.model, out.test_ds, seed))
                    rows.push_back(axis + "," + values[v] + ",ok," + row);
                blocks[v * S + s] = std::move(rows);
            } catch (const std::exception& e) {
                blocks[v * S + s] = {sweep_failure_row(axis, values[v], e.what(), seed)};
            }
        }
    };

    const size_t n_items = retrain ? V * S : S;
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t item = next.fetch_add(1);
            if (item >= n_items) return;
            if (retrain) run_retrain_cell(item / S, item % S);
            else run_reuse_cell(item);
        }
    };
    const size_t pool_size = std::min<size_t>(static_cast<size_t>(threads), n_items);
    if (pool_size <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(pool_size);
        for (size_t t = 0; t < pool_size; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    std::ostringstream csv;
    csv << "# yomo sweep " << timestamp_utc() << "\n";
    csv << "axis,axis_value,status," << eval_csv_header() << "\n";
    for (size_t v = 0; v < V; ++v)
        for (size_t s = 0; s < S; ++s)
            for (const std::string& row : blocks[v * S + s]) csv << row << "\n";

    ensure_dir(base.out_dir);
    const std::string path = base.out_dir + "/sweep_" + axis + "_" +
                             run_id(base, base.seeds.front()) + ".csv";
    write_text_file(path, csv.str());
    return path;
}

std::string bounds_table(const BoundInputs& in) {
    std::ostringstream out;
    out << "quantity,value\n";
    auto row = [&](const std::string& quantity, const std::string& value) {
        out << quantity << ',' << value << "\n";
    };
    row("input_p", format_double(in.p));
    row("input_margin", format_double(in.margin));
    row("input_lipschitz", format_double(in.lipschitz));
    row("input_K", std::to_string(in.K));
    row("input_target_delta", format_double(in.target_delta));
    row("input_shots", std::to_string(in.shots));
    row("shots_for_target_delta_yomo", std::to_string(yomo_shots(in.p, in.target_delta)));
    row("shots_for_target_delta_vanilla",
        std::to_string(vanilla_shots(in.margin, in.lipschitz, in.K, in.target_delta)));
    row("error_bound_yomo", format_double(yomo_error_bound(in.p, in.shots)));
    row("error_bound_vanilla",
        format_double(vanilla_error_bound(in.margin, in.lipschitz, in.K, in.shots)));
    row("single_shot_error_bound_yomo", format_double(yomo_error_bound(in.p, 1)));
    row("single_shot_error_bound_vanilla",
        format_double(vanilla_error_bound(in.margin, in.lipschitz, in.K, 1)));
    row("exact_majority_vote_error", format_double(majority_vote_error_exact(in.p, in.shots)));
    row("fewer_shots_threshold_p",
        format_double(fewer_shots_threshold(in.margin, in.lipschitz, in.K, in.target_delta)));
    std::optional<double> p_star =
        smaller_delta_threshold(in.margin, in.lipschitz, in.K, in.shots);
    row("smaller_delta_threshold_p", p_star ? format_double(*p_star) : "vacuous");
    row("single_shot_threshold_p",
        format_double(single_shot_threshold(in.margin, in.lipschitz, in.K)));
    return out.str();
}

std::string run_bounds(const BoundInputs& inputs, const std::string& out_dir) {
    if (out_dir.empty()) throw ConfigError("output.dir must not be empty");
    ensure_dir(out_dir);
    std::string csv = "# yomo bounds " + timestamp_utc() + "\n" + bounds_table(inputs);
    const std::string path = out_dir + "/bounds.csv";
    write_text_file(path, csv);
    return path;
}

}  // namespace yomo
