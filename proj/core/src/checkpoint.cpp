#include "yomo/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "yomo/errors.hpp"

namespace yomo {

namespace {

constexpr char kMagic[8] = {'Y', 'O', 'M', 'O', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

// The format is defined little-endian; serialization goes through explicit
// byte shuffling so it is identical on any host.
void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void put_f64(std::string& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(out, bits);
}

struct Reader {
    const std::string& data;
    const std::string& path;
    size_t offset = 0;

    void need(size_t n, const char* what) {
        if (data.size() - offset < n) {
            throw FormatError("\"" + path + "\": truncated at offset " + std::to_string(offset) +
                              " while reading " + what);
        }
    }
    uint32_t u32(const char* what) {
        need(4, what);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<uint32_t>(static_cast<unsigned char>(data[offset + i])) << (8 * i);
        }
        offset += 4;
        return v;
    }
    uint64_t u64(const char* what) {
        need(8, what);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<uint64_t>(static_cast<unsigned char>(data[offset + i])) << (8 * i);
        }
        offset += 8;
        return v;
    }
    double f64(const char* what) {
        const uint64_t bits = u64(what);
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
};

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::string out;
    out.append(kMagic, sizeof kMagic);
    put_u32(out, kVersion);
    put_u32(out, static_cast<uint32_t>(ckpt.config_text.size()));
    out.append(ckpt.config_text);
    put_u64(out, ckpt.extractor_params.size());
    for (double v : ckpt.extractor_params) put_f64(out, v);
    put_u64(out, ckpt.theta.size());
    for (double v : ckpt.theta) put_f64(out, v);
    put_u64(out, ckpt.history_digest);

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw FormatError("cannot write \"" + path + "\"");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw FormatError("write failed for \"" + path + "\"");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw FormatError("cannot open \"" + path + "\"");
    std::string data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    Reader reader{data, path};

    reader.need(sizeof kMagic, "magic");
    if (std::memcmp(data.data(), kMagic, sizeof kMagic) != 0) {
        throw FormatError("\"" + path + "\": bad magic at offset 0, not a model checkpoint");
    }
    reader.offset = sizeof kMagic;

    Checkpoint ckpt;
    ckpt.version = reader.u32("version");
    if (ckpt.version != kVersion) {
        throw FormatError("\"" + path + "\": unsupported format version " +
                          std::to_string(ckpt.version) + ", expected " + std::to_string(kVersion));
    }
    const uint32_t config_len = reader.u32("config length");
    reader.need(config_len, "config text");
    ckpt.config_text.assign(data, reader.offset, config_len);
    reader.offset += config_len;

    const uint64_t n_ext = reader.u64("extractor parameter count");
    ckpt.extractor_params.reserve(n_ext);
    for (uint64_t i = 0; i < n_ext; ++i) {
        ckpt.extractor_params.push_back(reader.f64("extractor parameters"));
    }
    const uint64_t n_theta = reader.u64("ansatz angle count");
    ckpt.theta.reserve(n_theta);
    for (uint64_t i = 0; i < n_theta; ++i) ckpt.theta.push_back(reader.f64("ansatz angles"));
    ckpt.history_digest = reader.u64("history digest");
    return ckpt;
}

void restore_parameters(Model& model, const Checkpoint& ckpt) {
    if (model.extractor.params.size() != ckpt.extractor_params.size()) {
        throw FormatError("checkpoint holds " + std::to_string(ckpt.extractor_params.size()) +
                          " extractor parameters but the config builds " +
                          std::to_string(model.extractor.params.size()));
    }
    if (model.theta.size() != ckpt.theta.size()) {
        throw FormatError("checkpoint holds " + std::to_string(ckpt.theta.size()) +
                          " ansatz angles but the config builds " +
                          std::to_string(model.theta.size()));
    }
    model.extractor.params = ckpt.extractor_params;
    model.theta = ckpt.theta;
}

}  // namespace yomo
