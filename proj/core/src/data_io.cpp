#include "yomo/data_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "yomo/errors.hpp"

namespace yomo {

namespace {

constexpr uint32_t kImageMagic = 0x00000803;
constexpr uint32_t kLabelMagic = 0x00000801;

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open \"" + path + "\"");
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    return data;
}

uint32_t read_be32(const std::vector<uint8_t>& data, size_t offset, const std::string& path) {
    if (data.size() < offset + 4) {
        throw FormatError("\"" + path + "\": truncated at offset " + std::to_string(offset));
    }
    return (static_cast<uint32_t>(data[offset]) << 24) |
           (static_cast<uint32_t>(data[offset + 1]) << 16) |
           (static_cast<uint32_t>(data[offset + 2]) << 8) | static_cast<uint32_t>(data[offset + 3]);
}

void write_be32(std::ofstream& out, uint32_t value) {
    const char bytes[4] = {static_cast<char>(value >> 24), static_cast<char>(value >> 16),
                           static_cast<char>(value >> 8), static_cast<char>(value)};
    out.write(bytes, 4);
}

std::string format_magic(uint32_t magic) {
    char text[16];
    std::snprintf(text, sizeof text, "0x%08x", magic);
    return text;
}

// Seven-segment layout in a unit glyph frame (x right, y down). Segment
// order: A top, B top-right, C bottom-right, D bottom, E bottom-left,
// F top-left, G middle.
struct SegmentBox {
    double x0, y0, x1, y1;
};

// Bit k set means segment k is lit for that digit.
constexpr int kDigitSegments[10] = {
    0b0111111,  // 0: A B C D E F
    0b0000110,  // 1: B C
    0b1011011,  // 2: A B D E G
    0b1001111,  // 3: A B C D G
    0b1100110,  // 4: B C F G
    0b1101101,  // 5: A C D F G
    0b1111101,  // 6: A C D E F G
    0b0000111,  // 7: A B C
    0b1111111,  // 8: all
    0b1101111,  // 9: A B C D F G
};

std::array<SegmentBox, 7> segment_boxes(double th) {
    return {{
        {0.15, 0.05, 0.85, 0.05 + th},        // A
        {0.85 - th, 0.08, 0.85, 0.50},        // B
        {0.85 - th, 0.50, 0.85, 0.92},        // C
        {0.15, 0.95 - th, 0.85, 0.95},        // D
        {0.15, 0.50, 0.15 + th, 0.92},        // E
        {0.15, 0.08, 0.15 + th, 0.50},        // F
        {0.15, 0.50 - th / 2, 0.85, 0.50 + th / 2},  // G
    }};
}

std::vector<double> render_digit(int digit, RngStream& rng) {
    constexpr int kSide = 28;
    const double dx = rng.next_uniform(-1.5, 1.5);
    const double dy = rng.next_uniform(-1.5, 1.5);
    const double scale = rng.next_uniform(0.85, 1.05) * 20.0;  // glyph box in pixels
    const double angle = rng.next_uniform(-0.12, 0.12);
    const double thickness = rng.next_uniform(0.14, 0.20);
    const double intensity = rng.next_uniform(0.75, 1.0);
    const double cos_a = std::cos(angle);
    const double sin_a = std::sin(angle);
    const double cx = kSide / 2.0 + dx;
    const double cy = kSide / 2.0 + dy;
    const auto boxes = segment_boxes(thickness);
    const int mask = kDigitSegments[digit];

    std::vector<double> pixels(kSide * kSide, 0.0);
    for (int py = 0; py < kSide; ++py) {
        for (int px = 0; px < kSide; ++px) {
            // Map the pixel center back into the unit glyph frame.
            const double rx = (px + 0.5) - cx;
            const double ry = (py + 0.5) - cy;
            const double gx = (cos_a * rx + sin_a * ry) / scale + 0.5;
            const double gy = (-sin_a * rx + cos_a * ry) / scale + 0.5;
            double value = 0.0;
            if (gx >= 0.0 && gx <= 1.0 && gy >= 0.0 && gy <= 1.0) {
                for (int s = 0; s < 7; ++s) {
                    if ((mask >> s & 1) == 0) continue;
                    const SegmentBox& b = boxes[s];
                    if (gx >= b.x0 && gx <= b.x1 && gy >= b.y0 && gy <= b.y1) {
                        value = intensity;
                        break;
                    }
                }
            }
            value += 0.08 * rng.next_normal();
            pixels[py * kSide + px] = std::min(1.0, std::max(0.0, value));
        }
    }
    return pixels;
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const std::vector<uint8_t> img = read_file(images_path);
    const uint32_t img_magic = read_be32(img, 0, images_path);
    if (img_magic != kImageMagic) {
        throw FormatError("\"" + images_path + "\": bad magic " + format_magic(img_magic) +
                          " at offset 0, expected " + format_magic(kImageMagic));
    }
    const uint32_t count = read_be32(img, 4, images_path);
    const uint32_t rows = read_be32(img, 8, images_path);
    const uint32_t cols = read_be32(img, 12, images_path);
    const size_t pixel_bytes = static_cast<size_t>(count) * rows * cols;
    if (img.size() < 16 + pixel_bytes) {
        throw FormatError("\"" + images_path + "\": truncated at offset " +
                          std::to_string(img.size()) + ", need " +
                          std::to_string(16 + pixel_bytes) + " bytes");
    }

    const std::vector<uint8_t> lab = read_file(labels_path);
    const uint32_t lab_magic = read_be32(lab, 0, labels_path);
    if (lab_magic != kLabelMagic) {
        throw FormatError("\"" + labels_path + "\": bad magic " + format_magic(lab_magic) +
                          " at offset 0, expected " + format_magic(kLabelMagic));
    }
    const uint32_t lab_count = read_be32(lab, 4, labels_path);
    if (lab_count != count) {
        throw FormatError("\"" + labels_path + "\": has " + std::to_string(lab_count) +
                          " labels but \"" + images_path + "\" has " + std::to_string(count) +
                          " images");
    }
    if (lab.size() < 8 + static_cast<size_t>(count)) {
        throw FormatError("\"" + labels_path + "\": truncated at offset " +
                          std::to_string(lab.size()));
    }

    Dataset ds;
    ds.inputs.reserve(count);
    ds.labels.reserve(count);
    const size_t d = static_cast<size_t>(rows) * cols;
    int max_label = 0;
    for (uint32_t i = 0; i < count; ++i) {
        std::vector<double> pixels(d);
        const size_t base = 16 + static_cast<size_t>(i) * d;
        for (size_t j = 0; j < d; ++j) pixels[j] = img[base + j] / 255.0;
        ds.inputs.push_back(std::move(pixels));
        const int label = lab[8 + i];
        ds.labels.push_back(label);
        max_label = std::max(max_label, label);
    }
    ds.K = max_label + 1;
    return ds;
}

void save_idx(const Dataset& ds, const std::string& images_path,
              const std::string& labels_path) {
    const int d = ds.d();
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d))));
    const bool square = side * side == d;
    const uint32_t rows = square ? side : 1;
    const uint32_t cols = square ? side : d;

    std::ofstream img(images_path, std::ios::binary);
    if (!img) throw FormatError("cannot write \"" + images_path + "\"");
    write_be32(img, kImageMagic);
    write_be32(img, static_cast<uint32_t>(ds.size()));
    write_be32(img, rows);
    write_be32(img, cols);
    for (const std::vector<double>& input : ds.inputs) {
        if (static_cast<int>(input.size()) != d) {
            throw ArgumentError("dataset rows have inconsistent dimensions");
        }
        for (double v : input) {
            const long q = std::lround(std::min(1.0, std::max(0.0, v)) * 255.0);
            const char byte = static_cast<char>(static_cast<unsigned char>(q));
            img.write(&byte, 1);
        }
    }
    if (!img) throw FormatError("write failed for \"" + images_path + "\"");

    std::ofstream lab(labels_path, std::ios::binary);
    if (!lab) throw FormatError("cannot write \"" + labels_path + "\"");
    write_be32(lab, kLabelMagic);
    write_be32(lab, static_cast<uint32_t>(ds.size()));
    for (int label : ds.labels) {
        if (label < 0 || label > 255) {
            throw ArgumentError("label " + std::to_string(label) + " does not fit in a byte");
        }
        const char byte = static_cast<char>(static_cast<unsigned char>(label));
        lab.write(&byte, 1);
    }
    if (!lab) throw FormatError("write failed for \"" + labels_path + "\"");
}

Dataset downsample(const Dataset& ds, int side) {
    if (side < 1) throw ArgumentError("target side must be positive");
    const int d = ds.d();
    const int side_in = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d))));
    if (side_in * side_in != d) {
        throw ArgumentError("downsample needs square images, got dimension " + std::to_string(d));
    }
    if (side_in % side != 0) {
        throw ArgumentError("target side " + std::to_string(side) + " does not divide " +
                            std::to_string(side_in));
    }
    const int factor = side_in / side;
    const double inv_area = 1.0 / (factor * factor);
    Dataset out;
    out.K = ds.K;
    out.split = ds.split;
    out.labels = ds.labels;
    out.inputs.reserve(ds.inputs.size());
    for (const std::vector<double>& input : ds.inputs) {
        std::vector<double> small(static_cast<size_t>(side) * side, 0.0);
        for (int by = 0; by < side; ++by) {
            for (int bx = 0; bx < side; ++bx) {
                double total = 0.0;
                for (int y = by * factor; y < (by + 1) * factor; ++y) {
                    for (int x = bx * factor; x < (bx + 1) * factor; ++x) {
                        total += input[static_cast<size_t>(y) * side_in + x];
                    }
                }
                small[static_cast<size_t>(by) * side + bx] = total * inv_area;
            }
        }
        out.inputs.push_back(std::move(small));
    }
    return out;
}

std::pair<Dataset, Dataset> synth_blobs(int K, int d, int n_per_class, double spread,
                                        uint64_t seed) {
    if (K < 2) throw ConfigError("synth blobs need at least 2 classes, got " + std::to_string(K));
    if (d < 1) throw ConfigError("synth blobs need a positive dimension");
    if (n_per_class < 1) throw ConfigError("synth blobs need at least one sample per class");
    if (spread < 0.0) throw ConfigError("spread must be non-negative");

    RngStream root(seed);
    const int n_train = n_per_class * 4 / 5;
    auto draw = [&](int k, int j) {
        RngStream rng = root.derive({static_cast<uint64_t>(k), static_cast<uint64_t>(j)});
        const int axis = k % d;
        const double magnitude = 1.0 + k / d;
        std::vector<double> x(d);
        for (int i = 0; i < d; ++i) {
            const double center = i == axis ? magnitude : 0.0;
            x[i] = std::min(1.0, std::max(0.0, center + spread * rng.next_normal()));
        }
        return x;
    };

    Dataset train;
    train.K = K;
    train.split = "train";
    Dataset test;
    test.K = K;
    test.split = "test";
    for (int j = 0; j < n_per_class; ++j) {
        for (int k = 0; k < K; ++k) {
            Dataset& target = j < n_train ? train : test;
            target.inputs.push_back(draw(k, j));
            target.labels.push_back(k);
        }
    }
    return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> synth_digits(int n_train, int n_test, uint64_t seed) {
    if (n_train < 1 || n_test < 1) throw ConfigError("digit sets need at least one sample each");
    RngStream root(seed);
    auto make = [&](int n, uint64_t tag, const char* split) {
        Dataset ds;
        ds.K = 10;
        ds.split = split;
        ds.inputs.reserve(n);
        ds.labels.reserve(n);
        for (int i = 0; i < n; ++i) {
            const int digit = i % 10;
            RngStream rng = root.derive({tag, static_cast<uint64_t>(i)});
            ds.inputs.push_back(render_digit(digit, rng));
            ds.labels.push_back(digit);
        }
        return ds;
    };
    return {make(n_train, 0, "train"), make(n_test, 1, "test")};
}

std::vector<std::vector<int>> batches(const Dataset& ds, int batch_size, uint64_t epoch_seed) {
    if (batch_size < 1) throw ArgumentError("batch size must be positive");
    std::vector<int> order(ds.size());
    for (int i = 0; i < ds.size(); ++i) order[i] = i;
    RngStream rng(epoch_seed);
    for (int i = ds.size() - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_below(static_cast<uint64_t>(i) + 1));
        std::swap(order[i], order[j]);
    }
    std::vector<std::vector<int>> out;
    for (int start = 0; start < ds.size(); start += batch_size) {
        const int end = std::min(ds.size(), start + batch_size);
        out.emplace_back(order.begin() + start, order.begin() + end);
    }
    return out;
}

}  // namespace yomo
