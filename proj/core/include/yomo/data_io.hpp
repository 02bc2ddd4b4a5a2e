#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "yomo/rng.hpp"

namespace yomo {

// A labeled set of fixed-dimension real vectors with values in [0,1].
struct Dataset {
    std::vector<std::vector<double>> inputs;
    std::vector<int> labels;
    int K = 0;
    std::string split;  // "train" or "test"

    int size() const { return static_cast<int>(labels.size()); }
    int d() const { return inputs.empty() ? 0 : static_cast<int>(inputs.front().size()); }
};

// Reads the classic big-endian IDX pair (magic 0x00000803 for images,
// 0x00000801 for labels); pixel bytes scale to [0,1]. Malformed input gets a
// format error naming the byte offset.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Writes the same format, quantizing values to bytes (round(v * 255)).
// Loading the result back reproduces the quantized inputs bit-exactly.
void save_idx(const Dataset& ds, const std::string& images_path,
              const std::string& labels_path);

// Block-mean pooling of square images down to side x side; `side` must
// divide the original side.
Dataset downsample(const Dataset& ds, int side);

// K Gaussian clusters centered on distinct coordinate axes at unit distance
// from the origin (axis k mod d, scaled by 1 + floor(k/d) when K > d),
// standard deviation `spread`, clipped to [0,1]. Deterministic per-class
// 80/20 train/test split of n_per_class draws.
std::pair<Dataset, Dataset> synth_blobs(int K, int d, int n_per_class, double spread,
                                        uint64_t seed);

// Procedural ten-class digit glyphs: seven-segment shapes rendered at
// 28 x 28 with seeded jitter (shift, scale, rotation, stroke intensity,
// pixel noise). A fast stand-in for handwritten-digit data with the same
// shape and label space.
std::pair<Dataset, Dataset> synth_digits(int n_train, int n_test, uint64_t seed);

// Index batches under a deterministic shuffle; the last partial batch is
// kept. The same epoch_seed always yields the same order.
std::vector<std::vector<int>> batches(const Dataset& ds, int batch_size, uint64_t epoch_seed);

}  // namespace yomo
