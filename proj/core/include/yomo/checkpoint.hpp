#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "yomo/model.hpp"

namespace yomo {

// On-disk model snapshot. Layout (all integers and floats little-endian):
//   bytes 0-7   magic "YOMOCKPT"
//   u32         format version (currently 1)
//   u32         config text length, then that many bytes (the resolved
//               experiment config, echoed verbatim)
//   u64         extractor parameter count, then that many f64
//   u64         ansatz angle count, then that many f64
//   u64         training-history digest
// Any layout change requires a version bump.
struct Checkpoint {
    uint32_t version = 1;
    std::string config_text;
    std::vector<double> extractor_params;
    std::vector<double> theta;
    uint64_t history_digest = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

// Validates magic, version, and lengths; failures are format errors naming
// the byte offset.
Checkpoint load_checkpoint(const std::string& path);

// Copies a checkpoint's parameters into a freshly built model; parameter
// count mismatches are format errors (checkpoint/config disagreement).
void restore_parameters(Model& model, const Checkpoint& ckpt);

}  // namespace yomo
