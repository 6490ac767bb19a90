#pragma once

#include <filesystem>

#include "vrdrelex/model.hpp"
#include "vrdrelex/trainer.hpp"

namespace vrdrelex {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Single-file container: magic, version, header JSON (model/train config,
// label set, vocabulary, tensor manifest), raw little-endian float64
// payload, FNV-1a checksum over header+payload. load(save(m)) restores a
// model producing bit-identical predictions.
void save_checkpoint(const Model& model, const TrainConfig& train_config,
                     const std::filesystem::path& path);

struct LoadedCheckpoint {
  Model model;
  TrainConfig train_config;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace vrdrelex
