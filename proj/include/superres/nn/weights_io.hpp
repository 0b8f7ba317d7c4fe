#pragma once

#include <filesystem>
#include <optional>

#include "superres/nn/network.hpp"

namespace superres::nn {

// Weight file layout (all integers and doubles little-endian):
//   bytes 0..7   magic "SRLPWGHT"
//   u32          format version (1)
//   u32          header length H
//   H bytes      JSON header: architecture, seeds, m, n, components,
//                preprocessing flags, per-layer array shapes
//   f64 arrays   for each layer in declaration order: weights, then bias

void save_params(const PredictorParams& params, const std::filesystem::path& path);

/// Throws ErrorKind::Format on truncation, version mismatch, or when
/// `expected` is given and the stored architecture differs from it.
PredictorParams load_params(const std::filesystem::path& path,
                            const std::optional<ArchitectureSpec>& expected = std::nullopt);

}  // namespace superres::nn
