#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace superres::nn {

enum class Activation { ReLU, Linear };

/// Stride 1, zero "same" padding: output length equals input length.
struct Conv1D {
  std::size_t filters = 0;
  std::size_t kernel = 0;
  Activation activation = Activation::ReLU;
};

struct Flatten {};

struct Dense {
  std::size_t units = 0;
  Activation activation = Activation::Linear;
};

using LayerSpec = std::variant<Conv1D, Flatten, Dense>;

/// Activation shape between layers. Flat tensors have channels == 1.
struct Shape {
  std::size_t channels = 1;
  std::size_t length = 0;
  bool flat = false;

  std::size_t size() const noexcept { return channels * length; }
  bool operator==(const Shape&) const = default;
};

struct ArchitectureSpec {
  std::vector<LayerSpec> layers;
  std::size_t input_len = 0;
  std::size_t output_len = 0;

  /// Throws ErrorKind::Shape if the chain is inconsistent or the last layer
  /// is not Dense{output_len, Linear}.
  void validate() const;

  /// Output shape of every layer, in order.
  std::vector<Shape> shapes() const;

  std::size_t parameter_count() const;

  /// Compact descriptor, e.g. "conv:32:5,conv:64:7,flatten,dense:100:linear".
  std::string describe() const;

  bool operator==(const ArchitectureSpec& other) const { return describe() == other.describe() && input_len == other.input_len && output_len == other.output_len; }

  /// Conv1D{32,5} -> Conv1D{64,7} -> Flatten -> Dense{out, Linear}.
  static ArchitectureSpec desk_default(std::size_t input_len, std::size_t output_len);

  /// Five conv layers, 32..512 filters with kernels 5..15, then Flatten -> Dense.
  static ArchitectureSpec full_cnn(std::size_t input_len, std::size_t output_len);

  /// Parses "default", "full", or a descriptor string as produced by describe().
  static ArchitectureSpec parse(const std::string& text, std::size_t input_len, std::size_t output_len);
};

nlohmann::json to_json(const ArchitectureSpec& arch);
ArchitectureSpec architecture_from_json(const nlohmann::json& j);

}  // namespace superres::nn
