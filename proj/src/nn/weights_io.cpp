#include "superres/nn/weights_io.hpp"

#include "superres/binary_io.hpp"
#include "superres/error.hpp"

namespace superres::nn {

namespace {
constexpr std::string_view kMagic = "SRLPWGHT";
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_params(const PredictorParams& params, const std::filesystem::path& path) {
  params.validate();
  nlohmann::json header;
  header["format_version"] = kVersion;
  header["architecture"] = to_json(params.arch);
  header["init_seed"] = params.init_seed;
  header["shuffle_seed"] = params.shuffle_seed;
  header["m"] = params.input_len();
  header["n"] = params.input_len() + params.output_len();
  header["components"] = params.components;
  header["standardize_input"] = params.preprocessing.standardize_input;
  header["rescale_output"] = params.preprocessing.rescale_output;
  header["weight_shapes"] = params.weight_shapes();

  io::ByteWriter w;
  io::write_container_header(w, kMagic, kVersion, header);
  for (const auto& layer : params.layers) {
    w.f64s(layer.weights);
    w.f64s(layer.bias);
  }
  io::write_file(path, w.data());
}

PredictorParams load_params(const std::filesystem::path& path, const std::optional<ArchitectureSpec>& expected) {
  io::ByteReader r(io::read_file(path));
  const auto header = io::read_container_header(r, kMagic, kVersion);
  PredictorParams p;
  std::vector<std::vector<std::size_t>> stored_shapes;
  try {
    p.arch = architecture_from_json(header.at("architecture"));
    p.init_seed = header.at("init_seed").get<std::uint64_t>();
    p.shuffle_seed = header.at("shuffle_seed").get<std::uint64_t>();
    p.components = header.at("components").get<std::size_t>();
    p.preprocessing.standardize_input = header.at("standardize_input").get<bool>();
    p.preprocessing.rescale_output = header.at("rescale_output").get<bool>();
    stored_shapes = header.at("weight_shapes").get<std::vector<std::vector<std::size_t>>>();
    require(header.at("m").get<std::size_t>() == p.arch.input_len &&
                header.at("n").get<std::size_t>() == p.arch.input_len + p.arch.output_len,
            ErrorKind::Format, "header M/N disagree with the architecture");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("bad weight header: ") + e.what());
  }
  if (expected && !(*expected == p.arch)) {
    throw Error(ErrorKind::Format, "architecture mismatch: file has " + p.arch.describe() + " (M=" +
                                       std::to_string(p.arch.input_len) + ", N-M=" + std::to_string(p.arch.output_len) +
                                       "), expected " + expected->describe() + " (M=" +
                                       std::to_string(expected->input_len) + ", N-M=" +
                                       std::to_string(expected->output_len) + ")");
  }
  const auto shapes = p.weight_shapes();
  require(shapes == stored_shapes, ErrorKind::Format, "stored array shapes disagree with the architecture");
  for (const auto& shape : shapes) {
    LayerParams lp;
    if (!shape.empty()) {
      std::size_t count = 1;
      for (auto s : shape) count *= s;
      lp.weights = r.f64s(count);
      lp.bias = r.f64s(shape.front());
    }
    p.layers.push_back(std::move(lp));
  }
  require(r.remaining() == 0, ErrorKind::Format, "trailing bytes after weight arrays");
  p.validate();
  return p;
}

}  // namespace superres::nn
