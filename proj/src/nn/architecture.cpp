#include "superres/nn/architecture.hpp"

#include <sstream>

#include "superres/error.hpp"

namespace superres::nn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

const char* activation_name(Activation a) { return a == Activation::ReLU ? "relu" : "linear"; }

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::ReLU;
  if (s == "linear") return Activation::Linear;
  throw Error(ErrorKind::Parameter, "unknown activation '" + s + "'");
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::size_t parse_count(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  require(pos == s.size() && !s.empty() && v > 0, ErrorKind::Parameter, "bad layer size '" + s + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<Shape> ArchitectureSpec::shapes() const {
  require(input_len >= 1, ErrorKind::Shape, "input_len must be >= 1");
  std::vector<Shape> out;
  Shape cur{1, input_len, false};
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string where = "layer " + std::to_string(i);
    std::visit(overloaded{
                   [&](const Conv1D& c) {
                     require(!cur.flat, ErrorKind::Shape, where + ": Conv1D after Flatten/Dense");
                     require(c.filters >= 1 && c.kernel >= 1, ErrorKind::Shape, where + ": empty Conv1D");
                     cur = Shape{c.filters, cur.length, false};
                   },
                   [&](const Flatten&) { cur = Shape{1, cur.size(), true}; },
                   [&](const Dense& d) {
                     require(cur.flat || cur.channels == 1, ErrorKind::Shape,
                             where + ": Dense on a multi-channel map needs Flatten first");
                     require(d.units >= 1, ErrorKind::Shape, where + ": Dense with zero units");
                     cur = Shape{1, d.units, true};
                   },
               },
               layers[i]);
    out.push_back(cur);
  }
  return out;
}

void ArchitectureSpec::validate() const {
  require(!layers.empty(), ErrorKind::Shape, "architecture has no layers");
  require(output_len >= 1, ErrorKind::Shape, "output_len must be >= 1");
  const auto* last = std::get_if<Dense>(&layers.back());
  require(last != nullptr && last->activation == Activation::Linear && last->units == output_len, ErrorKind::Shape,
          "final layer must be dense:" + std::to_string(output_len) + ":linear, architecture is " + describe());
  (void)shapes();
}

std::size_t ArchitectureSpec::parameter_count() const {
  std::size_t total = 0;
  Shape cur{1, input_len, false};
  const auto out = shapes();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (const auto* c = std::get_if<Conv1D>(&layers[i])) total += c->filters * (cur.channels * c->kernel + 1);
    if (const auto* d = std::get_if<Dense>(&layers[i])) total += d->units * (cur.size() + 1);
    cur = out[i];
  }
  return total;
}

std::string ArchitectureSpec::describe() const {
  std::string s;
  for (const auto& layer : layers) {
    if (!s.empty()) s += ',';
    std::visit(overloaded{
                   [&](const Conv1D& c) {
                     s += "conv:" + std::to_string(c.filters) + ':' + std::to_string(c.kernel);
                     if (c.activation != Activation::ReLU) s += std::string(":") + activation_name(c.activation);
                   },
                   [&](const Flatten&) { s += "flatten"; },
                   [&](const Dense& d) {
                     s += "dense:" + std::to_string(d.units) + ':' + activation_name(d.activation);
                   },
               },
               layer);
  }
  return s;
}

ArchitectureSpec ArchitectureSpec::desk_default(std::size_t input_len, std::size_t output_len) {
  ArchitectureSpec a;
  a.input_len = input_len;
  a.output_len = output_len;
  a.layers = {Conv1D{32, 5}, Conv1D{64, 7}, Flatten{}, Dense{output_len, Activation::Linear}};
  a.validate();
  return a;
}

ArchitectureSpec ArchitectureSpec::full_cnn(std::size_t input_len, std::size_t output_len) {
  ArchitectureSpec a;
  a.input_len = input_len;
  a.output_len = output_len;
  a.layers = {Conv1D{32, 5},  Conv1D{64, 7}, Conv1D{128, 11},
              Conv1D{256, 13}, Conv1D{512, 15}, Flatten{}, Dense{output_len, Activation::Linear}};
  a.validate();
  return a;
}

ArchitectureSpec ArchitectureSpec::parse(const std::string& text, std::size_t input_len, std::size_t output_len) {
  if (text == "default") return desk_default(input_len, output_len);
  if (text == "full") return full_cnn(input_len, output_len);
  ArchitectureSpec a;
  a.input_len = input_len;
  a.output_len = output_len;
  for (const auto& tok : split_on(text, ',')) {
    const auto parts = split_on(tok, ':');
    require(!parts.empty(), ErrorKind::Parameter, "empty layer in '" + text + "'");
    if (parts[0] == "conv" && (parts.size() == 3 || parts.size() == 4)) {
      Conv1D c{parse_count(parts[1]), parse_count(parts[2]), Activation::ReLU};
      if (parts.size() == 4) c.activation = parse_activation(parts[3]);
      a.layers.emplace_back(c);
    } else if (parts[0] == "flatten" && parts.size() == 1) {
      a.layers.emplace_back(Flatten{});
    } else if (parts[0] == "dense" && (parts.size() == 2 || parts.size() == 3)) {
      Dense d{parse_count(parts[1]), Activation::Linear};
      if (parts.size() == 3) d.activation = parse_activation(parts[2]);
      a.layers.emplace_back(d);
    } else {
      throw Error(ErrorKind::Parameter, "cannot parse layer '" + tok + "'");
    }
  }
  a.validate();
  return a;
}

nlohmann::json to_json(const ArchitectureSpec& arch) {
  return {{"layers", arch.describe()}, {"input_len", arch.input_len}, {"output_len", arch.output_len}};
}

ArchitectureSpec architecture_from_json(const nlohmann::json& j) {
  try {
    return ArchitectureSpec::parse(j.at("layers").get<std::string>(), j.at("input_len").get<std::size_t>(),
                                   j.at("output_len").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("bad architecture descriptor: ") + e.what());
  }
}

}  // namespace superres::nn
