// Copyright 2026 The Hopper Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hopper/policy.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <utility>

#include <json.hpp>
#include <zlib.h>

#include "hopper/error.h"

namespace hopper {
namespace {

static_assert(std::endian::native == std::endian::little,
              "weights are stored little-endian");

constexpr char kMagic[4] = {'H', 'O', 'P', 'W'};
constexpr std::size_t kPrefix = 4 + 4 + 4 + 8;

[[noreturn]] void ShapeError(const std::string& message) {
  throw Error(ErrorCode::kWeightShapeMismatch, message);
}

template <typename T>
T ReadScalar(const std::string& bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

template <typename T>
void AppendScalar(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

std::uint32_t Crc32(std::string_view a, std::string_view b) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(a.data()),
              static_cast<uInt>(a.size()));
  crc = crc32(crc, reinterpret_cast<const Bytef*>(b.data()),
              static_cast<uInt>(b.size()));
  return static_cast<std::uint32_t>(crc);
}

double Apply(Activation a, double x) {
  switch (a) {
    case Activation::kIdentity:
      return x;
    case Activation::kRelu:
      return x > 0.0 ? x : 0.0;
    case Activation::kElu:
      return x > 0.0 ? x : std::expm1(x);
    case Activation::kTanh:
      return std::tanh(x);
  }
  return x;
}

Linear MakeLinear(const WeightsFile& w, const std::string& name) {
  auto weight = w.tensors.find(name + ".weight");
  auto bias = w.tensors.find(name + ".bias");
  if (weight == w.tensors.end() || bias == w.tensors.end()) {
    ShapeError("missing tensor " + name);
  }
  const Tensor& W = weight->second;
  const Tensor& b = bias->second;
  if (W.shape.size() != 2 || b.shape.size() != 1 || b.shape[0] != W.shape[0]) {
    ShapeError("bad shape for " + name);
  }
  Linear out;
  out.weight.resize(W.shape[0], W.shape[1]);
  for (std::int64_t r = 0; r < W.shape[0]; ++r) {
    for (std::int64_t c = 0; c < W.shape[1]; ++c) {
      out.weight(r, c) = W.data[r * W.shape[1] + c];
    }
  }
  out.bias.resize(b.shape[0]);
  for (std::int64_t i = 0; i < b.shape[0]; ++i) out.bias[i] = b.data[i];
  return out;
}

Mlp MakeMlp(const WeightsFile& w, const std::string& net) {
  Mlp mlp;
  auto act = w.activations.find(net);
  mlp.activation =
      ParseActivation(act == w.activations.end() ? "elu" : act->second);
  for (int i = 0; w.tensors.count(net + "." + std::to_string(i) + ".weight");
       ++i) {
    mlp.layers.push_back(MakeLinear(w, net + "." + std::to_string(i)));
    if (i > 0 && mlp.layers[i].weight.cols() != mlp.layers[i - 1].weight.rows()) {
      ShapeError("layer " + std::to_string(i) + " of " + net +
                 " does not chain");
    }
  }
  if (mlp.layers.empty()) ShapeError("network " + net + " has no layers");
  return mlp;
}

void ExpectShape(const Linear& l, Eigen::Index in, Eigen::Index out,
                 const std::string& name) {
  if (l.weight.cols() != in || l.weight.rows() != out) {
    ShapeError(name + " expects " + std::to_string(out) + "x" +
               std::to_string(in) + ", got " +
               std::to_string(l.weight.rows()) + "x" +
               std::to_string(l.weight.cols()));
  }
}

Eigen::VectorXd Affine(const Linear& l, const Eigen::VectorXd& x) {
  return l.weight * x + l.bias;
}

void CheckFinite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) {
    throw Error(ErrorCode::kNonFiniteOutput, std::string(what) + " not finite");
  }
}

}  // namespace

Activation ParseActivation(const std::string& name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "relu") return Activation::kRelu;
  if (name == "elu") return Activation::kElu;
  if (name == "tanh") return Activation::kTanh;
  ShapeError("unknown activation " + name);
}

std::string ActivationName(Activation activation) {
  switch (activation) {
    case Activation::kIdentity:
      return "identity";
    case Activation::kRelu:
      return "relu";
    case Activation::kElu:
      return "elu";
    case Activation::kTanh:
      return "tanh";
  }
  return "identity";
}

std::int64_t Tensor::size() const {
  std::int64_t n = 1;
  for (std::int64_t d : shape) n *= d;
  return n;
}

WeightsFile ParseWeights(const std::string& bytes) {
  if (bytes.size() < kPrefix || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kIo, "not a weights file");
  }
  auto version = ReadScalar<std::uint32_t>(bytes, 4);
  if (version != kWeightsVersion) {
    throw Error(ErrorCode::kIo,
                "unsupported weights version " + std::to_string(version));
  }
  auto crc = ReadScalar<std::uint32_t>(bytes, 8);
  auto manifest_size = ReadScalar<std::uint64_t>(bytes, 12);
  if (manifest_size > bytes.size() - kPrefix) {
    throw Error(ErrorCode::kIo, "truncated manifest");
  }
  std::string_view manifest(bytes.data() + kPrefix, manifest_size);
  std::string_view data(bytes.data() + kPrefix + manifest_size,
                        bytes.size() - kPrefix - manifest_size);
  if (Crc32(manifest, data) != crc) {
    throw Error(ErrorCode::kIo, "weights checksum mismatch");
  }

  WeightsFile out;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(manifest);
    for (const auto& [net, act] : doc.at("activations").items()) {
      out.activations[net] = act.get<std::string>();
    }
    for (const auto& entry : doc.at("tensors")) {
      if (entry.at("dtype").get<std::string>() != "float32") {
        throw Error(ErrorCode::kIo, "only float32 tensors are supported");
      }
      Tensor t;
      t.shape = entry.at("shape").get<std::vector<std::int64_t>>();
      auto offset = entry.at("offset").get<std::uint64_t>();
      auto nbytes = entry.at("nbytes").get<std::uint64_t>();
      std::int64_t count = t.size();
      if (count < 0 || nbytes != static_cast<std::uint64_t>(count) * 4 ||
          offset > data.size() || nbytes > data.size() - offset) {
        ShapeError("tensor " + entry.at("name").get<std::string>() +
                   " extent does not match its shape");
      }
      t.data.resize(count);
      std::memcpy(t.data.data(), data.data() + offset, nbytes);
      out.tensors[entry.at("name").get<std::string>()] = std::move(t);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("bad manifest: ") + e.what());
  }
  return out;
}

WeightsFile ReadWeights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open weights " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseWeights(buffer.str());
}

std::string SerializeWeights(const WeightsFile& weights) {
  nlohmann::json manifest;
  manifest["format"] = "hopper-policy";
  manifest["layout"] = "row-major";
  manifest["activations"] = weights.activations;
  manifest["tensors"] = nlohmann::json::array();
  std::string data;
  for (const auto& [name, t] : weights.tensors) {
    if (static_cast<std::int64_t>(t.data.size()) != t.size()) {
      ShapeError("tensor " + name + " data does not match its shape");
    }
    std::size_t nbytes = t.data.size() * sizeof(float);
    manifest["tensors"].push_back({{"name", name},
                                   {"shape", t.shape},
                                   {"dtype", "float32"},
                                   {"offset", data.size()},
                                   {"nbytes", nbytes}});
    data.append(reinterpret_cast<const char*>(t.data.data()), nbytes);
  }
  std::string text = manifest.dump();
  std::string out(kMagic, 4);
  AppendScalar<std::uint32_t>(out, kWeightsVersion);
  AppendScalar<std::uint32_t>(out, Crc32(text, data));
  AppendScalar<std::uint64_t>(out, text.size());
  out += text;
  out += data;
  return out;
}

void WriteWeights(const std::string& path, const WeightsFile& weights) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write weights " + path);
  out << SerializeWeights(weights);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

Eigen::VectorXd Mlp::Forward(const Eigen::VectorXd& x) const {
  Eigen::VectorXd h = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    h = Affine(layers[i], h);
    if (i + 1 < layers.size()) h = h.unaryExpr([this](double v) {
      return Apply(activation, v);
    });
  }
  return h;
}

Eigen::Index Mlp::input_size() const { return layers.front().weight.cols(); }
Eigen::Index Mlp::output_size() const { return layers.back().weight.rows(); }

Policy::Policy(const WeightsFile& weights) {
  trunk_ = MakeMlp(weights, "encoder.trunk");
  mu_ = MakeLinear(weights, "encoder.mu");
  log_sigma_ = MakeLinear(weights, "encoder.log_sigma");
  velocity_ = MakeLinear(weights, "encoder.velocity");
  contact_ = MakeLinear(weights, "encoder.contact");
  decoder_ = MakeMlp(weights, "decoder");
  actor_ = MakeMlp(weights, "actor");

  const Eigen::Index obs = Observation::kSize;
  if (trunk_.input_size() != kHistoryLength * obs) {
    ShapeError("encoder input must be " +
               std::to_string(kHistoryLength * obs));
  }
  Eigen::Index feature = trunk_.output_size();
  ExpectShape(mu_, feature, kLatentSize, "encoder.mu");
  ExpectShape(log_sigma_, feature, kLatentSize, "encoder.log_sigma");
  ExpectShape(velocity_, feature, kVelocitySize, "encoder.velocity");
  ExpectShape(contact_, feature, 1, "encoder.contact");
  if (decoder_.input_size() != kLatentSize || decoder_.output_size() != obs) {
    ShapeError("decoder must map latent to observation");
  }
  if (actor_.input_size() != kActorInput || actor_.output_size() != 3) {
    ShapeError("actor must map " + std::to_string(kActorInput) + " to 3");
  }
}

Policy Policy::Load(const std::string& path) {
  return Policy(ReadWeights(path));
}

PolicyOutput Policy::Forward(const Eigen::VectorXd& history,
                             const Eigen::VectorXd& obs) const {
  if (history.size() != kHistoryLength * Observation::kSize ||
      obs.size() != static_cast<Eigen::Index>(Observation::kSize)) {
    ShapeError("policy input has the wrong length");
  }
  // every trunk layer is activated, including the last
  Eigen::VectorXd h = trunk_.Forward(history).unaryExpr(
      [this](double v) { return Apply(trunk_.activation, v); });
  PolicyOutput out;
  out.latent_mean = Affine(mu_, h);
  out.latent_log_sigma = Affine(log_sigma_, h);
  Eigen::VectorXd velocity = Affine(velocity_, h);
  double logit = Affine(contact_, h)[0];
  out.velocity = velocity;
  out.contact = 1.0 / (1.0 + std::exp(-logit));

  Eigen::VectorXd input(kActorInput);
  input << obs, out.latent_mean, velocity;
  Eigen::VectorXd action = actor_.Forward(input);
  out.action = action;

  CheckFinite(out.latent_mean, "latent mean");
  CheckFinite(out.latent_log_sigma, "latent log sigma");
  CheckFinite(velocity, "velocity estimate");
  CheckFinite(action, "action");
  if (!std::isfinite(logit)) {
    throw Error(ErrorCode::kNonFiniteOutput, "contact estimate not finite");
  }
  return out;
}

Eigen::VectorXd Policy::Decode(const Eigen::VectorXd& latent) const {
  Eigen::VectorXd out = decoder_.Forward(latent);
  CheckFinite(out, "reconstruction");
  return out;
}

void ObservationHistory::Push(const Observation& obs) {
  window_.push_front(obs);
  if (window_.size() > static_cast<std::size_t>(kHistoryLength)) {
    window_.pop_back();
  }
}

Eigen::VectorXd ObservationHistory::Stacked() const {
  const Eigen::Index n = Observation::kSize;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(kHistoryLength * n);
  for (std::size_t i = 0; i < window_.size(); ++i) {
    out.segment(static_cast<Eigen::Index>(i) * n, n) = window_[i].vector();
  }
  return out;
}

Vec3 PolicyAgent::Act(const Environment& env) {
  const Observation& obs = env.observation();
  last_ = policy_.Forward(history_.Stacked(), obs.vector());
  history_.Push(obs);
  return last_.action;
}

WeightsFile RandomWeights(std::uint64_t seed, const std::vector<int>& trunk,
                          const std::vector<int>& decoder,
                          const std::vector<int>& actor, double scale) {
  std::mt19937_64 rng(seed);
  WeightsFile w;
  auto add = [&](const std::string& name, int in, int out) {
    Tensor weight{{out, in}, {}};
    Tensor bias{{out}, {}};
    double bound = scale / std::sqrt(static_cast<double>(in));
    for (int i = 0; i < out * in; ++i) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      weight.data.push_back(static_cast<float>(bound * (2.0 * u - 1.0)));
    }
    for (int i = 0; i < out; ++i) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      bias.data.push_back(static_cast<float>(0.1 * scale * (2.0 * u - 1.0)));
    }
    w.tensors[name + ".weight"] = std::move(weight);
    w.tensors[name + ".bias"] = std::move(bias);
  };
  auto chain = [&](const std::string& net, int in,
                   const std::vector<int>& hidden, int out) {
    std::vector<int> sizes = hidden;
    if (out > 0) sizes.push_back(out);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      add(net + "." + std::to_string(i), in, sizes[i]);
      in = sizes[i];
    }
    return in;
  };
  const int obs = static_cast<int>(Observation::kSize);
  int feature = chain("encoder.trunk", kHistoryLength * obs, trunk, 0);
  add("encoder.mu", feature, kLatentSize);
  add("encoder.log_sigma", feature, kLatentSize);
  add("encoder.velocity", feature, kVelocitySize);
  add("encoder.contact", feature, 1);
  chain("decoder", kLatentSize, decoder, obs);
  chain("actor", kActorInput, actor, 3);
  w.activations = {{"encoder.trunk", "elu"}, {"decoder", "elu"},
                   {"actor", "elu"}};
  return w;
}

}  // namespace hopper
