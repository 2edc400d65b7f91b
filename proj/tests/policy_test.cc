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

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gmock/gmock.h>
#include <gtest/gtest.h>
#include <json.hpp>

#include "hopper/error.h"

namespace hopper {
namespace {

const std::vector<int> kTrunk = {64, 32};
const std::vector<int> kDecoder = {32};
const std::vector<int> kActor = {256, 128, 64};

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kIo;
}

WeightsFile ZeroWeights() {
  WeightsFile w = RandomWeights(1, kTrunk, kDecoder, kActor, 1.0);
  for (auto& [name, t] : w.tensors) std::fill(t.data.begin(), t.data.end(), 0.0f);
  return w;
}

Eigen::VectorXd Ramp(Eigen::Index n, double scale) {
  return Eigen::VectorXd::LinSpaced(n, -scale, scale);
}

TEST(Weights, SerializeParseRoundTrip) {
  WeightsFile w = RandomWeights(3, kTrunk, kDecoder, kActor, 1.0);
  std::string bytes = SerializeWeights(w);
  EXPECT_EQ(bytes.substr(0, 4), "HOPW");
  WeightsFile back = ParseWeights(bytes);
  ASSERT_EQ(back.tensors.size(), w.tensors.size());
  for (const auto& [name, t] : w.tensors) {
    EXPECT_EQ(back.tensors.at(name).shape, t.shape) << name;
    EXPECT_EQ(back.tensors.at(name).data, t.data) << name;
  }
  EXPECT_EQ(back.activations, w.activations);
  // re-export of unmodified weights is byte-identical
  EXPECT_EQ(SerializeWeights(back), bytes);
}

TEST(Weights, HeaderFields) {
  std::string bytes = SerializeWeights(ZeroWeights());
  std::uint32_t version;
  std::uint64_t manifest;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&manifest, bytes.data() + 12, 8);
  EXPECT_EQ(version, 1u);
  auto doc = nlohmann::json::parse(bytes.substr(20, manifest));
  EXPECT_EQ(doc["layout"], "row-major");
  for (const auto& t : doc["tensors"]) {
    EXPECT_EQ(t["dtype"], "float32");
    EXPECT_EQ(t["offset"].get<std::size_t>() % 4, 0u);
  }
}

TEST(Weights, ChecksumDetectsCorruption) {
  std::string bytes = SerializeWeights(RandomWeights(3, kTrunk, kDecoder, kActor, 1.0));
  bytes[bytes.size() - 5] ^= 0x01;
  EXPECT_EQ(CodeOf([&] { ParseWeights(bytes); }), ErrorCode::kIo);
  EXPECT_EQ(CodeOf([&] { ParseWeights("HOPX"); }), ErrorCode::kIo);
}

TEST(Weights, WrongVersionRejected) {
  std::string bytes = SerializeWeights(ZeroWeights());
  bytes[4] = 7;
  EXPECT_EQ(CodeOf([&] { ParseWeights(bytes); }), ErrorCode::kIo);
}

TEST(Policy, ZeroWeightsGiveBiasOutputs) {
  Policy policy(ZeroWeights());
  PolicyOutput out = policy.Forward(Ramp(85, 1.0), Ramp(17, 2.0));
  EXPECT_EQ(out.action, Vec3::Zero());
  EXPECT_EQ(out.velocity, Vec3::Zero());
  EXPECT_EQ(out.contact, 0.5);
  EXPECT_TRUE(out.latent_mean.isZero());
}

TEST(Policy, ActorBiasPassesThroughWhenWeightsZero) {
  WeightsFile w = ZeroWeights();
  w.tensors["actor.3.bias"].data = {0.25f, -0.5f, 1.0f};
  Policy policy(w);
  PolicyOutput out = policy.Forward(Ramp(85, 1.0), Ramp(17, 2.0));
  EXPECT_EQ(out.action, Vec3(0.25, -0.5, 1.0));
}

TEST(Policy, ShapeMismatchRejected) {
  WeightsFile w = RandomWeights(1, kTrunk, kDecoder, kActor, 1.0);
  WeightsFile bad_input = w;
  bad_input.tensors["encoder.trunk.0.weight"].shape = {64, 84};
  bad_input.tensors["encoder.trunk.0.weight"].data.resize(64 * 84);
  EXPECT_EQ(CodeOf([&] { Policy p(bad_input); }),
            ErrorCode::kWeightShapeMismatch);

  WeightsFile missing = w;
  missing.tensors.erase("encoder.velocity.bias");
  EXPECT_EQ(CodeOf([&] { Policy p(missing); }), ErrorCode::kWeightShapeMismatch);

  WeightsFile latent = RandomWeights(1, kTrunk, kDecoder, kActor, 1.0);
  latent.tensors["encoder.mu.weight"].shape = {8, 32};
  latent.tensors["encoder.mu.weight"].data.resize(8 * 32);
  latent.tensors["encoder.mu.bias"].shape = {8};
  latent.tensors["encoder.mu.bias"].data.resize(8);
  EXPECT_EQ(CodeOf([&] { Policy p(latent); }), ErrorCode::kWeightShapeMismatch);

  WeightsFile broken_chain = w;
  broken_chain.tensors["actor.1.weight"].shape = {128, 255};
  broken_chain.tensors["actor.1.weight"].data.resize(128 * 255);
  EXPECT_EQ(CodeOf([&] { Policy p(broken_chain); }),
            ErrorCode::kWeightShapeMismatch);
}

TEST(Policy, NonFiniteOutputRaises) {
  WeightsFile w = RandomWeights(1, kTrunk, kDecoder, kActor, 1.0);
  w.tensors["actor.3.bias"].data[1] = std::numeric_limits<float>::infinity();
  Policy policy(w);
  EXPECT_EQ(CodeOf([&] { policy.Forward(Ramp(85, 1.0), Ramp(17, 1.0)); }),
            ErrorCode::kNonFiniteOutput);
}

TEST(Policy, HistoryOrderMatters) {
  Policy policy(RandomWeights(5, kTrunk, kDecoder, kActor, 1.0));
  Eigen::VectorXd history = Ramp(85, 1.0);
  Eigen::VectorXd swapped = history;
  swapped.segment(0, 17).swap(swapped.segment(17, 17));
  PolicyOutput a = policy.Forward(history, Ramp(17, 1.0));
  PolicyOutput b = policy.Forward(swapped, Ramp(17, 1.0));
  EXPECT_GT((a.latent_mean - b.latent_mean).norm(), 1e-6);
}

TEST(Policy, PureFunctionOfInputs) {
  Policy policy(RandomWeights(5, kTrunk, kDecoder, kActor, 1.0));
  PolicyOutput a = policy.Forward(Ramp(85, 1.0), Ramp(17, 1.0));
  PolicyOutput b = policy.Forward(Ramp(85, 1.0), Ramp(17, 1.0));
  EXPECT_EQ(a.action, b.action);
  EXPECT_EQ(a.latent_mean, b.latent_mean);
  EXPECT_EQ(policy.Decode(a.latent_mean).size(), 17);
}

TEST(ObservationHistory, ZeroPaddedNewestFirst) {
  ObservationHistory h;
  EXPECT_TRUE(h.Stacked().isZero());
  EXPECT_EQ(h.Stacked().size(), 85);
  Observation a, b;
  a.values.fill(1.0);
  b.values.fill(2.0);
  h.Push(a);
  h.Push(b);
  Eigen::VectorXd s = h.Stacked();
  EXPECT_TRUE((s.segment(0, 17).array() == 2.0).all());
  EXPECT_TRUE((s.segment(17, 17).array() == 1.0).all());
  EXPECT_TRUE(s.segment(34, 51).isZero());
  for (int i = 0; i < 10; ++i) h.Push(a);
  EXPECT_TRUE((h.Stacked().array() == 1.0).all());
}

TEST(Weights, FileRoundTrip) {
  auto path = std::filesystem::temp_directory_path() / "hopper_policy_test.hopw";
  WeightsFile w = RandomWeights(9, kTrunk, kDecoder, kActor, 1.0);
  WriteWeights(path.string(), w);
  Policy a = Policy::Load(path.string());
  Policy b(w);
  EXPECT_EQ(a.Forward(Ramp(85, 1.0), Ramp(17, 1.0)).action,
            b.Forward(Ramp(85, 1.0), Ramp(17, 1.0)).action);
  std::filesystem::remove(path);
  EXPECT_EQ(CodeOf([&] { Policy::Load(path.string()); }), ErrorCode::kIo);
}

// Probe written by the independent numpy implementation in policy_oracle.py.
TEST(CrossRuntime, MatchesNumpyOracle) {
  const char* dir = std::getenv("HOPPER_POLICY_PROBE");
  ASSERT_NE(dir, nullptr) << "probe directory not provided";
  std::string base(dir);
  Policy policy = Policy::Load(base + "/probe.hopw");
  std::ifstream in(base + "/probe.json");
  ASSERT_TRUE(in.good());
  nlohmann::json doc = nlohmann::json::parse(in);
  ASSERT_EQ(doc["samples"].size(), 100u);
  double worst = 0.0;
  for (const auto& s : doc["samples"]) {
    auto history = s["history"].get<std::vector<double>>();
    auto obs = s["obs"].get<std::vector<double>>();
    PolicyOutput out = policy.Forward(
        Eigen::Map<Eigen::VectorXd>(history.data(), history.size()),
        Eigen::Map<Eigen::VectorXd>(obs.data(), obs.size()));
    auto compare = [&worst](const Eigen::VectorXd& got,
                            const std::vector<double>& want) {
      ASSERT_EQ(got.size(), static_cast<Eigen::Index>(want.size()));
      for (std::size_t i = 0; i < want.size(); ++i) {
        worst = std::max(worst, std::abs(got[i] - want[i]));
      }
    };
    compare(out.action, s["action"].get<std::vector<double>>());
    compare(out.velocity, s["velocity"].get<std::vector<double>>());
    compare(out.latent_mean, s["mu"].get<std::vector<double>>());
    compare(out.latent_log_sigma, s["log_sigma"].get<std::vector<double>>());
    worst = std::max(worst, std::abs(out.contact - s["contact"].get<double>()));
  }
  EXPECT_LT(worst, 1e-5);
}

}  // namespace
}  // namespace hopper
