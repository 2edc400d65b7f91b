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

// Learned-policy runtime: weights container, encoder and actor forward pass.
//
// File layout (all integers little-endian):
//   "HOPW" | u32 version | u32 crc32(manifest + data) | u64 manifest bytes |
//   manifest (UTF-8 JSON) | data (float32 little-endian, row-major)
// Tensor offsets in the manifest are relative to the start of the data.

#ifndef HOPPER_POLICY_H_
#define HOPPER_POLICY_H_

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hopper/control.h"
#include "hopper/episode.h"

namespace hopper {

inline constexpr std::uint32_t kWeightsVersion = 1;
inline constexpr int kHistoryLength = 5;
inline constexpr int kLatentSize = 16;
inline constexpr int kVelocitySize = 3;
inline constexpr int kActorInput =
    static_cast<int>(Observation::kSize) + kLatentSize + kVelocitySize;

enum class Activation { kIdentity, kRelu, kElu, kTanh };
Activation ParseActivation(const std::string& name);
std::string ActivationName(Activation activation);

struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<float> data;  // row-major
  std::int64_t size() const;
};

// Named tensors plus the hidden-layer activation of each network.
struct WeightsFile {
  std::map<std::string, Tensor> tensors;
  std::map<std::string, std::string> activations;  // "encoder.trunk", "decoder", "actor"
};

WeightsFile ReadWeights(const std::string& path);
WeightsFile ParseWeights(const std::string& bytes);
std::string SerializeWeights(const WeightsFile& weights);
void WriteWeights(const std::string& path, const WeightsFile& weights);

struct Linear {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
};

// Hidden layers use `activation`; the last layer is linear.
struct Mlp {
  std::vector<Linear> layers;
  Activation activation = Activation::kElu;
  Eigen::VectorXd Forward(const Eigen::VectorXd& x) const;
  Eigen::Index input_size() const;
  Eigen::Index output_size() const;
};

struct PolicyOutput {
  Vec3 action = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();  // estimated base linear velocity
  double contact = 0.0;          // contact probability
  Eigen::VectorXd latent_mean;
  Eigen::VectorXd latent_log_sigma;
};

// Encoder: trunk (every layer activated) then linear heads mu, log_sigma,
// velocity and a logistic contact head. Actor: o_t + mu + velocity -> action.
class Policy {
 public:
  // Throws Error(kWeightShapeMismatch) on missing or inconsistent tensors.
  explicit Policy(const WeightsFile& weights);
  static Policy Load(const std::string& path);

  // history holds o_{t-1} .. o_{t-H}, newest first.
  // Throws Error(kNonFiniteOutput) when any output is not finite.
  PolicyOutput Forward(const Eigen::VectorXd& history,
                       const Eigen::VectorXd& obs) const;
  Eigen::VectorXd Decode(const Eigen::VectorXd& latent) const;

 private:
  Mlp trunk_;
  Linear mu_, log_sigma_, velocity_, contact_;
  Mlp decoder_;
  Mlp actor_;
};

// Zero-padded window of the last H observations, newest first.
class ObservationHistory {
 public:
  void Clear() { window_.clear(); }
  void Push(const Observation& obs);
  Eigen::VectorXd Stacked() const;

 private:
  std::deque<Observation> window_;
};

class PolicyAgent : public Controller {
 public:
  explicit PolicyAgent(Policy policy) : policy_(std::move(policy)) {}
  void Reset() override { history_.Clear(); }
  Vec3 Act(const Environment& env) override;
  const PolicyOutput& last_output() const { return last_; }

 private:
  Policy policy_;
  ObservationHistory history_;
  PolicyOutput last_;
};

// Random weights with the given hidden sizes, for tests and smoke runs.
WeightsFile RandomWeights(std::uint64_t seed, const std::vector<int>& trunk,
                          const std::vector<int>& decoder,
                          const std::vector<int>& actor, double scale);

}  // namespace hopper

#endif  // HOPPER_POLICY_H_
