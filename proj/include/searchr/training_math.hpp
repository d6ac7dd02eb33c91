#pragma once

#include <span>
#include <string_view>

// Reference implementations of the decomposer's training objectives. These
// are plain functions over numbers; no model is trained here.

namespace searchr::training {

/// Predicted and target rewards for one reward-model batch. Targets are
/// answer F1 values in [0, 1].
struct RewardBatch {
  std::span<const double> predicted;
  std::span<const double> target;
};

/// Target reward for a trajectory: token F1 of the final answer against gold.
double reward_target(std::string_view final_answer, std::string_view gold);

/// Mean squared error between predicted and target rewards. Requires equal,
/// non-zero lengths.
double reward_model_loss(const RewardBatch& batch);

inline constexpr double kDefaultClipEpsilon = 0.2;

/// One PPO sample: probability ratio pi_new/pi_old (> 0), its advantage
/// estimate, and the clip half-width epsilon in (0, 1).
struct PpoSample {
  double ratio = 1.0;
  double advantage = 0.0;
  double epsilon = kDefaultClipEpsilon;
};

/// Ratio of new to old action probability.
double probability_ratio(double new_prob, double old_prob);

/// min(max(ratio, 1 - epsilon), 1 + epsilon).
double clip_ratio(double ratio, double epsilon);

/// min(ratio * A, clip(ratio) * A).
double ppo_sample_objective(const PpoSample& sample);

/// Mean of the per-sample objectives. Requires at least one sample.
double ppo_objective(std::span<const PpoSample> samples);

}  // namespace searchr::training
