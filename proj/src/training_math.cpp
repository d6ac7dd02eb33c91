#include "searchr/training_math.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "searchr/error.hpp"
#include "searchr/metrics.hpp"

namespace searchr::training {

double reward_target(std::string_view final_answer, std::string_view gold) {
  return answer_score(final_answer, gold).f1;
}

double reward_model_loss(const RewardBatch& batch) {
  if (batch.predicted.size() != batch.target.size()) {
    throw ContractViolation("reward batch: predicted has " +
                            std::to_string(batch.predicted.size()) + " values, target has " +
                            std::to_string(batch.target.size()));
  }
  if (batch.predicted.empty()) {
    throw ContractViolation("reward batch is empty");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.predicted.size(); ++i) {
    const double d = batch.predicted[i] - batch.target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(batch.predicted.size());
}

double probability_ratio(double new_prob, double old_prob) {
  if (!(old_prob > 0.0) || !(new_prob > 0.0)) {
    throw ContractViolation("probability ratio needs positive probabilities");
  }
  return new_prob / old_prob;
}

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ContractViolation("clip epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  }
}

}  // namespace

double clip_ratio(double ratio, double epsilon) {
  check_epsilon(epsilon);
  return std::min(std::max(ratio, 1.0 - epsilon), 1.0 + epsilon);
}

double ppo_sample_objective(const PpoSample& sample) {
  if (!(sample.ratio > 0.0) || !std::isfinite(sample.ratio)) {
    throw ContractViolation("probability ratio must be positive and finite");
  }
  const double unclipped = sample.ratio * sample.advantage;
  const double clipped = clip_ratio(sample.ratio, sample.epsilon) * sample.advantage;
  return std::min(unclipped, clipped);
}

double ppo_objective(std::span<const PpoSample> samples) {
  if (samples.empty()) {
    throw ContractViolation("PPO objective needs at least one sample");
  }
  double sum = 0.0;
  for (const PpoSample& s : samples) {
    sum += ppo_sample_objective(s);
  }
  return sum / static_cast<double>(samples.size());
}

}  // namespace searchr::training
