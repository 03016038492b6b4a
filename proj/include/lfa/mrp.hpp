#pragma once

#include "lfa/types.hpp"

#include <vector>

namespace lfa {

inline constexpr double kSupportThreshold = 1e-14;
inline constexpr double kIngestTolerance = 1e-3;

struct RewardLaw {
  enum class Kind { Deterministic, Bernoulli };
  Kind kind = Kind::Deterministic;
  double param = 0.0;  // value, or success probability

  static RewardLaw deterministic(double value) { return {Kind::Deterministic, value}; }
  static RewardLaw bernoulli(double p) { return {Kind::Bernoulli, p}; }
  double mean() const { return param; }
  bool operator==(const RewardLaw&) const = default;
};

class Mrp {
 public:
  // Rows summing to 1 within kIngestTolerance are renormalized.
  static Mrp create(Mat transition, Vec mean_reward, double gamma);

  int n_states() const { return static_cast<int>(transition_.rows()); }
  const Mat& transition() const { return transition_; }
  const Vec& mean_reward() const { return mean_reward_; }
  double gamma() const { return gamma_; }

 private:
  Mat transition_;
  Vec mean_reward_;
  double gamma_ = 0.0;
};

// AllStates enforces max_s ||phi(s)|| <= 1. SupportOnly enforces it on supp(mu)
// and is checked when the instance is assembled.
enum class FeatureBound { AllStates, SupportOnly };

class FeatureMap {
 public:
  explicit FeatureMap(Mat matrix, FeatureBound bound = FeatureBound::AllStates);

  const Mat& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.cols()); }
  int n_states() const { return static_cast<int>(matrix_.rows()); }
  FeatureBound bound() const { return bound_; }
  Vec row(int s) const { return matrix_.row(s).transpose(); }

 private:
  Mat matrix_;
  FeatureBound bound_;
};

class OfflineDistribution {
 public:
  // Sum within kIngestTolerance of 1 is accepted and renormalized.
  explicit OfflineDistribution(Vec weights);

  const Vec& weights() const { return weights_; }
  const std::vector<int>& support() const { return support_; }
  std::vector<int> complement() const;
  bool supported(int s) const { return weights_[s] > kSupportThreshold; }
  bool full_support() const { return static_cast<int>(support_.size()) == weights_.size(); }
  Mat diag() const { return weights_.asDiagonal(); }
  int size() const { return static_cast<int>(weights_.size()); }

 private:
  Vec weights_;
  std::vector<int> support_;
};

class ProblemInstance {
 public:
  static ProblemInstance create(Mrp mrp, std::vector<RewardLaw> rewards, FeatureMap features,
                                OfflineDistribution mu);
  // Mean rewards are derived from the laws.
  static ProblemInstance build(const Mat& transition, const std::vector<RewardLaw>& rewards, double gamma,
                               const Mat& features, const Vec& mu,
                               FeatureBound bound = FeatureBound::AllStates);

  const Mrp& mrp() const { return mrp_; }
  const std::vector<RewardLaw>& rewards() const { return rewards_; }
  const FeatureMap& features() const { return features_; }
  const OfflineDistribution& mu() const { return mu_; }

  int n_states() const { return mrp_.n_states(); }
  int dim() const { return features_.dim(); }
  double gamma() const { return mrp_.gamma(); }
  const Mat& P() const { return mrp_.transition(); }
  const Mat& Phi() const { return features_.matrix(); }
  const Vec& r() const { return mrp_.mean_reward(); }

 private:
  ProblemInstance(Mrp mrp, std::vector<RewardLaw> rewards, FeatureMap features, OfflineDistribution mu)
      : mrp_(std::move(mrp)), rewards_(std::move(rewards)), features_(std::move(features)), mu_(std::move(mu)) {}

  Mrp mrp_;
  std::vector<RewardLaw> rewards_;
  FeatureMap features_;
  OfflineDistribution mu_;
};

std::vector<RewardLaw> deterministic_rewards(const Vec& r);

Vec value_function(const Mrp& mrp);
Mat occupancy_matrix(const Mrp& mrp);
double weighted_norm(const Vec& v, const OfflineDistribution& mu);
double sup_norm(const Vec& v);

}  // namespace lfa
