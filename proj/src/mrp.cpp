#include "lfa/mrp.hpp"

#include <fmt/format.h>

namespace lfa {

namespace {

constexpr double kNormSlack = 1e-12;
// Sums this close to 1 are left untouched so that rendering is a fixed point.
constexpr double kRenormSkip = 1e-14;

void check_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) throw InvariantError(fmt::format("{}: non-finite entry", what));
}

}  // namespace

Mrp Mrp::create(Mat transition, Vec mean_reward, double gamma) {
  const auto S = transition.rows();
  if (S == 0 || transition.cols() != S) throw DimensionError("transition must be a non-empty square matrix");
  if (mean_reward.size() != S) throw DimensionError("reward length differs from number of states");
  check_finite(transition, "transition");
  check_finite(mean_reward, "reward");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvariantError(fmt::format("discount {} outside [0, 1)", gamma));
  for (Eigen::Index s = 0; s < S; ++s) {
    for (Eigen::Index t = 0; t < S; ++t) {
      if (transition(s, t) < 0.0) throw InvariantError(fmt::format("negative transition probability at ({}, {})", s, t));
    }
    const double sum = transition.row(s).sum();
    if (std::abs(sum - 1.0) > kIngestTolerance + kRenormSkip)
      throw InvariantError(fmt::format("transition row {} sums to {}", s, sum));
    if (std::abs(sum - 1.0) > kRenormSkip) transition.row(s) /= sum;
    if (std::abs(mean_reward[s]) > 1.0 + kNormSlack)
      throw InvariantError(fmt::format("reward {} at state {} outside [-1, 1]", mean_reward[s], s));
  }
  Mrp m;
  m.transition_ = std::move(transition);
  m.mean_reward_ = std::move(mean_reward);
  m.gamma_ = gamma;
  return m;
}

FeatureMap::FeatureMap(Mat matrix, FeatureBound bound) : matrix_(std::move(matrix)), bound_(bound) {
  if (matrix_.rows() == 0 || matrix_.cols() == 0) throw DimensionError("feature matrix must be non-empty");
  check_finite(matrix_, "features");
  if (bound_ == FeatureBound::AllStates) {
    for (Eigen::Index s = 0; s < matrix_.rows(); ++s) {
      const double n = matrix_.row(s).norm();
      if (n > 1.0 + kNormSlack)
        throw InvariantError(fmt::format("Assumption 2.3: feature row {} has norm {} > 1", s, n));
    }
  }
}

OfflineDistribution::OfflineDistribution(Vec weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw DimensionError("empty offline distribution");
  check_finite(weights_, "mu");
  for (Eigen::Index s = 0; s < weights_.size(); ++s) {
    if (weights_[s] < 0.0) throw InvariantError(fmt::format("negative mu entry at state {}", s));
  }
  const double sum = weights_.sum();
  if (std::abs(sum - 1.0) > kIngestTolerance + kRenormSkip) throw InvariantError(fmt::format("mu sums to {}", sum));
  if (std::abs(sum - 1.0) > kRenormSkip) weights_ /= sum;
  for (Eigen::Index s = 0; s < weights_.size(); ++s) {
    if (weights_[s] > kSupportThreshold) support_.push_back(static_cast<int>(s));
  }
  if (support_.empty()) throw InvariantError("mu has empty support");
}

std::vector<int> OfflineDistribution::complement() const {
  std::vector<int> out;
  for (int s = 0; s < size(); ++s)
    if (!supported(s)) out.push_back(s);
  return out;
}

ProblemInstance ProblemInstance::create(Mrp mrp, std::vector<RewardLaw> rewards, FeatureMap features,
                                        OfflineDistribution mu) {
  const int S = mrp.n_states();
  if (static_cast<int>(rewards.size()) != S) throw DimensionError("reward law count differs from number of states");
  if (features.n_states() != S) throw DimensionError("feature rows differ from number of states");
  if (mu.size() != S) throw DimensionError("mu length differs from number of states");
  for (int s = 0; s < S; ++s) {
    const auto& law = rewards[s];
    if (law.kind == RewardLaw::Kind::Bernoulli && !(law.param >= 0.0 && law.param <= 1.0))
      throw InvariantError(fmt::format("Bernoulli parameter {} at state {} outside [0, 1]", law.param, s));
    if (std::abs(law.mean() - mrp.mean_reward()[s]) > 1e-12)
      throw InvariantError(fmt::format("reward law mean differs from mean reward at state {}", s));
  }
  if (features.bound() == FeatureBound::SupportOnly) {
    for (int s : mu.support()) {
      const double n = features.matrix().row(s).norm();
      if (n > 1.0 + kNormSlack)
        throw InvariantError(fmt::format("Assumption 2.3: supported feature row {} has norm {} > 1", s, n));
    }
  }
  const Mat& Phi = features.matrix();
  const Mat sigma = Phi.transpose() * mu.weights().asDiagonal() * Phi;
  const double lmin = Eigen::SelfAdjointEigenSolver<Mat>(sigma, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (!(lmin > 1e-10))
    throw InvariantError(fmt::format("Assumption 2.3: Sigma singular (lambda_min = {:.3g})", lmin));
  return ProblemInstance(std::move(mrp), std::move(rewards), std::move(features), std::move(mu));
}

ProblemInstance ProblemInstance::build(const Mat& transition, const std::vector<RewardLaw>& rewards, double gamma,
                                       const Mat& features, const Vec& mu, FeatureBound bound) {
  Vec r(static_cast<Eigen::Index>(rewards.size()));
  for (std::size_t s = 0; s < rewards.size(); ++s) r[static_cast<Eigen::Index>(s)] = rewards[s].mean();
  return create(Mrp::create(transition, r, gamma), rewards, FeatureMap(features, bound), OfflineDistribution(mu));
}

std::vector<RewardLaw> deterministic_rewards(const Vec& r) {
  std::vector<RewardLaw> out;
  for (Eigen::Index s = 0; s < r.size(); ++s) out.push_back(RewardLaw::deterministic(r[s]));
  return out;
}

Vec value_function(const Mrp& mrp) {
  const int S = mrp.n_states();
  const Mat lhs = Mat::Identity(S, S) - mrp.gamma() * mrp.transition();
  return lhs.partialPivLu().solve(mrp.mean_reward());
}

Mat occupancy_matrix(const Mrp& mrp) {
  const int S = mrp.n_states();
  const Mat lhs = Mat::Identity(S, S) - mrp.gamma() * mrp.transition();
  return lhs.partialPivLu().inverse();
}

double weighted_norm(const Vec& v, const OfflineDistribution& mu) {
  if (v.size() != mu.size()) throw DimensionError("weighted_norm: length mismatch");
  double acc = 0.0;
  for (int s : mu.support()) acc += mu.weights()[s] * v[s] * v[s];
  return std::sqrt(acc);
}

double sup_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace lfa
