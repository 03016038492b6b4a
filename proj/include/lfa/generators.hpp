#pragma once

#include "lfa/estimators.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace lfa {

struct InstanceFamily {
  std::vector<ProblemInstance> members;
  std::map<std::string, double> params;  // claimed parameter values
  std::optional<AliasedPopulation> shared_population;
  bool support_degenerate = false;
};

// Two-state aliased pair; x may be +inf.
InstanceFamily gen_aliased_pair_l2(double x, double y);

ProblemInstance gen_eps_discounted(double eps, double gamma = 0.9, double reward = 1.0);

namespace five_state {
Mat printed_transition();
Mat printed_occupancy_rows();  // rows 1..3 as printed
Vec printed_mu();
Vec printed_feature_restriction();
inline constexpr double kGamma = 0.9;
inline constexpr double kLambda1 = -0.5874;
inline constexpr double kLambda2 = 0.9354;
}  // namespace five_state

ProblemInstance gen_five_state_fixed();
// Same instance with (r4, r5) = theta * (lambda1, lambda2), so v = theta * Phi.
ProblemInstance gen_five_state_member(double theta);

// Solves sum_j mu_j phi_j P(j, k) = 0 for the absorbing k and sum mu = 1.
Vec solve_a_zero_mu(const Mat& P, const Mat& features);
std::optional<ProblemInstance> a_zero_candidate(const Mat& P, double lambda1, double lambda2, double tol_rel = 1e-8);

struct AZeroSearchResult {
  ProblemInstance instance;
  long trial;
  double lambda1;
  double lambda2;
};

AZeroSearchResult search_a_zero(std::uint64_t seed, long max_trials, double tol_rel = 1e-8);

struct ConstructionState {
  Vec psi;
  Vec lambda;     // (lambda1, lambda2, lambda3)
  Mat m_matrix;   // 2 x 3
  Mat n_matrix;   // S x S
  double c = 1.0;
  double eta = 1.0 / 304.0;
  Vec mu;
  int iterations = 0;
  bool converged = false;
  double kernel_residual = 0.0;
  double kernel_rank_ratio = 0.0;     // sigma2 / sigma1 of M(psi)
  double closed_form_deviation = 0.0; // |lambda2(svd) - lambda2(closed form)|, NaN if skipped
  double realization = 0.0;           // achieved / operator norm
  double rho = 0.0;                   // ||Pi P|| / sigma_min(W)
};

namespace thm36 {
inline constexpr double kGamma = 0.9;
inline constexpr double kEta = 1.0 / 304.0;
inline constexpr double kMu1Min = 1e-8;
Mat printed_transition();
Mat printed_occupancy();
// Printed P with rows renormalized and columns 4, 5 made exactly proportional.
Mat transition();
Mat features(const ConstructionState& st);
}  // namespace thm36

// Fixed-point construction at mu = (t, (1-t)/2, (1-t)/2, 0, 0).
ConstructionState thm36_state_at(double mu1, double c = 1.0, std::uint64_t seed = 0);
ProblemInstance thm36_instance(const ConstructionState& st, int z);

struct Thm36Result {
  InstanceFamily family;
  ConstructionState state;
};

Thm36Result gen_thm36_family(double x, std::uint64_t seed = 0);

InstanceFamily gen_linf_triplet(double gamma, double y);
InstanceFamily gen_full_support_pair(double gamma, double p);

struct RandomInstanceOptions {
  int min_states = 2;
  int max_states = 8;
  int min_dim = 1;
  int max_dim = 3;
  bool full_support = true;
  double gamma_min = 0.0;
  double gamma_max = 0.99;
  bool aliased = false;  // force repeated feature rows
  bool proper = true;    // d < S, so realizability is not automatic
};

// Random instance drawn from stream (seed, index); rejects until valid.
ProblemInstance random_instance(std::uint64_t seed, std::uint64_t index, const RandomInstanceOptions& opt);

// Degenerate-support instance; the pushforward condition holds for roughly
// two thirds of indices by construction.
ProblemInstance random_degenerate_instance(std::uint64_t seed, std::uint64_t index);

}  // namespace lfa
