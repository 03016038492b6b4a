#pragma once

#include "lfa/projections.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lfa {

struct AliasedSample {
  Vec phi;
  double reward = 0.0;
  Vec phi_next;
};

struct Dataset {
  std::vector<AliasedSample> samples;
  std::uint64_t seed = 0;
  int dim = 0;
  std::size_t n() const { return samples.size(); }
};

// One atom of the joint law Q over (phi, r, phi').
struct PopulationAtom {
  double probability = 0.0;
  std::vector<double> phi;
  double reward = 0.0;
  std::vector<double> phi_next;
};

struct AliasedPopulation {
  std::vector<PopulationAtom> atoms;  // sorted by (phi, reward, phi_next)
};

struct AbstractModel {
  std::vector<Vec> abstract_states;
  std::vector<int> state_class;  // abstract index of each concrete state
  Vec r_phi;
  Mat p_phi;
  Vec v_phi;
  Vec composed;  // v_phi o phi, length S
};

// Samples within one block share a generator stream.
inline constexpr std::size_t kSampleBlock = 4096;

LinearValue lstd_population(const ProblemInstance& instance);
Dataset sample_dataset(const ProblemInstance& instance, std::size_t n, std::uint64_t seed);
LinearValue lstd_empirical(const Dataset& dataset, int d, double gamma);

AbstractModel bayes_abstraction(const ProblemInstance& instance);
ProjectionResult projected_bayes(const ProblemInstance& instance);

AliasedPopulation population_view(const ProblemInstance& instance);
bool populations_equal(const AliasedPopulation& a, const AliasedPopulation& b, double tol = 1e-9);

// Key used to identify equal feature vectors (12 decimals).
std::vector<double> feature_key(const Vec& phi);

}  // namespace lfa
