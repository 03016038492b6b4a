#include "lfa/estimators.hpp"

#include "lfa/moments.hpp"
#include "lfa/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <tuple>

namespace lfa {

std::vector<double> feature_key(const Vec& phi) {
  std::vector<double> key(static_cast<std::size_t>(phi.size()));
  for (Eigen::Index i = 0; i < phi.size(); ++i) key[static_cast<std::size_t>(i)] = std::round(phi[i] * 1e12) / 1e12 + 0.0;
  return key;
}

LinearValue lstd_population(const ProblemInstance& instance) {
  const MomentSummary m = compute_moments(instance);
  if (!(m.sigma_min_a > 1e-10))
    throw AMatrixSingular(fmt::format("A singular: sigma_min(A) = {:.3g}", m.sigma_min_a));
  return make_linear_value(instance.features(), m.a_matrix.partialPivLu().solve(m.b_vector));
}

Dataset sample_dataset(const ProblemInstance& instance, std::size_t n, std::uint64_t seed) {
  const int S = instance.n_states();
  const Vec& w = instance.mu().weights();
  std::discrete_distribution<int> start(w.data(), w.data() + S);
  std::vector<std::discrete_distribution<int>> next;
  for (int s = 0; s < S; ++s) {
    const Vec row = instance.P().row(s).transpose();
    next.emplace_back(row.data(), row.data() + S);
  }
  Dataset ds;
  ds.seed = seed;
  ds.dim = instance.dim();
  ds.samples.reserve(n);
  for (std::size_t block = 0; block * kSampleBlock < n; ++block) {
    Engine eng = make_stream(seed, block);
    const std::size_t end = std::min(n, (block + 1) * kSampleBlock);
    for (std::size_t i = block * kSampleBlock; i < end; ++i) {
      const int s = start(eng);
      const RewardLaw& law = instance.rewards()[static_cast<std::size_t>(s)];
      double r = law.param;
      if (law.kind == RewardLaw::Kind::Bernoulli) r = std::bernoulli_distribution(law.param)(eng) ? 1.0 : 0.0;
      const int t = next[static_cast<std::size_t>(s)](eng);
      ds.samples.push_back({instance.features().row(s), r, instance.features().row(t)});
    }
  }
  return ds;
}

LinearValue lstd_empirical(const Dataset& dataset, int d, double gamma) {
  Mat A = Mat::Zero(d, d);
  Vec b = Vec::Zero(d);
  for (const auto& x : dataset.samples) {
    if (x.phi.size() != d || x.phi_next.size() != d) throw DimensionError("sample dimension mismatch");
    A += x.phi * (x.phi - gamma * x.phi_next).transpose();
    b += x.phi * x.reward;
  }
  if (dataset.n() > 0) {
    A /= static_cast<double>(dataset.n());
    b /= static_cast<double>(dataset.n());
  }
  const double smin = sigma_min(A);
  if (!(smin > 1e-10)) throw AMatrixSingular(fmt::format("empirical A singular: sigma_min = {:.3g}", smin));
  LinearValue lv;
  lv.theta = A.partialPivLu().solve(b);
  return lv;
}

AbstractModel bayes_abstraction(const ProblemInstance& instance) {
  const int S = instance.n_states();
  const Vec& w = instance.mu().weights();
  AbstractModel m;
  std::map<std::vector<double>, int> index;
  for (int s = 0; s < S; ++s) {
    auto key = feature_key(instance.features().row(s));
    auto [it, inserted] = index.try_emplace(key, static_cast<int>(m.abstract_states.size()));
    if (inserted) m.abstract_states.push_back(instance.features().row(s));
    m.state_class.push_back(it->second);
  }
  const auto X = static_cast<Eigen::Index>(m.abstract_states.size());
  Vec mass = Vec::Zero(X);
  m.r_phi = Vec::Zero(X);
  m.p_phi = Mat::Zero(X, X);
  for (int s = 0; s < S; ++s) {
    const int x = m.state_class[static_cast<std::size_t>(s)];
    mass[x] += w[s];
    m.r_phi[x] += w[s] * instance.r()[s];
    for (int t = 0; t < S; ++t) m.p_phi(x, m.state_class[static_cast<std::size_t>(t)]) += w[s] * instance.P()(s, t);
  }
  for (Eigen::Index x = 0; x < X; ++x) {
    if (!(mass[x] > kSupportThreshold))
      throw UnsupportedAbstractState(fmt::format("abstract state {} has zero mu-mass", x));
    m.r_phi[x] /= mass[x];
    m.p_phi.row(x) /= mass[x];
  }
  m.v_phi = (Mat::Identity(X, X) - instance.gamma() * m.p_phi).partialPivLu().solve(m.r_phi);
  m.composed.resize(S);
  for (int s = 0; s < S; ++s) m.composed[s] = m.v_phi[m.state_class[static_cast<std::size_t>(s)]];
  return m;
}

ProjectionResult projected_bayes(const ProblemInstance& instance) {
  return project_linf(instance.features(), bayes_abstraction(instance).composed);
}

namespace {

using AtomKey = std::tuple<std::vector<double>, double, std::vector<double>>;

AtomKey key_of(const PopulationAtom& a) { return {a.phi, a.reward, a.phi_next}; }

}  // namespace

AliasedPopulation population_view(const ProblemInstance& instance) {
  const int S = instance.n_states();
  std::map<AtomKey, double> acc;
  for (int s : instance.mu().support()) {
    const RewardLaw& law = instance.rewards()[static_cast<std::size_t>(s)];
    std::vector<std::pair<double, double>> outcomes;  // (value, probability)
    if (law.kind == RewardLaw::Kind::Bernoulli) {
      outcomes = {{1.0, law.param}, {0.0, 1.0 - law.param}};
    } else {
      outcomes = {{law.param, 1.0}};
    }
    const auto phi = feature_key(instance.features().row(s));
    for (auto [value, pr] : outcomes) {
      if (pr <= 0.0) continue;
      for (int t = 0; t < S; ++t) {
        const double p = instance.P()(s, t);
        if (p <= 0.0) continue;
        acc[{phi, value + 0.0, feature_key(instance.features().row(t))}] += instance.mu().weights()[s] * pr * p;
      }
    }
  }
  AliasedPopulation out;
  for (const auto& [k, p] : acc) out.atoms.push_back({p, std::get<0>(k), std::get<1>(k), std::get<2>(k)});
  return out;
}

bool populations_equal(const AliasedPopulation& a, const AliasedPopulation& b, double tol) {
  // Merge walk over the two sorted lists; a missing atom counts as probability 0.
  std::size_t i = 0, j = 0;
  while (i < a.atoms.size() || j < b.atoms.size()) {
    if (j == b.atoms.size() || (i < a.atoms.size() && key_of(a.atoms[i]) < key_of(b.atoms[j]))) {
      if (a.atoms[i++].probability > tol) return false;
    } else if (i == a.atoms.size() || key_of(b.atoms[j]) < key_of(a.atoms[i])) {
      if (b.atoms[j++].probability > tol) return false;
    } else {
      if (std::abs(a.atoms[i++].probability - b.atoms[j++].probability) > tol) return false;
    }
  }
  return true;
}

}  // namespace lfa
