#pragma once

#include "lfa/mrp.hpp"

namespace lfa {

struct LinearValue {
  Vec theta;
  Vec realized;
};

LinearValue make_linear_value(const FeatureMap& features, Vec theta);

enum class NormKind { L2mu, Linf };

const char* to_string(NormKind k);

struct ProjectionResult {
  LinearValue linear_value;
  double error = 0.0;
  NormKind norm_kind = NormKind::L2mu;
  double duality_gap = 0.0;  // Linf only
};

Mat projection_matrix_l2(const ProblemInstance& instance);
ProjectionResult project_l2(const ProblemInstance& instance, const Vec& target);
ProjectionResult project_linf(const FeatureMap& features, const Vec& target);

}  // namespace lfa
