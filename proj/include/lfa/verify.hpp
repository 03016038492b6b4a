#pragma once

#include "lfa/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lfa {

using Json = nlohmann::ordered_json;
using Params = std::map<std::string, std::string>;

struct CheckRecord {
  std::string predicate;
  std::string relation;  // "<=", ">=", "==", "true"
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerificationReport {
  std::string theorem;
  bool pass = true;
  std::uint64_t seed = 0;
  Json params = Json::object();
  Json measured = Json::object();
  std::vector<CheckRecord> checks;
  double wall_time_ms = 0.0;
};

const std::vector<std::string>& verification_ids();

// instance_path is honoured by checks that evaluate one instance (thm35).
VerificationReport run_verification(const std::string& id, const Params& params, std::uint64_t seed,
                                    const std::optional<std::string>& instance_path = std::nullopt);

Json to_json(const VerificationReport& report, bool include_timing = true);
Json scalar_json(double x);
Json scalar_json(const ExtendedScalar& x);

Params parse_params(const std::string& text);  // "x=2,y=0.25"

}  // namespace lfa
