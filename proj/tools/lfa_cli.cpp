// Command-line harness: eval, verify, sample, table.
#include "lfa/bounds.hpp"
#include "lfa/generators.hpp"
#include "lfa/io.hpp"
#include "lfa/verify.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <set>

namespace {

using lfa::Json;

int fail(const std::string& kind, const std::string& message) {
  Json err = {{"schema", 1}, {"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
  return 2;
}

Json vec_json(const lfa::Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(lfa::scalar_json(v[i]));
  return out;
}

Json bounds_json(const lfa::ProblemInstance& inst) {
  try {
    const lfa::BoundReport b = lfa::lstd_bound_report(inst);
    return {{"alpha_l2", lfa::scalar_json(b.alpha_l2)},
            {"alpha_linf", lfa::scalar_json(b.alpha_linf)},
            {"l2_bound_sharp", lfa::scalar_json(b.l2.sharp)},
            {"l2_bound_split", lfa::scalar_json(b.l2.split)},
            {"l2_bound_sharp_alt", lfa::scalar_json(b.l2.sharp_alt)},
            {"l2_bound_split_alt", lfa::scalar_json(b.l2.split_alt)},
            {"linf_bound_sharp", lfa::scalar_json(b.linf.sharp)},
            {"linf_bound_split", lfa::scalar_json(b.linf.split)},
            {"decomposition_residual", b.decomposition_residual},
            {"linf_decomposition_residual", b.linf.decomposition_residual}};
  } catch (const lfa::AMatrixSingular& e) {
    return {{"unavailable", e.what()}};
  }
}

int cmd_eval(const std::string& path, const std::string& norm_name, const std::string& estimator) {
  const lfa::ProblemInstance inst = lfa::load_instance(path);
  const lfa::NormKind norm = norm_name == "linf" ? lfa::NormKind::Linf : lfa::NormKind::L2mu;
  Json out = {{"schema", 1}, {"estimator", estimator}, {"norm", norm_name}};
  lfa::Vec candidate;
  if (estimator == "lstd") {
    const lfa::LinearValue lv = lfa::lstd_population(inst);
    out["theta"] = vec_json(lv.theta);
    candidate = lv.realized;
  } else if (estimator == "bayes") {
    candidate = lfa::bayes_abstraction(inst).composed;
  } else {
    const lfa::ProjectionResult pr = lfa::projected_bayes(inst);
    out["theta"] = vec_json(pr.linear_value.theta);
    candidate = pr.linear_value.realized;
  }
  out["candidate"] = vec_json(candidate);
  out["value_function"] = vec_json(lfa::value_function(inst.mrp()));
  out["misspecification"] = lfa::misspecification(inst, norm);
  out["ratio"] = lfa::scalar_json(lfa::approx_ratio(inst, candidate, norm));
  out["bounds"] = bounds_json(inst);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_verify(const std::string& id, const std::string& params, std::uint64_t seed, const std::string& instance,
               bool timing) {
  std::optional<std::string> path;
  if (!instance.empty()) path = instance;
  const lfa::VerificationReport rep = lfa::run_verification(id, lfa::parse_params(params), seed, path);
  std::cout << lfa::to_json(rep, timing).dump(2) << "\n";
  return rep.pass ? 0 : 1;
}

int cmd_sample(const std::string& path, std::size_t n, std::uint64_t seed, const std::string& out) {
  const lfa::ProblemInstance inst = lfa::load_instance(path);
  const std::string text = lfa::render_dataset(lfa::sample_dataset(inst, n, seed));
  if (out.empty()) {
    std::cout << text;
  } else {
    lfa::write_file(out, text);
  }
  return 0;
}

bool has_aliasing(const lfa::ProblemInstance& inst) {
  std::set<std::vector<double>> seen;
  for (int s = 0; s < inst.n_states(); ++s)
    if (!seen.insert(lfa::feature_key(inst.features().row(s))).second) return true;
  return false;
}

int cmd_table(const std::string& path, const std::string& format) {
  const lfa::ProblemInstance inst = lfa::load_instance(path);
  const lfa::MomentSummary m = lfa::compute_moments(inst);
  const double g = inst.gamma();
  const lfa::ExtendedScalar pp = lfa::weighted_operator_norm(lfa::projection_matrix_l2(inst) * inst.P(), inst.mu());
  double l2 = std::numeric_limits<double>::infinity();
  if (pp.is_finite() && m.sigma_min_whitened > 0) {
    const double f = g * pp.value() / m.sigma_min_whitened;
    l2 = std::sqrt(1.0 + f * f);
  }
  const double linf = m.sigma_min_a > 0 ? 1.0 + (1.0 + g) / m.sigma_min_a : std::numeric_limits<double>::infinity();
  const bool full = inst.mu().full_support();
  const bool aliased = has_aliasing(inst);
  struct Row {
    const char* setting;
    double l2mu;
    double linf;
    bool applicable;
  };
  const Row rows[] = {
      {"mu>=0 aliasing", l2, linf, !full && aliased},
      {"mu>=0 no-aliasing", l2, linf, !full && !aliased},
      {"mu>0 aliasing", l2, 2.0 / (1.0 - g), full && aliased},
      {"mu>0 no-aliasing", 1.0, 1.0, full && !aliased},
  };
  if (format == "csv") {
    std::cout << "setting,l2mu,linf,applicable\n";
    for (const auto& r : rows) {
      std::cout << fmt::format("{},{},{},{}\n", r.setting, lfa::ExtendedScalar::from_double(r.l2mu).to_string(),
                               lfa::ExtendedScalar::from_double(r.linf).to_string(), r.applicable ? "true" : "false");
    }
    return 0;
  }
  Json out = {{"schema", 1}, {"cells", Json::array()}};
  for (const auto& r : rows) {
    out["cells"].push_back({{"setting", r.setting}, {"l2mu", lfa::scalar_json(r.l2mu)},
                            {"linf", lfa::scalar_json(r.linf)}, {"applicable", r.applicable}});
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear off-policy value estimation lab"};
  app.require_subcommand(1);

  std::string path, norm = "l2mu", estimator = "lstd";
  auto* eval = app.add_subcommand("eval", "Evaluate an estimator and its bounds on an instance");
  eval->add_option("instance", path, "Instance file")->required();
  eval->add_option("--norm", norm)->check(CLI::IsMember({"l2mu", "linf"}));
  eval->add_option("--estimator", estimator)->check(CLI::IsMember({"lstd", "bayes", "bayes-proj"}));

  std::string id, params, instance;
  std::uint64_t seed = 0;
  bool no_timing = false;
  auto* verify = app.add_subcommand("verify", "Run an acceptance check and print its report");
  verify->add_option("id", id)->required()->check(CLI::IsMember(lfa::verification_ids()));
  verify->add_option("--params", params, "key=value[,key=value]");
  verify->add_option("--seed", seed);
  verify->add_option("--instance", instance, "Instance file (thm35)");
  verify->add_flag("--no-timing", no_timing, "Omit wall time from the report");

  std::size_t n = 0;
  std::string out;
  auto* sample = app.add_subcommand("sample", "Draw an aliased dataset");
  sample->add_option("instance", path)->required();
  sample->add_option("--n", n)->required();
  sample->add_option("--seed", seed);
  sample->add_option("--out", out);

  std::string format = "json";
  auto* table = app.add_subcommand("table", "Evaluate the approximation-factor table on an instance");
  table->add_option("instance", path)->required();
  table->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what());
  }

  try {
    if (*eval) return cmd_eval(path, norm, estimator);
    if (*verify) return cmd_verify(id, params, seed, instance, !no_timing);
    if (*sample) return cmd_sample(path, n, seed, out);
    if (*table) return cmd_table(path, format);
  } catch (const lfa::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail("InternalFault", e.what());
  }
  return 2;
}
