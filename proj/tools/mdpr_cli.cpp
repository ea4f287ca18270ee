#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mdpr/mdpr.h"

namespace {

constexpr int kExitInput = 2;

bool write_file(const std::string& path, const char* text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduce undiscounted total-cost and average-cost MDPs to discounted ones"};
  app.set_version_flag("--version", std::string(mdpr_version()));

  std::string command;
  std::string model_path;
  std::string out_path;
  std::string csv_path;
  std::string ell;
  std::string method = "pi";
  std::string criterion = "total";
  double beta = 0.0;
  mdpr_options opts;
  mdpr_options_init(&opts);

  app.add_option("command", command,
                 "validate | certify-t | certify-ht | reduce-total | reduce-average | solve | "
                 "oracle | inventory-demo | remark1-demo")
      ->required();
  app.add_option("--model", model_path, "model file (JSON)");
  auto* beta_opt =
      app.add_option("--beta", beta, "discount factor (default: minimum admissible)");
  app.add_option("--tol", opts.tol, "tolerance")->capture_default_str();
  app.add_option("--ell", ell, "marked state label");
  app.add_option("--seed", opts.seed, "simulation seed")->capture_default_str();
  app.add_option("--oracle-cap", opts.oracle_cap, "maximum number of enumerated policies")
      ->capture_default_str();
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--csv", csv_path, "write the value table here");
  app.add_flag("--compare-oracle", opts.compare_oracle, "check against brute-force enumeration");
  app.add_option("--method", method, "discounted solver: pi | vi")
      ->check(CLI::IsMember({"pi", "vi"}))
      ->capture_default_str();
  app.add_option("--criterion", criterion, "oracle criterion: total | average")
      ->check(CLI::IsMember({"total", "average"}))
      ->capture_default_str();
  app.add_option("--horizon", opts.horizon, "simulation horizon")->capture_default_str();
  app.add_option("--replications", opts.replications, "simulation replications")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  if (beta_opt->count() > 0) {
    opts.has_beta = 1;
    opts.beta = beta;
  }
  if (!ell.empty()) opts.ell = ell.c_str();
  opts.method = method == "vi" ? MDPR_METHOD_VALUE_ITERATION : MDPR_METHOD_POLICY_ITERATION;
  opts.criterion = criterion.c_str();

  mdpr_model* model = nullptr;
  if (!model_path.empty() && mdpr_model_load(model_path.c_str(), &model) != MDPR_OK) {
    std::cerr << "error: " << mdpr_last_error() << "\n";
    return kExitInput;
  }

  mdpr_report* report = nullptr;
  if (mdpr_run(command.c_str(), model, &opts, &report) != MDPR_OK) {
    std::cerr << "error: " << mdpr_last_error() << "\n";
    mdpr_model_free(model);
    return kExitInput;
  }
  const int rc = mdpr_report_exit_code(report);

  int status = rc;
  if (out_path.empty()) {
    std::fputs(mdpr_report_json(report), stdout);
  } else if (!write_file(out_path, mdpr_report_json(report))) {
    std::cerr << "error: cannot write " << out_path << "\n";
    status = kExitInput;
  }
  if (!csv_path.empty()) {
    if (!write_file(csv_path, mdpr_report_csv(report))) {
      std::cerr << "error: cannot write " << csv_path << "\n";
      status = kExitInput;
    }
  }
  mdpr_report_free(report);
  mdpr_model_free(model);
  return status;
}
