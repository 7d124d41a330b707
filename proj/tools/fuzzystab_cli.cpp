#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fuzzystab/pipeline.hpp"
#include "fuzzystab/scenario.hpp"

namespace {

struct CommonOpts {
  std::string scenario_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--scenario", opts.scenario_path, "scenario file (JSON)")->required();
  cmd->add_option("--out", opts.out_dir, "report directory (overrides output.dir)");
  cmd->add_option("--set", opts.overrides, "override a scenario key, e.g. --set control.eps=0.2")
      ->take_all();
  cmd->add_option("--seed", opts.seed, "override perturbation.seed")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
}

nlohmann::json load_document(const CommonOpts& opts) {
  std::ifstream in(opts.scenario_path);
  if (!in) throw std::invalid_argument("cannot open scenario file '" + opts.scenario_path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario parse error: ") + e.what());
  }
  for (const auto& assignment : opts.overrides) fuzzystab::apply_override(doc, assignment);
  if (opts.seed_set) doc["perturbation"]["seed"] = opts.seed;
  return doc;
}

int run_verb(const CommonOpts& opts, fuzzystab::PipelineVerb verb) {
  fuzzystab::Scenario scenario;
  try {
    scenario = fuzzystab::scenario_from_json(load_document(opts));
  } catch (const std::invalid_argument& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return static_cast<int>(fuzzystab::StageCode::Parse);
  }

  fuzzystab::RunReport report;
  try {
    report = fuzzystab::run_pipeline(scenario, verb);
  } catch (const std::invalid_argument& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return static_cast<int>(fuzzystab::StageCode::Parse);
  }

  const std::string dir = opts.out_dir.empty() ? scenario.output_dir : opts.out_dir;
  try {
    fuzzystab::emit_report(report, dir);
  } catch (const std::exception& e) {
    std::cerr << "report error: " << e.what() << "\n";
    return static_cast<int>(fuzzystab::StageCode::Usage);
  }

  for (const auto& st : report.stages)
    std::printf("%-28s %s%s%s\n", st.name.c_str(),
                st.skipped ? "SKIP" : (st.pass ? "PASS" : "FAIL"),
                st.detail.empty() ? "" : "  ", st.detail.c_str());
  std::printf("report written to %s (exit %d)\n", dir.c_str(), report.exit_code);
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"direct-method recovery of ring homomorphisms and derivations on "
               "finite-dimensional fuzzy Banach algebras"};
  app.require_subcommand(1);

  CommonOpts axioms_opts, stabilize_opts, verify_opts, run_opts, echo_opts;
  CLI::App* axioms = app.add_subcommand("axioms", "fuzzy-norm axioms and the algebra condition");
  add_common(axioms, axioms_opts);
  CLI::App* stabilize =
      app.add_subcommand("stabilize", "additive recovery: scaling, additive domination, "
                                      "stabilization, bound check");
  add_common(stabilize, stabilize_opts);
  CLI::App* verify = app.add_subcommand(
      "verify", "full verification battery without the norm-validation stages");
  add_common(verify, verify_opts);
  CLI::App* run = app.add_subcommand("run", "full pipeline in stage order");
  add_common(run, run_opts);
  CLI::App* echo = app.add_subcommand("echo-config", "parse, resolve defaults and print the echo");
  add_common(echo, echo_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(fuzzystab::StageCode::Usage);
  }

  try {
    if (*echo) {
      try {
        const fuzzystab::Scenario scenario =
            fuzzystab::scenario_from_json(load_document(echo_opts));
        std::cout << scenario.echo().dump(2) << "\n";
        return 0;
      } catch (const std::invalid_argument& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return static_cast<int>(fuzzystab::StageCode::Parse);
      }
    }
    if (*axioms) return run_verb(axioms_opts, fuzzystab::PipelineVerb::Axioms);
    if (*stabilize) return run_verb(stabilize_opts, fuzzystab::PipelineVerb::Stabilize);
    if (*verify) return run_verb(verify_opts, fuzzystab::PipelineVerb::Verify);
    if (*run) return run_verb(run_opts, fuzzystab::PipelineVerb::Run);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(fuzzystab::StageCode::Usage);
  }
  return static_cast<int>(fuzzystab::StageCode::Usage);
}
