// mfsi command-line driver: simulate | reconstruct | validate | extents.
//
// Exit codes: 0 success, 2 configuration error (message names the key and
// line), 3 numeric failure, 4 missing or mismatched data, 5 validation oracle
// failure.

#include <CLI11.hpp>
#include <iostream>

#include "mfsi/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitData = 4;
constexpr int kExitOracle = 5;

mfsi::pipeline::RunConfig load_config_or_exit(const std::string& path) {
  try {
    return mfsi::pipeline::load_run_config(path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    std::exit(kExitConfig);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mfsi: multi-frequency factorization-method source-support imaging"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string data_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool quiet = false;
  std::vector<std::string> case_filter;
  bool inject_mismatch = false;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config_path, "experiment config file");
    if (needs_config) opt->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "override the noise seed")
        ->each([&](const std::string&) { seed_given = true; });
    cmd->add_flag("--quiet", quiet, "suppress warnings and progress output");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "synthesize data records");
  add_common(simulate, true);

  CLI::App* reconstruct = app.add_subcommand("reconstruct", "build indicator fields");
  add_common(reconstruct, true);
  reconstruct->add_option("--data", data_dir,
                          "directory holding the data records (default: --out)");

  CLI::App* validate = app.add_subcommand("validate", "run the structural oracles");
  add_common(validate, false);
  validate->add_option("--cases", case_filter, "restrict to named catalog cases");
  validate->add_flag("--inject-mismatch", inject_mismatch,
                     "negative control: mismatch the factorization quadrature");

  CLI::App* extents = app.add_subcommand("extents", "print ground-truth extents");
  add_common(extents, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      mfsi::pipeline::RunConfig cfg = load_config_or_exit(config_path);
      if (seed_given) cfg.noise_seed = seed;
      const auto result = mfsi::pipeline::run_simulate(cfg, out_dir);
      if (!quiet)
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      for (const auto& f : result.files) std::cout << "wrote=" << f << "\n";
    } else if (reconstruct->parsed()) {
      mfsi::pipeline::RunConfig cfg = load_config_or_exit(config_path);
      if (seed_given) cfg.noise_seed = seed;
      const std::string records_from = data_dir.empty() ? out_dir : data_dir;
      const auto result = mfsi::pipeline::run_reconstruct(cfg, records_from, out_dir);
      for (const auto& [key, value] : result.metrics)
        std::cout << key << "=" << mfsi::io::format_double(value) << "\n";
      for (const auto& f : result.files) std::cout << "wrote=" << f << "\n";
    } else if (validate->parsed()) {
      mfsi::pipeline::ValidateOptions options;
      options.cases = case_filter;
      options.inject_mismatch = inject_mismatch;
      const auto result = mfsi::pipeline::run_validate(options, out_dir);
      std::cout << result.report();
      if (!result.all_pass) return kExitOracle;
    } else if (extents->parsed()) {
      const mfsi::pipeline::RunConfig cfg = load_config_or_exit(config_path);
      for (const auto& [key, value] : mfsi::pipeline::run_extents(cfg))
        std::cout << key << "=" << mfsi::io::format_double(value) << "\n";
    }
  } catch (const mfsi::InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const mfsi::IncompleteRecord& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const mfsi::NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
