#include <CLI11.hpp>
#include <iostream>

#include "ergonet/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ergonet: ergodic operator nets, mean ergodic analysis, Wiener-Wintner experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  bool no_cache = false;

  auto add_run_sub = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--jobs", jobs, "worker threads for independent grid/batch work");
    sub->add_flag("--no-cache", no_cache, "recompute even if a cached result exists");
    return sub;
  };

  CLI::App* analyze = add_run_sub("analyze", "mean-ergodic battery on one model");
  CLI::App* net = add_run_sub("net", "ergodic-net ladders and invariance defects");
  CLI::App* uniform = add_run_sub("uniform", "uniform-family convergence profiles");
  CLI::App* ww = add_run_sub("ww", "Wiener-Wintner experiments (cesaro/abel/dirichlet/square_map)");
  CLI::App* equivalence = add_run_sub("equivalence", "randomized mean-ergodicity batteries");
  CLI::App* schema = app.add_subcommand("schema", "print the config JSON schema");

  CLI11_PARSE(app, argc, argv);

  try {
    if (schema->parsed()) {
      std::cout << ergonet::runner::config_schema_text();
      return 0;
    }
    const CLI::App* active = nullptr;
    for (const CLI::App* sub : {analyze, net, uniform, ww, equivalence})
      if (sub->parsed()) active = sub;
    if (!active) return 2;

    const ergonet::runner::RunConfig cfg = ergonet::runner::RunConfig::load(config_path);
    if (cfg.subcommand != active->get_name()) {
      std::cerr << "ergonet: config declares subcommand '" << cfg.subcommand
                << "' but was invoked as '" << active->get_name() << "'\n";
      return 2;
    }
    const auto result = ergonet::runner::run(
        config_path, out_dir.empty() ? std::nullopt : std::make_optional(out_dir), jobs,
        !no_cache);
    return result.exit_code;
  } catch (const ergonet::contract_error& e) {
    std::cerr << "ergonet: invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ergonet: run failed: " << e.what() << "\n";
    return 1;
  }
}
