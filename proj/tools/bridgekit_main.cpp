#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bridgekit/cli/commands.hpp"
#include "bridgekit/error.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kData = 3, kRuntime = 4 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bridgekit: cross-domain knowledge bridging over learned sample graphs"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string sweep_kind;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "override the base seed");
  app.add_option("--out", out, "output directory");

  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  auto* train_akr = app.add_subcommand("train-akr", "train the retrieval model");
  auto* build_graph = app.add_subcommand("build-graph", "retrieve neighbors and build the bridged graph");
  auto* train_gkt = app.add_subcommand("train-gkt", "train the graph transfer model and predict");
  auto* run = app.add_subcommand("run", "all stages plus baselines over every seed");
  auto* sweep = app.add_subcommand("sweep", "homophily, K, graph or similarity sweeps");
  sweep->add_option("--kind", sweep_kind, "homophily | k | graph-ablation | sim-ablation")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    bridgekit::RunConfig config;
    if (!config_path.empty()) config = bridgekit::load_run_config(config_path);
    std::optional<std::filesystem::path> out_dir;
    if (out) out_dir = *out;
    bridgekit::apply_overrides(config, seed, out_dir);

    if (*gen) bridgekit::cmd_gen(config);
    if (*train_akr) bridgekit::cmd_train_akr(config);
    if (*build_graph) bridgekit::cmd_build_graph(config);
    if (*train_gkt) bridgekit::cmd_train_gkt(config);
    if (*run) bridgekit::cmd_run(config);
    if (*sweep) bridgekit::cmd_sweep(config, sweep_kind);
  } catch (const bridgekit::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const bridgekit::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
