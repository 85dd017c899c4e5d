// riskcascade: batch front end for the two-stage cascade.
//
//   riskcascade extract          --config run.json
//   riskcascade train            --config run.json [--seed N]
//   riskcascade route            --config run.json
//   riskcascade evaluate         --config run.json [--pathway ml|llm]
//   riskcascade sweep-thresholds --config run.json

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "riskcascade/errors.hpp"
#include "riskcascade/pipeline.hpp"

namespace rc = riskcascade;

int main(int argc, char** argv) {
  CLI::App app{"Two-stage cascade for suicide-risk text classification"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> parallelism;
  std::optional<std::string> pathway;

  using Command = int (*)(const rc::PipelineConfig&, std::ostream&, std::ostream&);
  const std::map<std::string, std::pair<Command, std::string>> commands = {
      {"extract", {&rc::cmd_extract, "Run the analyst over every dataset and write feature matrices"}},
      {"train", {&rc::cmd_train, "Train Stage 1, the model roster and the voting weights"}},
      {"route", {&rc::cmd_route, "Apply Stage-1 routing to the test datasets"}},
      {"evaluate", {&rc::cmd_evaluate, "Run the cascade on the test datasets and report metrics"}},
      {"sweep-thresholds", {&rc::cmd_sweep_thresholds, "Pick routing thresholds on the validation split"}},
  };
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--config", config_path, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--out", out_dir, "Override the output directory");
    sub->add_option("--parallelism", parallelism, "Worker bound for remote calls")->check(CLI::PositiveNumber);
    sub->add_option("--pathway", pathway, "Stage-2 pathway")->check(CLI::IsMember({"llm", "ml"}));
  }

  CLI11_PARSE(app, argc, argv);

  rc::PipelineConfig config;
  try {
    config = rc::load_config(config_path);
  } catch (const rc::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (seed) config.seed = *seed;
  if (out_dir) config.output_dir = std::filesystem::absolute(*out_dir);
  if (parallelism) config.parallelism = *parallelism;
  if (pathway) config.pathway = *pathway == "llm" ? rc::PathwayKind::Llm : rc::PathwayKind::Ml;

  const auto* sub = app.get_subcommands().front();
  return commands.at(sub->get_name()).first(config, std::cout, std::cerr);
}
