#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "vertcover/errors.hpp"
#include "vertcover/runner.hpp"

using namespace vertcover;

int main(int argc, char** argv) {
  CLI::App app{"numeric verification of vertical-segment covering by "
               "schlicht disk images"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  bool record = false, strict = false;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_flag("--record", record, "write golden copies of the reports");
    sub->add_flag("--strict", strict,
                  "treat experiment-grade warnings as fatal");
    sub->add_option("--out", out_dir, "output directory (default: out)");
  };

  CLI::App* analyze = app.add_subcommand(
      "analyze", "trace level regions, measure vertical segments");
  CLI::App* verify = app.add_subcommand(
      "verify", "run the inequality suite over the configured grid");
  CLI::App* symmetrize = app.add_subcommand(
      "symmetrize", "Steiner-symmetrize a region file about the real axis");
  CLI::App* report = app.add_subcommand(
      "report", "render golden values into a markdown summary");
  std::string region_file;
  symmetrize->add_option("region", region_file, "region JSON file")
      ->required();
  for (CLI::App* sub : {analyze, verify, symmetrize, report})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    if (record) cfg.record = true;
    if (strict) cfg.strict = true;
    if (!out_dir.empty()) cfg.out_dir = out_dir;

    if (analyze->parsed()) return cmd_analyze(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (symmetrize->parsed()) return cmd_symmetrize(cfg, region_file);
    if (report->parsed()) return cmd_report(cfg);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
