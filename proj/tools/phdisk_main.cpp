#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "phdisk/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"phdisk: transforms, solvers and diagnostics on the unit disk"};
  std::string config_path;
  std::string out_dir;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_flag("--verbose", verbose, "progress messages on stderr");
  app.set_version_flag("--version", phdisk::cli::version());
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << nlohmann::json{{"error", {{"type", "usage"}, {"message", e.what()}}}}.dump() << '\n';
    return 1;
  }

  try {
    std::ifstream is(config_path);
    if (!is) throw phdisk::InvalidArgument("cannot open config '" + config_path + "'");
    const auto j = nlohmann::json::parse(is);
    auto cfg = phdisk::cli::parse_config(j, std::filesystem::path(config_path).parent_path());
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    phdisk::cli::RunOptions opts;
    opts.verbose = verbose;
    opts.threads = phdisk::cli::threads_from_env();
    const auto doc = phdisk::cli::run(cfg, opts, &std::cerr);
    if (!doc.at("ok").get<bool>()) {
      std::cerr << nlohmann::json{{"error", {{"type", "selftest"}, {"message", "one or more self-test checks failed"}}}}
                       .dump()
                << '\n';
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    const auto [code, doc] = phdisk::cli::describe_error(e);
    std::cerr << doc.dump() << '\n';
    return code;
  }
}
