#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phdisk/io.hpp"
#include "phdisk/solvers.hpp"

namespace phdisk::cli {

const char* version();

struct SliceRequest {
  std::string field;
  Slice slice;
};

struct RunConfig {
  std::string command;
  int n_theta = 0;  // 0: take the dimensions from the first grid input
  int n_r = 0;
  SolverConfig solver;
  nlohmann::json inputs = nlohmann::json::object();  // name -> path or constant
  nlohmann::json params = nlohmann::json::object();
  std::filesystem::path output_dir = ".";
  std::filesystem::path base_dir = ".";  // relative input paths resolve here
  std::string format = "phd1";
  std::vector<SliceRequest> emit_slices;
  nlohmann::json source;  // the config as given, echoed into report.json
};

// Validates and converts a JSON config. Throws InvalidArgument.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");

struct RunOptions {
  bool verbose = false;
  int threads = 1;
};

// Executes the command, writes its artifacts and report.json into
// config.output_dir and returns the report document.
nlohmann::json run(const RunConfig& config, const RunOptions& options = {}, std::ostream* log = nullptr);

// Reads PHDISK_THREADS; absent means 1. Throws InvalidArgument on junk.
int threads_from_env();

// Converts a caught exception into (exit code, error document).
std::pair<int, nlohmann::json> describe_error(const std::exception& e);

}  // namespace phdisk::cli
