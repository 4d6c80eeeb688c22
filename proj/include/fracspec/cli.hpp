#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace fracspec::cli {

struct RunConfig {
  std::string subcommand;  // eigen, sample, smallball, secondkind, filter, fisher, hilbert
  nlohmann::json params = nlohmann::json::object();
  std::optional<std::uint64_t> seed;
  std::string output;  // empty writes to stdout
  std::string format = "csv";
  int jobs = 1;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

// defaults merged in, types checked, unknown keys rejected (ConfigError)
RunConfig resolve(const RunConfig& cfg);

// full artifact text for a resolved or unresolved config
std::string render(const RunConfig& cfg);

// writes the artifact to cfg.output or `out`; returns the exit status
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

const std::vector<std::string>& preset_names();
RunConfig preset(const std::string& name);

// parameter names accepted by a subcommand
std::vector<std::string> param_keys(const std::string& subcommand);

int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fracspec::cli
