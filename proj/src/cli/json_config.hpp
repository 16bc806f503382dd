#pragma once

#include <istream>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace accent::cli {

/// Reads `--config` files as a JSON object keyed by long flag names. A file
/// with a "settings" object (a run manifest) contributes only that object,
/// so a manifest can be replayed directly. Values go to whichever
/// subcommand was selected on the command line.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;

 private:
  const CLI::App* root_;
};

}  // namespace accent::cli
