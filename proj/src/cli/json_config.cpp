#include "json_config.hpp"

#include "json.hpp"

namespace accent::cli {

using nlohmann::json;

namespace {

std::string scalar_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number() || value.is_null()) return value.dump();
  throw CLI::ConversionError("config values must be scalars or arrays of scalars");
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool,
                                  std::string) const {
  json out = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
    const std::string& name = opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& results = opt->results();
      out[name] = results.size() == 1 ? json(results.front()) : json(results);
    } else if (default_also && !opt->get_default_str().empty()) {
      out[name] = opt->get_default_str();
    }
  }
  return out.dump(2);
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  json doc;
  try {
    doc = json::parse(input);
  } catch (const json::parse_error& e) {
    throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("settings")) doc = doc.at("settings");
  if (!doc.is_object()) throw CLI::ConversionError("config must be a JSON object");

  std::vector<std::string> parents;
  if (root_ != nullptr) {
    for (const CLI::App* sub : root_->get_subcommands()) parents.push_back(sub->get_name());
  }
  std::vector<CLI::ConfigItem> items;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_null()) continue;
    CLI::ConfigItem item;
    item.parents = parents;
    item.name = key;
    if (value.is_array()) {
      for (const auto& v : value) item.inputs.push_back(scalar_text(v));
    } else {
      item.inputs.push_back(scalar_text(value));
    }
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace accent::cli
