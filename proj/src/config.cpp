#include "mcfv/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mcfv {

namespace {

const std::vector<std::pair<std::string, std::string>>& defaults() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"preset", "none"},
      {"problem", "time"},
      {"samples", "1000"},
      {"seed", "1"},
      {"cells", "400"},
      {"order", "2"},
      {"limiter", "minmod"},
      {"courant", "0.45"},
      {"threads", "0"},
      {"unbiased_variance", "false"},
      {"final_time", "auto"},
      {"profile", "standard"},
      {"profile_value", "1"},
      {"ou.mu", "0.25"},
      {"ou.theta", "4"},
      {"ou.sigma", "0.31622776601683794"},
      {"ou.a0", "-0.25"},
      {"micro_step", "0"},
      {"field.sigma", "10"},
      {"field.q", "5"},
      {"field.cutoff", "50"},
      {"field.zeta", "2"},
      {"distance", "0.5"},
      {"noise_cells", "0"},
      {"levels", "100,200,400,800"},
      {"reference", "auto"},
      {"oracle_refine", "4"},
      {"common_samples", "true"},
      {"schemes", ""},
      {"sample_index", "0"},
  };
  return table;
}

using Preset = std::vector<std::pair<std::string, std::string>>;

const std::map<std::string, Preset>& preset_table() {
  static const std::map<std::string, Preset> table = {
      {"none", {}},
      // Time-dependent problem at t = 1 (original scale: 1600 cells, 1e6 samples).
      {"fig1-desk",
       {{"problem", "time"}, {"cells", "400"}, {"samples", "10000"}, {"order", "2"}, {"limiter", "minmod"}}},
      {"fig1-desk-first", {{"problem", "time"}, {"cells", "400"}, {"samples", "10000"}, {"order", "1"}}},
      // Grid sweep of the time-dependent problem (original scale: 1e6 samples).
      {"fig2-desk",
       {{"problem", "time"},
        {"levels", "100,200,400,800"},
        {"samples", "10000"},
        {"order", "2"},
        {"limiter", "minmod"},
        {"reference", "analytic"}}},
      // Space-dependent problem, q = 1 (original scale: 32768 cells, 1e4 samples).
      {"fig3-desk",
       {{"problem", "space"},
        {"cells", "2048"},
        {"samples", "1000"},
        {"order", "2"},
        {"limiter", "minmod"},
        {"field.sigma", "10"},
        {"field.q", "1"},
        {"field.zeta", "1"}}},
      // Space-dependent problem with mu = 0, q = 5 (original scale: 8192 cells, 1e5 samples).
      {"fig4-desk",
       {{"problem", "space"},
        {"cells", "2048"},
        {"samples", "1000"},
        {"order", "2"},
        {"limiter", "minmod"},
        {"field.sigma", "10"},
        {"field.q", "5"},
        {"field.zeta", "0"}}},
      // Self-convergence of the space-dependent problem (original scale: up to
      // 65536 cells, 1e4 samples).
      {"fig5-desk",
       {{"problem", "space"},
        {"levels", "1024,2048,4096"},
        {"samples", "1000"},
        {"order", "2"},
        {"limiter", "minmod"},
        {"field.sigma", "10"},
        {"field.q", "5"},
        {"field.zeta", "2"},
        {"reference", "finest"}}},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_integer(const std::string& key, const std::string& text) {
  T value{};
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected an integer, got '" + text + "'");
  return value;
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

Settings::Settings() {
  for (const auto& [key, value] : defaults()) values_[key] = value;
}

const std::vector<std::string>& Settings::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [key, value] : defaults()) out.push_back(key);
    return out;
  }();
  return names;
}

const std::vector<std::string>& Settings::presets() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, preset] : preset_table()) out.push_back(name);
    return out;
  }();
  return names;
}

void Settings::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "unknown configuration key");
  it->second = value;
}

void Settings::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("", "expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::string& Settings::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "unknown configuration key");
  return it->second;
}

double Settings::get_double(const std::string& key) const {
  const std::string& text = get(key);
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
}

int Settings::get_int(const std::string& key) const { return parse_integer<int>(key, get(key)); }
std::size_t Settings::get_size(const std::string& key) const { return parse_integer<std::size_t>(key, get(key)); }
std::uint64_t Settings::get_u64(const std::string& key) const { return parse_integer<std::uint64_t>(key, get(key)); }

bool Settings::get_bool(const std::string& key) const {
  const std::string& text = get(key);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::vector<std::size_t> Settings::get_sizes(const std::string& key) const {
  std::vector<std::size_t> out;
  std::stringstream stream(get(key));
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_integer<std::size_t>(key, item));
  }
  return out;
}

void Settings::apply_preset(const std::string& name) {
  const auto& table = preset_table();
  auto it = table.find(name);
  if (it == table.end()) throw ConfigError("preset", "unknown preset '" + name + "'");
  for (const auto& [key, value] : it->second) set(key, value);
  values_["preset"] = name;
}

void Settings::write(std::ostream& out) const {
  for (const auto& [key, value] : values_) out << key << " = " << value << '\n';
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in, const std::string& source) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", source + ":" + std::to_string(number) + ": expected 'key = value'");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  return parse_key_values(in, path);
}

RunConfig make_run_config(const Settings& s, Problem problem, std::size_t cells) {
  RunConfig cfg;
  try {
    cfg.problem = problem;
    cfg.grid = GridSpec::unit(cells);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("cells", e.what());
  }
  cfg.samples = s.get_size("samples");
  if (cfg.samples < 1) throw ConfigError("samples", "must be >= 1");
  cfg.seed = s.get_u64("seed");
  cfg.scheme.order = s.get_int("order");
  if (cfg.scheme.order != 1 && cfg.scheme.order != 2) throw ConfigError("order", "must be 1 or 2");
  try {
    cfg.scheme.limiter = parse_limiter(s.get("limiter"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("limiter", e.what());
  }
  try {
    cfg.profile.kind = parse_profile_kind(s.get("profile"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("profile", e.what());
  }
  cfg.scheme.courant = s.get_double("courant");
  if (!(cfg.scheme.courant > 0.0) || cfg.scheme.courant > 1.0) throw ConfigError("courant", "must lie in (0, 1]");
  cfg.profile.value = s.get_double("profile_value");
  cfg.threads = s.get_size("threads");
  cfg.unbiased_variance = s.get_bool("unbiased_variance");

  cfg.ou = {s.get_double("ou.mu"), s.get_double("ou.theta"), s.get_double("ou.sigma"), s.get_double("ou.a0")};
  if (!(cfg.ou.theta > 0.0)) throw ConfigError("ou.theta", "must be positive");
  if (!(cfg.ou.sigma >= 0.0)) throw ConfigError("ou.sigma", "must be non-negative");
  cfg.micro_step = s.get_double("micro_step");
  if (cfg.micro_step < 0.0) throw ConfigError("micro_step", "must be non-negative");

  cfg.field.sigma = s.get_double("field.sigma");
  if (!(cfg.field.sigma >= 0.0)) throw ConfigError("field.sigma", "must be non-negative");
  cfg.field.q = s.get_int("field.q");
  if (cfg.field.q < 1) throw ConfigError("field.q", "must be >= 1");
  cfg.field.cutoff = s.get_double("field.cutoff");
  if (!(cfg.field.cutoff > 0.0)) throw ConfigError("field.cutoff", "must be positive");
  cfg.zeta = s.get_double("field.zeta");
  if (!(cfg.zeta >= 0.0)) throw ConfigError("field.zeta", "must be non-negative");
  cfg.noise_cells = s.get_size("noise_cells");
  if (problem == Problem::space && cells % 2 != 0) throw ConfigError("cells", "space problem needs an even count");

  const std::string& final_time = s.get("final_time");
  if (final_time == "auto") {
    if (problem == Problem::time) {
      cfg.final_time = 1.0;
    } else {
      const double mu = cfg.resolved_field().mu;
      const double distance = s.get_double("distance");
      if (!(distance > 0.0)) throw ConfigError("distance", "must be positive");
      cfg.final_time = mu > 0.0 ? distance / mu : 2.0;
    }
  } else {
    cfg.final_time = s.get_double("final_time");
    if (!(cfg.final_time > 0.0)) throw ConfigError("final_time", "must be positive or auto");
  }

  if (problem == Problem::time && cfg.micro_step == 0.0 && !(cfg.ou.mu + cfg.ou.sigma > 0.0))
    throw ConfigError("micro_step", "ou.mu + ou.sigma <= 0; set micro_step explicitly");
  if (cfg.noise_cells != 0 && (cfg.noise_cells < cells || cfg.noise_cells % cells != 0))
    throw ConfigError("noise_cells", "must be 0 or a multiple of cells");
  return cfg;
}

std::string format_double(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

}  // namespace mcfv
