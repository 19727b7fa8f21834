#include "robustbid/experiment_config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "robustbid/errors.hpp"

namespace robustbid {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long d = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: " + key + " expects true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

std::string fmt(bool b) { return b ? "true" : "false"; }

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(n) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(n) + ": empty key");
    if (kv.count(key)) throw ConfigError("config: duplicate key " + key);
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

ExperimentConfig ExperimentConfig::from_map(const std::map<std::string, std::string>& kv) {
  ExperimentConfig c;
  std::string budget_kind = "rolling";
  double gamma = 0.0;
  double gamma_prime = c.budget.gamma_prime;
  std::optional<double> Gamma_prime;
  ModelOptions& m = c.model;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"name", [&](auto&, auto& v) { c.name = v; }},
      {"variant", [&](auto&, auto& v) { m.variant = parse_variant(v); }},
      {"fcr_enabled", [&](auto& k, auto& v) { m.fcr_enabled = to_bool(k, v); }},
      {"intraday", [&](auto& k, auto& v) { m.intraday = to_bool(k, v); }},
      {"limited_arbitrage", [&](auto& k, auto& v) { m.limited_arbitrage = to_bool(k, v); }},
      {"limited_rule", [&](auto&, auto& v) { m.limited_rule = parse_limited_rule(v); }},
      {"coupling", [&](auto& k, auto& v) { m.coupling = to_bool(k, v); }},
      {"fcr_block", [&](auto& k, auto& v) { m.fcr_block = static_cast<int>(to_long(k, v)); }},
      {"da_block", [&](auto& k, auto& v) { m.da_block = static_cast<int>(to_long(k, v)); }},
      {"symmetric", [&](auto& k, auto& v) { m.symmetric = to_bool(k, v); }},
      {"relaxation_shortcut", [&](auto& k, auto& v) { m.relaxation_shortcut = to_bool(k, v); }},
      {"terminal",
       [&](auto& k, auto& v) {
         if (v == "none") {
           c.terminal = TerminalRule::none;
         } else if (v == "initial") {
           c.terminal = TerminalRule::initial;
         } else {
           c.terminal = TerminalRule::value;
           c.terminal_value = to_double(k, v);
         }
       }},
      {"x_min", [&](auto& k, auto& v) { c.storage.x_min = to_double(k, v); }},
      {"x_max", [&](auto& k, auto& v) { c.storage.x_max = to_double(k, v); }},
      {"y_min", [&](auto& k, auto& v) { c.storage.y_min = to_double(k, v); }},
      {"y_max", [&](auto& k, auto& v) { c.storage.y_max = to_double(k, v); }},
      {"eta_c", [&](auto& k, auto& v) { c.storage.eta_c = to_double(k, v); }},
      {"eta_d", [&](auto& k, auto& v) { c.storage.eta_d = to_double(k, v); }},
      {"dt_hours", [&](auto& k, auto& v) { c.dt_hours = to_double(k, v); }},
      {"horizon_intervals",
       [&](auto& k, auto& v) { c.horizon_intervals = static_cast<int>(to_long(k, v)); }},
      {"budget_kind", [&](auto&, auto& v) { budget_kind = v; }},
      {"gamma", [&](auto& k, auto& v) { gamma = to_double(k, v); }},
      {"gamma_prime", [&](auto& k, auto& v) { gamma_prime = to_double(k, v); }},
      {"Gamma_prime", [&](auto& k, auto& v) { Gamma_prime = to_double(k, v); }},
      {"bidding_time",
       [&](auto&, auto& v) {
         if (v == "midnight") {
           c.bidding_time = BiddingTime::midnight;
         } else if (v == "8am") {
           c.bidding_time = BiddingTime::eight_am;
         } else {
           throw ConfigError("config: bidding_time must be midnight or 8am");
         }
       }},
      {"day_coupling", [&](auto& k, auto& v) { c.day_coupling = to_bool(k, v); }},
      {"initial_soc",
       [&](auto& k, auto& v) {
         if (v != "default") c.initial_soc = to_double(k, v);
       }},
      {"time_limit", [&](auto& k, auto& v) { c.time_limit = to_double(k, v); }},
      {"gap", [&](auto& k, auto& v) { c.gap = to_double(k, v); }},
      {"node_limit",
       [&](auto& k, auto& v) {
         if (v != "none") c.node_limit = to_long(k, v);
       }},
      {"warm_start", [&](auto& k, auto& v) { c.warm_start = to_bool(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = static_cast<int>(to_long(k, v)); }},
      {"backend", [&](auto&, auto& v) { c.backend = v; }},
      {"countries", [&](auto&, auto& v) { c.countries = split_list(v); }},
      {"settlement_country", [&](auto&, auto& v) { c.settlement_country = v; }},
      {"start_date", [&](auto&, auto& v) { c.start_date = v; }},
      {"end_date", [&](auto&, auto& v) { c.end_date = v; }},
      {"exclude_dst", [&](auto& k, auto& v) { c.exclude_dst = to_bool(k, v); }},
      {"max_gap_samples",
       [&](auto& k, auto& v) { c.max_gap_samples = static_cast<int>(to_long(k, v)); }},
  };
  for (const auto& [k, v] : kv) {
    auto it = setters.find(k);
    if (it == setters.end()) throw ConfigError("config: unknown key '" + k + "'");
    it->second(k, v);
  }
  if (budget_kind == "total") {
    c.budget = UncertaintyBudget::total(gamma);
  } else if (budget_kind == "rolling") {
    c.budget = Gamma_prime ? UncertaintyBudget::rolling(gamma_prime, *Gamma_prime)
                           : UncertaintyBudget::from_eu_rules(gamma_prime);
  } else {
    throw ConfigError("config: budget_kind must be total or rolling");
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  return from_map(parse_key_values(text));
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

void ExperimentConfig::validate() const {
  if (horizon_intervals < 1) throw ConfigError("config: horizon_intervals must be at least 1");
  if (!(dt_hours > 0.0)) throw ConfigError("config: dt_hours must be positive");
  if (countries.empty()) throw ConfigError("config: no country given");
  if (!(time_limit > 0.0)) throw ConfigError("config: time_limit must be positive");
  if (!(gap >= 0.0)) throw ConfigError("config: gap must be nonnegative");
  try {
    storage.validate();
    budget.validate(grid());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (initial_soc && (*initial_soc < storage.y_min || *initial_soc > storage.y_max)) {
    throw ConfigError("config: initial_soc outside [y_min, y_max]");
  }
  if (bidding_time == BiddingTime::eight_am && !day_coupling) {
    throw ConfigError("config: 8am bidding needs day_coupling = true");
  }
}

std::map<std::string, std::string> ExperimentConfig::to_map() const {
  std::map<std::string, std::string> kv;
  kv["name"] = name;
  kv["variant"] = to_string(model.variant);
  kv["fcr_enabled"] = fmt(model.fcr_enabled);
  kv["intraday"] = fmt(model.intraday);
  kv["limited_arbitrage"] = fmt(model.limited_arbitrage);
  kv["limited_rule"] = to_string(model.limited_rule);
  kv["coupling"] = fmt(model.coupling);
  kv["fcr_block"] = std::to_string(model.fcr_block);
  kv["da_block"] = std::to_string(model.da_block);
  kv["symmetric"] = fmt(model.symmetric);
  kv["relaxation_shortcut"] = fmt(model.relaxation_shortcut);
  kv["terminal"] = terminal == TerminalRule::none      ? "none"
                   : terminal == TerminalRule::initial ? "initial"
                                                       : fmt(terminal_value);
  kv["x_min"] = fmt(storage.x_min);
  kv["x_max"] = fmt(storage.x_max);
  kv["y_min"] = fmt(storage.y_min);
  kv["y_max"] = fmt(storage.y_max);
  kv["eta_c"] = fmt(storage.eta_c);
  kv["eta_d"] = fmt(storage.eta_d);
  kv["dt_hours"] = fmt(dt_hours);
  kv["horizon_intervals"] = std::to_string(horizon_intervals);
  if (budget.kind == BudgetKind::total) {
    kv["budget_kind"] = "total";
    kv["gamma"] = fmt(budget.gamma);
  } else {
    kv["budget_kind"] = "rolling";
    kv["gamma_prime"] = fmt(budget.gamma_prime);
    kv["Gamma_prime"] = fmt(budget.Gamma_prime);
  }
  kv["bidding_time"] = bidding_time == BiddingTime::midnight ? "midnight" : "8am";
  kv["day_coupling"] = fmt(day_coupling);
  kv["initial_soc"] = initial_soc ? fmt(*initial_soc) : "default";
  kv["time_limit"] = fmt(time_limit);
  kv["gap"] = fmt(gap);
  kv["node_limit"] = node_limit ? std::to_string(*node_limit) : "none";
  kv["warm_start"] = fmt(warm_start);
  kv["seed"] = std::to_string(seed);
  kv["backend"] = backend;
  std::string cs;
  for (const auto& c : countries) cs += (cs.empty() ? "" : ",") + c;
  kv["countries"] = cs;
  kv["settlement_country"] = settlement_country;
  kv["start_date"] = start_date;
  kv["end_date"] = end_date;
  kv["exclude_dst"] = fmt(exclude_dst);
  kv["max_gap_samples"] = std::to_string(max_gap_samples);
  return kv;
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : to_map()) out += k + " = " + v + "\n";
  return out;
}

}  // namespace robustbid
