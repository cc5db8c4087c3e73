#include "fhslab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace fhslab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(line, "expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& v, int line) {
  const double d = to_double(v, line);
  const int i = static_cast<int>(d);
  if (d != i) fail(line, "expected an integer, got '" + v + "'");
  return i;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(unquote(item));
  }
  return out;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : split_list(text)) out.push_back(std::stod(tok));
  return out;
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = {
      "monotonicity",    "decay",         "gamma_sweep",
      "dyadic_layers",   "hardy_chain",   "summability_scaling",
      "besov_regularity", "interpolation_scaling", "cutoff_bounds"};
  return names;
}

void RunConfig::validate() const {
  try {
    (void)params();
  } catch (const ParamError& e) {
    throw ConfigError(std::string("[params] ") + e.what());
  }
  if (!(r_min > 0.0) || !(r_max > r_min))
    throw ConfigError("[grid] needs 0 < r_min < r_max");
  if (M < 64) throw ConfigError("[grid] needs M >= 64");
  if (max_iter < 1) throw ConfigError("[optimizer] max_iter must be >= 1");
  if (!(tol > 0.0)) throw ConfigError("[optimizer] tol must be > 0");
  if (!(lambda > 0.0)) throw ConfigError("[optimizer] lambda must be > 0");
  if (threads < 1) throw ConfigError("[run] threads must be >= 1");
  const auto& reg = known_checks();
  for (const auto& c : checks)
    if (std::find(reg.begin(), reg.end(), c) == reg.end())
      throw ConfigError("unknown check '" + c + "'");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (val.empty()) fail(line, "empty value for '" + key + "'");

    if (section == "params") {
      if (key == "N") cfg.N = to_int(val, line);
      else if (key == "p") cfg.p = to_double(val, line);
      else if (key == "s") cfg.s = to_double(val, line);
      else if (key == "alpha") cfg.alpha = to_double(val, line);
      else fail(line, "unknown key '" + key + "' in [params]");
    } else if (section == "grid") {
      if (key == "r_min") cfg.r_min = to_double(val, line);
      else if (key == "r_max") cfg.r_max = to_double(val, line);
      else if (key == "M") cfg.M = to_int(val, line);
      else fail(line, "unknown key '" + key + "' in [grid]");
    } else if (section == "optimizer") {
      if (key == "max_iter") cfg.max_iter = to_int(val, line);
      else if (key == "tol") cfg.tol = to_double(val, line);
      else if (key == "init") cfg.init = unquote(val);
      else if (key == "lambda") cfg.lambda = to_double(val, line);
      else fail(line, "unknown key '" + key + "' in [optimizer]");
    } else if (section == "checks") {
      if (key == "names") cfg.checks = split_list(val);
      else cfg.overrides[key] = unquote(val);  // e.g. gamma_sweep.gammas
    } else if (section == "run") {
      if (key == "output_dir") cfg.output_dir = unquote(val);
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_double(val, line));
      else if (key == "threads") cfg.threads = to_int(val, line);
      else fail(line, "unknown key '" + key + "' in [run]");
    } else if (section.empty()) {
      fail(line, "key outside any section");
    } else {
      fail(line, "unknown section [" + section + "]");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  if (key.find('.') == std::string::npos)
    throw ConfigError("override key must look like section.key");
  const std::string text = "[" + key.substr(0, key.find('.')) + "]\n" +
                           key.substr(key.find('.') + 1) + " = " + value + "\n";
  // reuse the parser on a one-line snippet, then merge the touched field
  RunConfig parsed = parse_config_text(text);
  const std::string section = key.substr(0, key.find('.'));
  const std::string field = key.substr(key.find('.') + 1);
  if (section == "params") {
    if (field == "N") cfg.N = parsed.N;
    else if (field == "p") cfg.p = parsed.p;
    else if (field == "s") cfg.s = parsed.s;
    else if (field == "alpha") cfg.alpha = parsed.alpha;
  } else if (section == "grid") {
    if (field == "r_min") cfg.r_min = parsed.r_min;
    else if (field == "r_max") cfg.r_max = parsed.r_max;
    else if (field == "M") cfg.M = parsed.M;
  } else if (section == "optimizer") {
    if (field == "max_iter") cfg.max_iter = parsed.max_iter;
    else if (field == "tol") cfg.tol = parsed.tol;
    else if (field == "init") cfg.init = parsed.init;
    else if (field == "lambda") cfg.lambda = parsed.lambda;
  } else if (section == "run") {
    if (field == "output_dir") cfg.output_dir = parsed.output_dir;
    else if (field == "seed") cfg.seed = parsed.seed;
    else if (field == "threads") cfg.threads = parsed.threads;
  } else if (section == "checks") {
    if (field == "names") cfg.checks = parsed.checks;
    else cfg.overrides[field] = value;
  } else {
    throw ConfigError("unknown override section '" + section + "'");
  }
}

std::string config_digest(const RunConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << cfg.N << '|' << cfg.p << '|' << cfg.s << '|' << cfg.alpha << '|'
     << cfg.r_min << '|' << cfg.r_max << '|' << cfg.M << '|' << cfg.max_iter
     << '|' << cfg.tol << '|' << cfg.init << '|' << cfg.lambda << '|'
     << cfg.seed << '|' << cfg.threads;
  for (const auto& c : cfg.checks) os << '|' << c;
  for (const auto& [k, v] : cfg.overrides) os << '|' << k << '=' << v;
  const std::string s = os.str();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace fhslab
