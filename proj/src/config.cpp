#include "boltzlab/config.hpp"

#include "boltzlab/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

extern char **environ;

namespace boltzlab {

ConfigError::ConfigError(const std::string &msg, int line_, std::string key_)
    : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
      line(line_),
      key(std::move(key_)) {}

namespace {

std::string trim(const std::string &s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_double(const std::string &s) {
  double x = 0;
  const char *end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || p != end || !std::isfinite(x)) throw std::invalid_argument("expected a number, got '" + s + "'");
  return x;
}

long long to_int(const std::string &s) {
  long long x = 0;
  const char *end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || p != end) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return x;
}

bool to_bool(const std::string &s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::vector<double> to_list(const std::string &s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  return out;
}

std::string from_list(const std::vector<double> &v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

std::string one_of(const std::string &s, std::initializer_list<const char *> allowed) {
  for (const char *a : allowed)
    if (s == a) return s;
  std::string msg = "expected one of";
  for (const char *a : allowed) msg += std::string(" ") + a;
  throw std::invalid_argument(msg + ", got '" + s + "'");
}

struct Entry {
  std::string key;
  std::function<void(RunConfig &, const std::string &)> set;
  std::function<std::string(const RunConfig &)> get;
};

#define NUM(name, field)                                                          \
  Entry {                                                                         \
    name, [](RunConfig &c, const std::string &v) { c.field = to_double(v); },     \
        [](const RunConfig &c) { return format_double(c.field); }                 \
  }
#define INT(name, field)                                                                          \
  Entry {                                                                                         \
    name, [](RunConfig &c, const std::string &v) { c.field = static_cast<decltype(c.field)>(to_int(v)); }, \
        [](const RunConfig &c) { return std::to_string(c.field); }                                \
  }
#define FLAG(name, field)                                                       \
  Entry {                                                                       \
    name, [](RunConfig &c, const std::string &v) { c.field = to_bool(v); },     \
        [](const RunConfig &c) { return std::string(c.field ? "true" : "false"); } \
  }
#define STR(name, field, ...)                                                                  \
  Entry {                                                                                      \
    name, [](RunConfig &c, const std::string &v) { c.field = one_of(v, {__VA_ARGS__}); },     \
        [](const RunConfig &c) { return c.field; }                                             \
  }
#define LIST(name, field)                                                       \
  Entry {                                                                       \
    name, [](RunConfig &c, const std::string &v) { c.field = to_list(v); },     \
        [](const RunConfig &c) { return from_list(c.field); }                   \
  }

const std::vector<Entry> &entries() {
  static const std::vector<Entry> table = {
      INT("N", N),
      INT("M", M),
      NUM("R", R),
      STR("phi", kernel.phi, "power", "capped"),
      NUM("gamma", kernel.gamma),
      NUM("phi_scale", kernel.phi_scale),
      STR("angular", kernel.angular, "constant", "band", "power"),
      STR("normalization", kernel.normalization, "unit", "value"),
      NUM("cb", kernel.cb),
      NUM("theta_b", kernel.theta_b),
      NUM("alpha", kernel.alpha),
      FLAG("validation", kernel.validation),
      FLAG("fold", kernel.fold),
      INT("split_m", kernel.split_m),
      INT("split_n", kernel.split_n),
      STR("piece", kernel.piece, "full", "SS", "RS", "SR", "RR"),
      STR("init", init.kind, "maxwellian", "disk", "double-bump", "bkw", "snapshot"),
      NUM("init_radius", init.radius),
      LIST("init_center", init.center),
      NUM("init_separation", init.separation),
      NUM("init_width", init.width),
      NUM("init_temperature", init.temperature),
      NUM("init_time", init.time),
      Entry{"init_file", [](RunConfig &c, const std::string &v) { c.init.file = v; },
            [](const RunConfig &c) { return c.init.file; }},
      STR("integrator", integrator, "exponential", "rk4"),
      NUM("dt", dt),
      NUM("t_end", t_end),
      INT("stride", stride),
      LIST("snapshots", snapshots),
      FLAG("conservative", conservative),
      FLAG("equilibrium_fix", equilibrium_fix),
      INT("angles", angles),
      INT("azimuth", azimuth),
      STR("loss_mode", loss_mode, "fft", "direct"),
      NUM("tau", tau),
      INT("depth", depth),
      Entry{"mu",
            [](RunConfig &c, const std::string &v) {
              if (v != "auto") to_double(v);
              c.mu = v;
            },
            [](const RunConfig &c) { return c.mu; }},
      LIST("report_times", report_times),
      Entry{"out", [](RunConfig &c, const std::string &v) { c.out = v; }, [](const RunConfig &c) { return c.out; }},
      Entry{"seed", [](RunConfig &c, const std::string &v) { c.seed = static_cast<std::uint64_t>(to_int(v)); },
            [](const RunConfig &c) { return std::to_string(c.seed); }},
  };
  return table;
}

#undef NUM
#undef INT
#undef FLAG
#undef STR
#undef LIST

const Entry *find_entry(const std::string &key) {
  for (const Entry &e : entries())
    if (e.key == key) return &e;
  return nullptr;
}

std::string upper(std::string s) {
  for (char &ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

void validate(const RunConfig &c, const std::map<std::string, int> &lines) {
  auto fail = [&](const std::string &key, const std::string &msg) {
    auto it = lines.find(key);
    throw ConfigError(key + ": " + msg, it == lines.end() ? 0 : it->second, key);
  };
  if (c.N != 2 && c.N != 3) fail("N", "dimension must be 2 or 3");
  if (c.M < 8 || (c.M & (c.M - 1)) != 0) fail("M", "must be a power of two >= 8");
  if (!(c.R > 0)) fail("R", "must be positive");
  if (!(c.kernel.gamma >= 0.0 && c.kernel.gamma < 2.0)) fail("gamma", "gamma must lie in [0, 2)");
  if (c.kernel.gamma == 0.0 && !c.kernel.validation)
    fail("gamma", "gamma = 0 (constant kernel) needs validation = true");
  if (!(c.kernel.phi_scale > 0)) fail("phi_scale", "must be positive");
  if (c.kernel.angular == "band" && !(c.kernel.theta_b > 0 && c.kernel.theta_b < std::acos(0.0)))
    fail("theta_b", "band angular part needs theta_b in (0, pi/2)");
  if (c.kernel.angular == "power" && !(c.kernel.alpha > 0)) fail("alpha", "power angular part needs alpha > 0");
  if (c.kernel.normalization == "value" && !(c.kernel.cb > 0)) fail("cb", "value normalization needs cb > 0");
  if (c.kernel.piece != "full") {
    if (c.kernel.split_m < 4) fail("split_m", "a split piece needs split_m >= 4");
    if (c.kernel.split_n < 4) fail("split_n", "a split piece needs split_n >= 4");
  }
  if (!(c.init.radius > 0)) fail("init_radius", "must be positive");
  if (!c.init.center.empty() && static_cast<int>(c.init.center.size()) != c.N)
    fail("init_center", "needs exactly N components");
  if (!(c.init.width > 0)) fail("init_width", "must be positive");
  if (!(c.init.temperature > 0)) fail("init_temperature", "must be positive");
  if (!(c.init.time >= 0)) fail("init_time", "must be nonnegative");
  if (c.init.kind == "snapshot" && c.init.file.empty()) fail("init_file", "snapshot initial datum needs init_file");
  if (c.init.kind == "bkw" && c.kernel.gamma != 0.0) fail("init", "bkw initial datum needs the constant kernel (gamma = 0)");
  if (!(c.dt > 0)) fail("dt", "must be positive");
  if (!(c.t_end >= 0)) fail("t_end", "must be nonnegative");
  if (c.stride < 1) fail("stride", "must be >= 1");
  for (double t : c.snapshots)
    if (!(t >= 0)) fail("snapshots", "times must be nonnegative");
  if (c.angles < 0) fail("angles", "must be >= 0");
  if (c.azimuth < 0) fail("azimuth", "must be >= 0");
  if (!(c.tau > 0)) fail("tau", "must be positive");
  if (c.depth < 1) fail("depth", "must be >= 1");
  if (c.mu != "auto") {
    const double mu = to_double(c.mu);
    if (!(mu > 0 && mu < 1)) fail("mu", "must lie in (0, 1) or be auto");
  }
  for (double t : c.report_times)
    if (!(t > c.tau)) fail("report_times", "times must exceed tau");
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Entry &e : entries()) out.push_back(e.key);
  return out;
}

RunConfig parse_config(const std::string &text, const std::map<std::string, std::string> &env) {
  RunConfig c;
  std::map<std::string, int> lines;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value, got '" + line + "'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Entry *e = find_entry(key);
    if (!e) throw ConfigError("unknown key '" + key + "'", lineno, key);
    if (lines.count(key)) throw ConfigError("duplicate key '" + key + "'", lineno, key);
    try {
      e->set(c, value);
    } catch (const std::invalid_argument &err) {
      throw ConfigError(key + ": " + err.what(), lineno, key);
    }
    lines[key] = lineno;
  }
  for (const auto &[name, value] : env) {
    if (name.rfind(env_prefix, 0) != 0) continue;
    const std::string suffix = name.substr(std::string(env_prefix).size());
    const Entry *hit = nullptr;
    for (const Entry &e : entries())
      if (upper(e.key) == suffix) hit = &e;
    if (!hit) throw ConfigError("environment variable " + name + " matches no config key", 0, suffix);
    try {
      hit->set(c, trim(value));
    } catch (const std::invalid_argument &err) {
      throw ConfigError(name + ": " + err.what(), 0, hit->key);
    }
    lines.erase(hit->key);
  }
  validate(c, lines);
  return c;
}

std::string echo_config(const RunConfig &c) {
  std::string out;
  for (const Entry &e : entries()) out += e.key + " = " + e.get(c) + "\n";
  return out;
}

std::map<std::string, std::string> environment_overrides() {
  std::map<std::string, std::string> out;
  const std::string prefix = env_prefix;
  for (char **p = environ; p && *p; ++p) {
    const std::string kv = *p;
    if (kv.rfind(prefix, 0) != 0) continue;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

}  // namespace boltzlab
