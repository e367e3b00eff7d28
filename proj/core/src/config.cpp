#include "hcran/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

extern char** environ;

namespace hcran {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string v = lower(trim(raw));
  if (v == "inf" || v == "+inf" || v == "infinity") return kInfinity;
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': cannot parse '" + raw +
                                "' as a number");
  }
}

long long parse_int(const std::string& key, const std::string& raw) {
  const double d = parse_double(key, raw);
  if (!std::isfinite(d) || d != std::floor(d))
    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" +
                                raw + "'");
  return static_cast<long long>(d);
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double(key, item));
  }
  return out;
}

std::string format_double(double d) {
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += format_double(v[i]);
  }
  return s;
}

using Setter = std::function<void(ConfigBundle&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const ConfigBundle&)>;

struct KeyHandler {
  Setter set;
  Getter get;
};

#define HCRAN_DOUBLE_KEY(name)                                                            \
  {#name, {[](ConfigBundle& b, const std::string& k, const std::string& v) {             \
             b.system.name = parse_double(k, v);                                         \
           },                                                                            \
           [](const ConfigBundle& b) { return format_double(b.system.name); }}}
#define HCRAN_INT_KEY(name)                                                               \
  {#name, {[](ConfigBundle& b, const std::string& k, const std::string& v) {             \
             b.system.name = static_cast<decltype(b.system.name)>(parse_int(k, v));      \
           },                                                                            \
           [](const ConfigBundle& b) { return std::to_string(b.system.name); }}}
#define HCRAN_LIST_KEY(name)                                                              \
  {#name, {[](ConfigBundle& b, const std::string& k, const std::string& v) {             \
             b.system.name = parse_list(k, v);                                           \
           },                                                                            \
           [](const ConfigBundle& b) { return format_list(b.system.name); }}}

const std::map<std::string, KeyHandler>& handlers() {
  static const std::map<std::string, KeyHandler> table = {
      HCRAN_INT_KEY(num_rrh),
      HCRAN_INT_KEY(num_mbs),
      HCRAN_INT_KEY(num_rue),
      HCRAN_INT_KEY(num_mue),
      HCRAN_INT_KEY(antennas_rrh),
      HCRAN_INT_KEY(antennas_mbs),
      HCRAN_DOUBLE_KEY(p_max),
      HCRAN_DOUBLE_KEY(p_avg),
      HCRAN_DOUBLE_KEY(p_mbs),
      HCRAN_DOUBLE_KEY(fronthaul_cap),
      HCRAN_DOUBLE_KEY(interference_cap),
      HCRAN_DOUBLE_KEY(alpha),
      HCRAN_LIST_KEY(rate_weights),
      HCRAN_LIST_KEY(power_weights),
      HCRAN_DOUBLE_KEY(default_power_weight),
      HCRAN_LIST_KEY(trad_rate_weights),
      HCRAN_LIST_KEY(trad_power_weights),
      HCRAN_DOUBLE_KEY(tradeoff_v),
      HCRAN_DOUBLE_KEY(noise_psd_dbm),
      HCRAN_DOUBLE_KEY(bandwidth_hz),
      HCRAN_DOUBLE_KEY(pathloss_exponent),
      HCRAN_DOUBLE_KEY(area_radius),
      HCRAN_DOUBLE_KEY(reference_distance),
      HCRAN_DOUBLE_KEY(rrh_min_radius),
      HCRAN_DOUBLE_KEY(rrh_max_radius),
      HCRAN_DOUBLE_KEY(rue_cluster_radius),
      HCRAN_DOUBLE_KEY(rue_min_distance),
      HCRAN_DOUBLE_KEY(mue_min_rrh_distance),
      HCRAN_DOUBLE_KEY(convergence_tol),
      HCRAN_DOUBLE_KEY(l1_reg),
      HCRAN_DOUBLE_KEY(active_link_threshold),
      HCRAN_INT_KEY(max_wmmse_iters),
      HCRAN_DOUBLE_KEY(qcqp_tol),
      HCRAN_INT_KEY(qcqp_max_iters),
      HCRAN_DOUBLE_KEY(fading_gain_cap),
      HCRAN_INT_KEY(slots),
      HCRAN_DOUBLE_KEY(warmup_fraction),
      {"rng_seed",
       {[](ConfigBundle& b, const std::string& k, const std::string& v) {
          const long long s = parse_int(k, v);
          if (s < 0) throw std::invalid_argument("config key 'rng_seed' must be >= 0");
          b.system.rng_seed = static_cast<std::uint64_t>(s);
        },
        [](const ConfigBundle& b) { return std::to_string(b.system.rng_seed); }}},
      {"lambda",
       {[](ConfigBundle& b, const std::string& k, const std::string& v) {
          b.traffic.lambda = parse_list(k, v);
        },
        [](const ConfigBundle& b) { return format_list(b.traffic.lambda); }}},
      {"a_max",
       {[](ConfigBundle& b, const std::string& k, const std::string& v) {
          b.traffic.a_max = parse_double(k, v);
        },
        [](const ConfigBundle& b) { return format_double(b.traffic.a_max); }}},
      {"arrival_law",
       {[](ConfigBundle& b, const std::string&, const std::string& v) {
          const std::string law = lower(trim(v));
          if (law == "uniform")
            b.traffic.law = TrafficConfig::Law::Uniform;
          else if (law == "constant")
            b.traffic.law = TrafficConfig::Law::Constant;
          else
            throw std::invalid_argument("config key 'arrival_law': unknown law '" + v + "'");
        },
        [](const ConfigBundle& b) {
          return std::string(b.traffic.law == TrafficConfig::Law::Uniform ? "uniform"
                                                                           : "constant");
        }}},
  };
  return table;
}

#undef HCRAN_DOUBLE_KEY
#undef HCRAN_INT_KEY
#undef HCRAN_LIST_KEY

double weight_or(const std::vector<double>& w, int i, double fallback) {
  return w.empty() ? fallback : w.at(static_cast<std::size_t>(i));
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument("invalid config: " + message);
}

}  // namespace

double SystemConfig::noise_power() const {
  return std::pow(10.0, (noise_psd_dbm - 30.0) / 10.0) * bandwidth_hz;
}

double SystemConfig::kappa_reg() const { return l1_reg > 0 ? l1_reg : 1e-6 * p_max; }

double SystemConfig::epsilon_active() const {
  return active_link_threshold > 0 ? active_link_threshold : 1e-6 * p_max;
}

double SystemConfig::omega(int k) const { return weight_or(rate_weights, k, 1.0); }
double SystemConfig::mu(int n) const {
  return weight_or(power_weights, n, default_power_weight);
}
double SystemConfig::trad_omega(int k) const { return weight_or(trad_rate_weights, k, 1.0); }
double SystemConfig::trad_mu(int n) const { return weight_or(trad_power_weights, n, 1.0); }

void SystemConfig::validate() const {
  require(num_rrh >= 1, "num_rrh must be >= 1");
  require(num_mbs == 1, "num_mbs must be 1");
  require(num_rue >= 1, "num_rue must be >= 1");
  require(num_mue >= 0, "num_mue must be >= 0");
  require(antennas_rrh >= 1, "antennas_rrh must be >= 1");
  require(antennas_mbs >= 1, "antennas_mbs must be >= 1");
  require(p_max > 0, "p_max must be > 0");
  require(p_avg > 0, "p_avg must be > 0");
  require(p_avg <= p_max, "p_avg must not exceed p_max");
  require(p_mbs >= 0 && std::isfinite(p_mbs), "p_mbs must be finite and >= 0");
  require(fronthaul_cap > 0, "fronthaul_cap must be > 0 (inf allowed)");
  require(interference_cap > 0, "interference_cap must be > 0 (inf allowed)");
  require(alpha >= 0 && alpha <= 1, "alpha must lie in [0, 1]");
  require(rate_weights.empty() || static_cast<int>(rate_weights.size()) == num_rue,
          "rate_weights must have num_rue entries");
  require(power_weights.empty() || static_cast<int>(power_weights.size()) == num_rrh,
          "power_weights must have num_rrh entries");
  require(trad_rate_weights.empty() ||
              static_cast<int>(trad_rate_weights.size()) == num_rue,
          "trad_rate_weights must have num_rue entries");
  require(trad_power_weights.empty() ||
              static_cast<int>(trad_power_weights.size()) == num_rrh,
          "trad_power_weights must have num_rrh entries");
  for (double w : rate_weights) require(w >= 0, "rate_weights must be >= 0");
  for (double w : power_weights) require(w >= 0, "power_weights must be >= 0");
  for (double w : trad_rate_weights) require(w >= 0, "trad_rate_weights must be >= 0");
  for (double w : trad_power_weights) require(w >= 0, "trad_power_weights must be >= 0");
  require(default_power_weight >= 0, "default_power_weight must be >= 0");
  require(tradeoff_v >= 0 && std::isfinite(tradeoff_v), "tradeoff_v must be finite and >= 0");
  require(bandwidth_hz > 0, "bandwidth_hz must be > 0");
  const double sigma2 = noise_power();
  require(sigma2 > 0 && std::isfinite(sigma2), "noise power must be positive and finite");
  require(pathloss_exponent >= 0, "pathloss_exponent must be >= 0");
  require(reference_distance > 0, "reference_distance must be > 0");
  require(area_radius > 0, "area_radius must be > 0");
  require(rrh_min_radius >= 0 && rrh_min_radius <= rrh_max_radius &&
              rrh_max_radius <= area_radius,
          "need 0 <= rrh_min_radius <= rrh_max_radius <= area_radius");
  require(rue_min_distance >= 0, "rue_min_distance must be >= 0");
  require(rue_cluster_radius <= 0 || rue_cluster_radius >= rue_min_distance,
          "rue_cluster_radius must be >= rue_min_distance");
  require(mue_min_rrh_distance >= 0 && mue_min_rrh_distance < area_radius,
          "mue_min_rrh_distance must lie in [0, area_radius)");
  require(convergence_tol > 0, "convergence_tol must be > 0");
  require(max_wmmse_iters >= 1, "max_wmmse_iters must be >= 1");
  require(qcqp_tol > 0, "qcqp_tol must be > 0");
  require(qcqp_max_iters >= 1, "qcqp_max_iters must be >= 1");
  require(fading_gain_cap > 0, "fading_gain_cap must be > 0");
  require(slots >= 1, "slots must be >= 1");
  require(warmup_fraction >= 0 && warmup_fraction < 1, "warmup_fraction must lie in [0, 1)");
}

TrafficConfig TrafficConfig::uniform(int num_rue, double lambda) {
  TrafficConfig t;
  t.lambda.assign(static_cast<std::size_t>(num_rue), lambda);
  return t;
}

double TrafficConfig::peak() const {
  if (a_max > 0) return a_max;
  double m = 0;
  for (double l : lambda) m = std::max(m, l);
  return law == Law::Uniform ? 2.0 * m : m;
}

void TrafficConfig::validate(int num_rue) const {
  require(static_cast<int>(lambda.size()) == num_rue, "lambda must have num_rue entries");
  const double cap = peak();
  for (double l : lambda) {
    require(l >= 0 && std::isfinite(l), "lambda must be finite and >= 0");
    const double top = law == Law::Uniform ? 2.0 * l : l;
    require(top <= cap * (1 + 1e-12), "arrival support exceeds a_max");
  }
}

void apply_config_key(ConfigBundle& bundle, const std::string& key,
                      const std::string& value) {
  const auto it = handlers().find(key);
  if (it == handlers().end()) throw std::invalid_argument("unknown config key '" + key + "'");
  it->second.set(bundle, key, value);
}

ConfigBundle parse_config(const std::string& text) {
  ConfigBundle bundle;
  bool lambda_given = false;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    apply_config_key(bundle, key, trim(line.substr(eq + 1)));
    lambda_given = lambda_given || key == "lambda";
  }
  // A single lambda value applies to every RUE.
  if (!lambda_given) bundle.traffic = TrafficConfig::uniform(bundle.system.num_rue, 4.2);
  if (bundle.traffic.lambda.size() == 1 && bundle.system.num_rue > 1)
    bundle.traffic.lambda.assign(static_cast<std::size_t>(bundle.system.num_rue),
                                 bundle.traffic.lambda.front());
  return bundle;
}

ConfigBundle load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_env_overrides(ConfigBundle& bundle,
                         const std::map<std::string, std::string>& env) {
  static const std::string prefix = "HCRAN_";
  for (const auto& [name, value] : env) {
    if (name.rfind(prefix, 0) != 0) continue;
    apply_config_key(bundle, lower(name.substr(prefix.size())), value);
  }
  if (bundle.traffic.lambda.size() == 1 && bundle.system.num_rue > 1)
    bundle.traffic.lambda.assign(static_cast<std::size_t>(bundle.system.num_rue),
                                 bundle.traffic.lambda.front());
}

void apply_process_env_overrides(ConfigBundle& bundle) {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    env.emplace(entry.substr(0, eq), entry.substr(eq + 1));
  }
  apply_env_overrides(bundle, env);
}

std::string to_config_text(const ConfigBundle& bundle) {
  std::string out;
  for (const auto& [key, handler] : handlers()) out += key + " = " + handler.get(bundle) + "\n";
  return out;
}

}  // namespace hcran
