#include "bsq/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace bsq {

namespace pt = boost::property_tree;

ConfigError::ConfigError(const std::string& key, int line, const std::string& what)
    : std::runtime_error("config" + (line > 0 ? " line " + std::to_string(line) : std::string()) +
                         (key.empty() ? std::string() : " key '" + key + "'") + ": " + what),
      key_(key),
      line_(line) {}

namespace {

double to_double(const std::string& key, const std::string& v, int line) {
  double x = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key, line, "expected a number, got '" + v + "'");
  return x;
}

long to_long(const std::string& key, const std::string& v, int line) {
  long x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key, line, "expected an integer, got '" + v + "'");
  return x;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = [] {
    std::map<std::string, Setter> s;
    auto num = [&](const char* k, auto field) {
      s[k] = [field](RunConfig& rc, const std::string& key, const std::string& v, int line) {
        rc.*field = to_double(key, v, line);
      };
    };
    auto gnum = [&](const char* k, double GridConfig::*field) {
      s[k] = [field](RunConfig& rc, const std::string& key, const std::string& v, int line) {
        rc.grid.*field = to_double(key, v, line);
      };
    };
    auto gint = [&](const char* k, int GridConfig::*field) {
      s[k] = [field](RunConfig& rc, const std::string& key, const std::string& v, int line) {
        rc.grid.*field = static_cast<int>(to_long(key, v, line));
      };
    };
    auto mnum = [&](const char* k, double MuConfig::*field) {
      s[k] = [field](RunConfig& rc, const std::string& key, const std::string& v, int line) {
        rc.mu.*field = to_double(key, v, line);
      };
    };
    gnum("alpha", &GridConfig::alpha);
    gnum("r_max", &GridConfig::r_max);
    gint("n_r", &GridConfig::n_r);
    gint("n_beta", &GridConfig::n_beta);
    gnum("r_floor", &GridConfig::r_floor);
    gnum("r_scale", &GridConfig::r_scale);
    gnum("t_span", &GridConfig::t_span);
    gnum("t_stretch", &GridConfig::t_stretch);
    gint("stencil", &GridConfig::stencil);
    gnum("tail_decay", &GridConfig::tail_decay);
    s["spacing"] = [](RunConfig& rc, const std::string& key, const std::string& v, int line) {
      try {
        rc.grid.spacing = parse_spacing(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(key, line, e.what());
      }
    };
    num("dt", &RunConfig::dt);
    num("t_end", &RunConfig::t_end);
    num("cfl", &RunConfig::cfl);
    num("output_every", &RunConfig::output_every);
    num("amplitude", &RunConfig::amplitude);
    s["n_modes"] = [](RunConfig& rc, const std::string& key, const std::string& v, int line) {
      rc.n_modes = static_cast<int>(to_long(key, v, line));
    };
    s["seeds"] = [](RunConfig& rc, const std::string& key, const std::string& v, int line) {
      rc.seeds = static_cast<int>(to_long(key, v, line));
    };
    s["seed"] = [](RunConfig& rc, const std::string& key, const std::string& v, int line) {
      long x = to_long(key, v, line);
      if (x < 0) throw ConfigError(key, line, "seed must be non-negative");
      rc.seed = static_cast<std::uint64_t>(x);
    };
    s["experiment"] = [](RunConfig& rc, const std::string&, const std::string& v, int) { rc.experiment = v; };
    s["out_dir"] = [](RunConfig& rc, const std::string&, const std::string& v, int) { rc.out_dir = v; };
    mnum("mu1", &MuConfig::mu1);
    mnum("mu2", &MuConfig::mu2);
    mnum("mu3", &MuConfig::mu3);
    mnum("mu4", &MuConfig::mu4);
    for (int k = 0; k < 3; ++k)
      s["mu_2_" + std::to_string(k)] = [k](RunConfig& rc, const std::string& key, const std::string& v, int line) {
        rc.mu.mu2k[k] = to_double(key, v, line);
      };
    for (int k = 0; k < 4; ++k)
      s["mu_3_" + std::to_string(k)] = [k](RunConfig& rc, const std::string& key, const std::string& v, int line) {
        rc.mu.mu3k[k] = to_double(key, v, line);
      };
    return s;
  }();
  return m;
}

// Line of the first "key =" occurrence, for error messages (ptree keeps no positions).
int find_line(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string ln;
  int no = 0;
  while (std::getline(in, ln)) {
    ++no;
    auto eq = ln.find('=');
    if (eq == std::string::npos) continue;
    std::string k = ln.substr(0, eq);
    k.erase(0, k.find_first_not_of(" \t"));
    k.erase(k.find_last_not_of(" \t") + 1);
    if (k == key) return no;
  }
  return 0;
}

}  // namespace

void set_config_value(RunConfig& rc, const std::string& key, const std::string& value, int line) {
  std::string k = key;
  if (auto dot = k.rfind('.'); dot != std::string::npos) k = k.substr(dot + 1);
  auto it = setters().find(k);
  if (it == setters().end()) throw ConfigError(key, line, "unknown key");
  it->second(rc, key, value, line);
}

void validate(const RunConfig& rc) {
  const GridConfig& g = rc.grid;
  if (!(g.alpha > 0.0 && g.alpha <= 0.1 + 1e-15)) throw ConfigError("alpha", 0, "must lie in (0, 1/10]");
  if (g.n_r < 8) throw ConfigError("n_r", 0, "must be at least 8");
  if (g.n_beta < 8) throw ConfigError("n_beta", 0, "must be at least 8");
  if (g.spacing == Spacing::geometric && g.r_max < 10.0) throw ConfigError("r_max", 0, "must be at least 10");
  if (!(rc.dt > 0.0)) throw ConfigError("dt", 0, "must be positive");
  if (!(rc.t_end >= 0.0)) throw ConfigError("t_end", 0, "must be non-negative");
  if (!(rc.cfl > 0.0)) throw ConfigError("cfl", 0, "must be positive");
  if (!(rc.output_every > 0.0)) throw ConfigError("output_every", 0, "must be positive");
  if (rc.seeds < 1) throw ConfigError("seeds", 0, "must be at least 1");
}

RunConfig parse_config(const std::string& text, bool require_alpha) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", static_cast<int>(e.line()), e.message());
  }
  RunConfig rc;
  bool have_alpha = false;
  std::function<void(const pt::ptree&, const std::string&)> walk = [&](const pt::ptree& t, const std::string& prefix) {
    for (const auto& [k, child] : t) {
      std::string full = prefix.empty() ? k : prefix + "." + k;
      if (!child.empty()) {
        walk(child, full);
        continue;
      }
      if (k == "alpha") have_alpha = true;
      set_config_value(rc, full, child.data(), find_line(text, k));
    }
  };
  walk(tree, "");
  if (require_alpha && !have_alpha) throw ConfigError("alpha", 0, "required key is missing");
  try {
    validate(rc);
  } catch (const ConfigError& e) {
    throw ConfigError(e.key(), find_line(text, e.key()), e.what());
  }
  return rc;
}

RunConfig load_config(const std::string& path, bool require_alpha) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", 0, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), require_alpha);
}

std::string to_text(const RunConfig& rc) {
  std::ostringstream o;
  o.precision(17);
  const GridConfig& g = rc.grid;
  o << "alpha = " << g.alpha << "\nr_max = " << g.r_max << "\nn_r = " << g.n_r << "\nn_beta = " << g.n_beta
    << "\nspacing = " << to_string(g.spacing) << "\nr_floor = " << g.r_floor << "\nr_scale = " << g.r_scale
    << "\nt_span = " << g.t_span << "\nt_stretch = " << g.t_stretch << "\nstencil = " << g.stencil
    << "\ntail_decay = " << g.tail_decay << "\nexperiment = " << rc.experiment << "\ndt = " << rc.dt
    << "\nt_end = " << rc.t_end << "\ncfl = " << rc.cfl << "\noutput_every = " << rc.output_every
    << "\nn_modes = " << rc.n_modes << "\nseeds = " << rc.seeds << "\namplitude = " << rc.amplitude
    << "\nmu1 = " << rc.mu.mu1 << "\nmu2 = " << rc.mu.mu2 << "\nmu3 = " << rc.mu.mu3 << "\nmu4 = " << rc.mu.mu4;
  for (int k = 0; k < 3; ++k) o << "\nmu_2_" << k << " = " << rc.mu.mu2k[k];
  for (int k = 0; k < 4; ++k) o << "\nmu_3_" << k << " = " << rc.mu.mu3k[k];
  o << "\nout_dir = " << rc.out_dir << "\nseed = " << rc.seed << "\n";
  return o.str();
}

}  // namespace bsq
