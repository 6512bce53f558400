#include "critmc/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace critmc {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_number(const std::string& tok, int line) {
  const std::string t = trim(tok);
  if (t == "e") return 2.718281828459045;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0') {
    throw ConfigError("expected a number, got '" + t + "'", line);
  }
  return v;
}

std::vector<double> parse_args(const std::string& inside, int line) {
  std::vector<double> args;
  std::stringstream ss(inside);
  std::string tok;
  while (std::getline(ss, tok, ',')) args.push_back(parse_number(tok, line));
  return args;
}

// law syntax: name(arg1, arg2, ...); args parsed per family
std::pair<std::string, std::string> split_law(const std::string& val,
                                              int line) {
  const auto open = val.find('(');
  const auto close = val.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw ConfigError("law must look like name(args): '" + val + "'", line);
  }
  std::string name = trim(val.substr(0, open));
  for (auto& ch : name) ch = char(std::tolower(ch));
  return {name, val.substr(open + 1, close - open - 1)};
}

std::pair<std::string, std::vector<double>> parse_law(const std::string& val,
                                                      int line) {
  auto [name, inside] = split_law(val, line);
  return {name, parse_args(inside, line)};
}

ALaw parse_a_law(const std::string& val, int line) {
  auto [name, inside] = split_law(val, line);
  if (name == "lognormal") {
    const auto args = parse_args(inside, line);
    if (args.size() != 2) throw ConfigError("lognormal takes (m, s2)", line);
    return LogNormalLaw{args[0], args[1]};
  }
  if (name == "logmixture") {
    // logmixture(p1:m1:s21, p2:m2:s22, ...)
    LogMixtureLaw mix;
    std::stringstream ss(inside);
    std::string comp;
    while (std::getline(ss, comp, ',')) {
      std::stringstream cs(comp);
      std::string p, m, s2;
      if (!std::getline(cs, p, ':') || !std::getline(cs, m, ':') ||
          !std::getline(cs, s2)) {
        throw ConfigError("mixture component must be p:m:s2", line);
      }
      mix.components.push_back({parse_number(p, line), parse_number(m, line),
                                parse_number(s2, line)});
    }
    return mix;
  }
  throw ConfigError("unknown a_law '" + name + "'", line);
}

BLaw parse_b_law(const std::string& val, int line) {
  auto [name, args] = parse_law(val, line);
  if (name == "normal") {
    if (args.size() != 2) throw ConfigError("normal takes (m, s2)", line);
    return NormalLaw{args[0], args[1]};
  }
  if (name == "shifted_halfnormal") {
    if (args.size() != 2)
      throw ConfigError("shifted_halfnormal takes (shift, s)", line);
    return ShiftedHalfNormalLaw{args[0], args[1]};
  }
  if (name == "constant") {
    if (args.size() != 1) throw ConfigError("constant takes (c)", line);
    return ConstantLaw{args[0]};
  }
  throw ConfigError("unknown b_law '" + name + "'", line);
}

CLaw parse_c_law(const std::string& val, int line) {
  auto [name, args] = parse_law(val, line);
  if (name == "halfnormal") {
    if (args.size() != 1) throw ConfigError("halfnormal takes (s)", line);
    return HalfNormalLaw{args[0]};
  }
  if (name == "constant") {
    if (args.size() != 1) throw ConfigError("constant takes (c)", line);
    return ConstantLaw{args[0]};
  }
  throw ConfigError("unknown c_law '" + name + "'", line);
}

DLaw parse_d_law(const std::string& val, int line) {
  auto [name, args] = parse_law(val, line);
  if (name == "lognormal") {
    if (args.size() != 2) throw ConfigError("lognormal takes (m, s2)", line);
    return LogNormalLaw{args[0], args[1]};
  }
  if (name == "shifted_halfnormal") {
    if (args.size() != 2)
      throw ConfigError("shifted_halfnormal takes (shift, s)", line);
    return ShiftedHalfNormalLaw{args[0], args[1]};
  }
  throw ConfigError("unknown d_law '" + name + "'", line);
}

std::uint64_t parse_count(const std::string& val, int line) {
  const double v = parse_number(val, line);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e18) {
    throw ConfigError("expected a nonnegative integer count", line);
  }
  return std::uint64_t(v);
}

}  // namespace

std::vector<double> RunConfig::x_grid() const {
  std::vector<double> grid;
  for (double x = x_lo; x <= x_hi + 1e-12; x += x_step) grid.push_back(x);
  return grid;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  bool saw_b = false, saw_c = false, saw_d = false;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section", line);
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key = value", line);
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (val.empty()) throw ConfigError("empty value for '" + key + "'", line);

    if (section == "model") {
      if (key == "kind") {
        if (val == "affine") cfg.model.kind = ChainKind::Affine;
        else if (val == "letac") cfg.model.kind = ChainKind::Letac;
        else if (val == "extremal") cfg.model.kind = ChainKind::Extremal;
        else throw ConfigError("kind must be affine|letac|extremal", line);
      } else if (key == "regime") {
        if (val == "critical") cfg.model.regime = Regime::Critical;
        else if (val == "contractive") cfg.model.regime = Regime::Contractive;
        else throw ConfigError("regime must be critical|contractive", line);
      } else if (key == "delta") {
        cfg.model.delta = parse_number(val, line);
      } else if (key == "a_law") {
        cfg.model.a_law = parse_a_law(val, line);
      } else if (key == "b_law") {
        cfg.model.b_law = parse_b_law(val, line);
        saw_b = true;
      } else if (key == "c_law") {
        cfg.model.c_law = parse_c_law(val, line);
        saw_c = true;
      } else if (key == "d_law") {
        cfg.model.d_law = parse_d_law(val, line);
        saw_d = true;
      } else {
        throw ConfigError("unknown model key '" + key + "'", line);
      }
    } else if (section == "run") {
      if (key == "seed") cfg.seed = parse_count(val, line);
      else if (key == "replicas") cfg.replicas = int(parse_count(val, line));
      else if (key == "steps") cfg.steps = parse_count(val, line);
      else if (key == "cycles") cfg.cycles = parse_count(val, line);
      else if (key == "burn_in_cycles") cfg.burn_in_cycles = parse_count(val, line);
      else if (key == "cycle_cap") cfg.cycle_cap = parse_count(val, line);
      else if (key == "workers") cfg.workers = int(parse_count(val, line));
      else if (key == "thin_fresh_draw") cfg.thin_fresh_draw = int(parse_count(val, line));
      else if (key == "mc_draws") cfg.mc_draws = parse_count(val, line);
      else if (key == "estimator") {
        if (val == "ratio") cfg.estimator = EstimatorChoice::Ratio;
        else if (val == "ladder") cfg.estimator = EstimatorChoice::Ladder;
        else if (val == "both") cfg.estimator = EstimatorChoice::Both;
        else throw ConfigError("estimator must be ratio|ladder|both", line);
      } else if (key == "x0") {
        if (val == "auto") cfg.x0_auto = true;
        else {
          cfg.x0_auto = false;
          cfg.x0 = parse_number(val, line);
        }
      } else {
        throw ConfigError("unknown run key '" + key + "'", line);
      }
    } else if (section == "grid") {
      if (key == "log_rho") cfg.geometry.log_rho = parse_number(val, line);
      else if (key == "k_min") cfg.geometry.k_min = std::int32_t(parse_number(val, line));
      else if (key == "k_max") cfg.geometry.k_max = std::int32_t(parse_number(val, line));
      else if (key == "x_lo") cfg.x_lo = parse_number(val, line);
      else if (key == "x_hi") cfg.x_hi = parse_number(val, line);
      else if (key == "x_step") cfg.x_step = parse_number(val, line);
      else if (key == "window") {
        if (val == "auto") cfg.window_auto = true;
        else throw ConfigError("window must be 'auto' or set window_lo/hi", line);
      }
      else if (key == "window_lo") cfg.window_lo = parse_number(val, line);
      else if (key == "window_hi") cfg.window_hi = parse_number(val, line);
      else if (key == "gamma") cfg.gamma = parse_number(val, line);
      else if (key == "kesten_window_lo") cfg.kesten_window_lo = parse_number(val, line);
      else if (key == "kesten_window_hi") cfg.kesten_window_hi = parse_number(val, line);
      else if (key == "pairs") {
        cfg.pairs.clear();
        std::stringstream ss(val);
        std::string pair;
        while (std::getline(ss, pair, ',')) {
          const auto colon = pair.find(':');
          if (colon == std::string::npos) {
            throw ConfigError("pairs must be alpha:beta[, ...]", line);
          }
          const double a = parse_number(pair.substr(0, colon), line);
          const double b = parse_number(pair.substr(colon + 1), line);
          if (!(a > 0.0 && b > a)) {
            throw ConfigError("need 0 < alpha < beta in pairs", line);
          }
          cfg.pairs.push_back({a, b});
        }
        if (cfg.pairs.empty()) throw ConfigError("pairs is empty", line);
      } else {
        throw ConfigError("unknown grid key '" + key + "'", line);
      }
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = val;
      else throw ConfigError("unknown output key '" + key + "'", line);
    } else {
      throw ConfigError("unknown section [" + section + "]", line);
    }
  }

  if (cfg.model.kind != ChainKind::Extremal && !saw_b) {
    throw ConfigError("model requires b_law");
  }
  if (cfg.model.kind == ChainKind::Letac && !saw_c) {
    throw ConfigError("letac model requires c_law");
  }
  if (cfg.model.kind == ChainKind::Extremal && !saw_d) {
    throw ConfigError("extremal model requires d_law");
  }
  if (cfg.replicas < 1) throw ConfigError("replicas must be >= 1");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string law_text(const ALaw& law) {
  if (const auto* ln = std::get_if<LogNormalLaw>(&law)) {
    return "lognormal(" + fmt(ln->m) + "," + fmt(ln->s2) + ")";
  }
  std::string s = "logmixture(";
  const auto& mix = std::get<LogMixtureLaw>(law);
  for (std::size_t i = 0; i < mix.components.size(); ++i) {
    const auto& c = mix.components[i];
    if (i) s += ",";
    s += fmt(c.p) + ":" + fmt(c.m) + ":" + fmt(c.s2);
  }
  return s + ")";
}

std::string law_text(const BLaw& law) {
  if (const auto* n = std::get_if<NormalLaw>(&law)) {
    return "normal(" + fmt(n->m) + "," + fmt(n->s2) + ")";
  }
  if (const auto* h = std::get_if<ShiftedHalfNormalLaw>(&law)) {
    return "shifted_halfnormal(" + fmt(h->shift) + "," + fmt(h->s) + ")";
  }
  return "constant(" + fmt(std::get<ConstantLaw>(law).c) + ")";
}

std::string law_text(const CLaw& law) {
  if (const auto* h = std::get_if<HalfNormalLaw>(&law)) {
    return "halfnormal(" + fmt(h->s) + ")";
  }
  return "constant(" + fmt(std::get<ConstantLaw>(law).c) + ")";
}

std::string law_text(const DLaw& law) {
  if (const auto* ln = std::get_if<LogNormalLaw>(&law)) {
    return "lognormal(" + fmt(ln->m) + "," + fmt(ln->s2) + ")";
  }
  const auto& h = std::get<ShiftedHalfNormalLaw>(law);
  return "shifted_halfnormal(" + fmt(h.shift) + "," + fmt(h.s) + ")";
}

}  // namespace

std::string RunConfig::canonical() const {
  std::ostringstream s;
  s << "kind=" << int(model.kind) << "\nregime=" << int(model.regime)
    << "\ndelta=" << fmt(model.delta) << "\na_law=" << law_text(model.a_law);
  if (model.b_law) s << "\nb_law=" << law_text(*model.b_law);
  if (model.c_law) s << "\nc_law=" << law_text(*model.c_law);
  if (model.d_law) s << "\nd_law=" << law_text(*model.d_law);
  s << "\nseed=" << seed << "\nreplicas=" << replicas << "\nsteps=" << steps
    << "\ncycles=" << cycles << "\nburn_in_cycles=" << burn_in_cycles
    << "\ncycle_cap=" << cycle_cap << "\nestimator=" << int(estimator)
    << "\nx0=" << (x0_auto ? "auto" : fmt(x0))
    << "\nthin_fresh_draw=" << thin_fresh_draw << "\nmc_draws=" << mc_draws
    << "\nlog_rho=" << fmt(geometry.log_rho) << "\nk_min=" << geometry.k_min
    << "\nk_max=" << geometry.k_max << "\nx_lo=" << fmt(x_lo)
    << "\nx_hi=" << fmt(x_hi) << "\nx_step=" << fmt(x_step)
    << "\nwindow=" << (window_auto ? "auto" : fmt(window_lo) + ":" + fmt(window_hi))
    << "\ngamma=" << fmt(gamma) << "\nkesten_window=" << fmt(kesten_window_lo)
    << ":" << fmt(kesten_window_hi) << "\npairs=";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i) s << ",";
    s << fmt(pairs[i].first) << ":" << fmt(pairs[i].second);
  }
  s << "\n";
  return s.str();
}

std::string RunConfig::fingerprint() const {
  const std::string c = canonical();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : c) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace critmc
