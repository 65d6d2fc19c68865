#include "abavr/experiment_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace abavr {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw std::invalid_argument("config key '" + key + "' = '" + value + "': " + why);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    bad(key, v, "expected a number");
  }
  if (used != v.size()) bad(key, v, "expected a number");
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(key, v, "expected a non-negative integer");
  return out;
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  return static_cast<std::size_t>(parse_uint(key, v));
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, v, "expected true or false");
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

template <class T>
std::string join(const std::vector<T>& items) {
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "," : "") << items[i];
  return os.str();
}

GradKind parse_grad_kind(const std::string& key, const std::string& v) {
  if (v == "reinforce") return GradKind::reinforce;
  if (v == "gpomdp") return GradKind::gpomdp;
  bad(key, v, "expected reinforce or gpomdp");
}

struct Field {
  std::string section;
  std::string key;
  /// Empty when unset (optional fields).
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string& full_key, const std::string&)> set;
};

#define ABAVR_NUM(sec, name, member)                                                      \
  Field {                                                                                 \
    sec, name, [](const ExperimentConfig& c) { return num(c.member); },                   \
        [](ExperimentConfig& c, const std::string& k, const std::string& v) {             \
          c.member = parse_double(k, v);                                                  \
        }                                                                                 \
  }
#define ABAVR_SIZE(sec, name, member)                                                     \
  Field {                                                                                 \
    sec, name, [](const ExperimentConfig& c) { return std::to_string(c.member); },        \
        [](ExperimentConfig& c, const std::string& k, const std::string& v) {             \
          c.member = parse_size(k, v);                                                    \
        }                                                                                 \
  }
#define ABAVR_OPT_NUM(sec, name, member)                                                  \
  Field {                                                                                 \
    sec, name,                                                                            \
        [](const ExperimentConfig& c) { return c.member ? num(*c.member) : std::string(); }, \
        [](ExperimentConfig& c, const std::string& k, const std::string& v) {             \
          if (v.empty() || v == "none") c.member.reset();                                 \
          else c.member = parse_double(k, v);                                             \
        }                                                                                 \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"", "kind", [](const ExperimentConfig& c) { return std::string(to_string(c.kind)); },
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              if (v == "opt") c.kind = ExperimentKind::opt;
              else if (v == "rl") c.kind = ExperimentKind::rl;
              else bad(k, v, "expected opt or rl");
            }},
      Field{"", "algorithms", [](const ExperimentConfig& c) { return join(c.algorithms); },
            [](ExperimentConfig& c, const std::string&, const std::string& v) {
              c.algorithms = split_list(v);
            }},
      Field{"", "seeds", [](const ExperimentConfig& c) { return join(c.seeds); },
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              c.seeds.clear();
              for (const auto& s : split_list(v)) c.seeds.push_back(parse_uint(k, s));
            }},
      Field{"", "output_dir", [](const ExperimentConfig& c) { return c.output_dir; },
            [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
      ABAVR_SIZE("", "workers", workers),
      ABAVR_OPT_NUM("", "threshold", threshold),

      Field{"objective", "kind", [](const ExperimentConfig& c) { return c.objective.kind; },
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              if (v != "logreg" && v != "libsvm" && v != "pl") bad(k, v, "expected logreg, libsvm or pl");
              c.objective.kind = v;
            }},
      Field{"objective", "path", [](const ExperimentConfig& c) { return c.objective.path; },
            [](ExperimentConfig& c, const std::string&, const std::string& v) { c.objective.path = v; }},
      ABAVR_SIZE("objective", "n", objective.n),
      ABAVR_SIZE("objective", "d", objective.d),
      Field{"objective", "data_seed",
            [](const ExperimentConfig& c) { return std::to_string(c.objective.data_seed); },
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              c.objective.data_seed = parse_uint(k, v);
            }},
      ABAVR_NUM("objective", "reg_alpha", objective.reg_alpha),
      ABAVR_NUM("objective", "label_flip", objective.label_flip),
      Field{"objective", "scale",
            [](const ExperimentConfig& c) { return std::string(c.objective.scale ? "true" : "false"); },
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              c.objective.scale = parse_bool(k, v);
            }},

      ABAVR_NUM("optimizer", "c_beta", opt.c_beta),
      ABAVR_NUM("optimizer", "c_eps", opt.c_eps),
      ABAVR_NUM("optimizer", "eps", opt.eps),
      Field{"optimizer", "sigma_sq",
            [](const ExperimentConfig& c) { return c.sigma_sq_auto ? std::string("auto") : num(c.opt.sigma_sq); },
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              c.sigma_sq_auto = v == "auto";
              if (!c.sigma_sq_auto) c.opt.sigma_sq = parse_double(k, v);
            }},
      ABAVR_OPT_NUM("optimizer", "beta_init", opt.beta_init),
      ABAVR_SIZE("optimizer", "m", opt.m),
      ABAVR_SIZE("optimizer", "B", opt.B),
      ABAVR_NUM("optimizer", "eta", opt.eta),
      ABAVR_SIZE("optimizer", "max_epochs", opt.max_epochs),
      Field{"optimizer", "output_mode",
            [](const ExperimentConfig& c) { return std::string(to_string(c.opt.output_mode)); },
            [](ExperimentConfig& c, const std::string&, const std::string& v) {
              c.opt.output_mode = parse_output_mode(v);
            }},
      Field{"optimizer", "sfo_mode",
            [](const ExperimentConfig& c) { return std::string(to_string(c.opt.sfo_mode)); },
            [](ExperimentConfig& c, const std::string&, const std::string& v) {
              c.opt.sfo_mode = parse_sfo_mode(v);
            }},
      Field{"optimizer", "cadence",
            [](const ExperimentConfig& c) { return std::string(to_string(c.opt.cadence)); },
            [](ExperimentConfig& c, const std::string&, const std::string& v) {
              c.opt.cadence = parse_metric_cadence(v);
            }},
      ABAVR_OPT_NUM("optimizer", "stop_grad_norm_sq", opt.stop_grad_norm_sq),
      ABAVR_NUM("optimizer", "sgd_alpha0", sgd.alpha0),
      ABAVR_NUM("optimizer", "sgd_c_beta", sgd.c_beta),
      ABAVR_NUM("optimizer", "sgd_c_eps", sgd.c_eps),
      ABAVR_NUM("optimizer", "mu", baseline.mu),
      ABAVR_NUM("optimizer", "nu", baseline.nu),
      ABAVR_NUM("optimizer", "c_b", baseline.c_b),

      Field{"rl", "env", [](const ExperimentConfig& c) { return c.env.name; },
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              if (v != "chain5" && v != "push" && v.rfind("file:", 0) != 0) {
                bad(k, v, "expected chain5, push or file:<path>");
              }
              c.env.name = v;
            }},
      Field{"rl", "horizon",
            [](const ExperimentConfig& c) { return c.env.horizon ? std::to_string(*c.env.horizon) : std::string(); },
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              if (v.empty() || v == "none") c.env.horizon.reset();
              else c.env.horizon = parse_size(k, v);
            }},
      ABAVR_OPT_NUM("rl", "gamma", env.gamma),
      Field{"rl", "policy", [](const ExperimentConfig& c) { return c.env.policy; },
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              if (v != "action_affine" && v != "tabular") bad(k, v, "expected action_affine or tabular");
              c.env.policy = v;
            }},
      ABAVR_NUM("rl", "alpha_sigma_sq", rl.alpha_sigma_sq),
      ABAVR_NUM("rl", "beta", rl.beta),
      ABAVR_NUM("rl", "eps", rl.eps),
      ABAVR_SIZE("rl", "m", rl.m),
      ABAVR_SIZE("rl", "B", rl.B),
      ABAVR_NUM("rl", "eta", rl.eta),
      ABAVR_SIZE("rl", "N_max", rl.N_max),
      Field{"rl", "grad_kind",
            [](const ExperimentConfig& c) { return std::string(to_string(c.rl.grad_kind)); },
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              c.rl.grad_kind = parse_grad_kind(k, v);
            }},
      ABAVR_SIZE("rl", "max_epochs", rl.max_epochs),
      Field{"rl", "output_mode",
            [](const ExperimentConfig& c) { return std::string(to_string(c.rl.output_mode)); },
            [](ExperimentConfig& c, const std::string&, const std::string& v) {
              c.rl.output_mode = parse_output_mode(v);
            }},
      Field{"rl", "sto_mode",
            [](const ExperimentConfig& c) { return std::string(to_string(c.rl.sto_mode)); },
            [](ExperimentConfig& c, const std::string&, const std::string& v) {
              c.rl.sto_mode = parse_sfo_mode(v);
            }},
      Field{"rl", "cadence",
            [](const ExperimentConfig& c) { return std::string(to_string(c.rl.cadence)); },
            [](ExperimentConfig& c, const std::string&, const std::string& v) {
              c.rl.cadence = parse_metric_cadence(v);
            }},
      ABAVR_OPT_NUM("rl", "stop_grad_norm_sq", rl.stop_grad_norm_sq),
  };
  return table;
}

#undef ABAVR_NUM
#undef ABAVR_SIZE
#undef ABAVR_OPT_NUM

constexpr const char* kTheorySection = "rl.theory";

}  // namespace

std::string_view to_string(ExperimentKind kind) { return kind == ExperimentKind::opt ? "opt" : "rl"; }

const std::vector<std::string>& optimization_algorithms() {
  static const std::vector<std::string> names = {"abasvrg",  "abaspider",         "abasgd",
                                                 "sgd",      "hsgd",              "svrg_fixed",
                                                 "spiderboost_fixed", "spider_exp", "spider_lin"};
  return names;
}

const std::vector<std::string>& policy_gradient_algorithms() {
  static const std::vector<std::string> names = {"abasvrpg", "abaspiderpg", "svrpg", "spiderpg"};
  return names;
}

double ExperimentConfig::effective_threshold() const {
  if (threshold) return *threshold;
  return kind == ExperimentKind::opt ? opt.eps : 10.0 * rl.eps;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw std::invalid_argument("config: at least one seed is required");
  if (algorithms.empty()) throw std::invalid_argument("config: no algorithm selected");
  if (workers == 0) throw std::invalid_argument("config: workers must be >= 1");
  const auto& known = kind == ExperimentKind::opt ? optimization_algorithms() : policy_gradient_algorithms();
  for (const auto& a : algorithms) {
    if (std::find(known.begin(), known.end(), a) == known.end()) {
      std::string list;
      for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
      throw std::invalid_argument("config: unknown " + std::string(to_string(kind)) +
                                  " algorithm '" + a + "' (known: " + list + ")");
    }
  }
  if (kind == ExperimentKind::opt) {
    opt.validate();
    if (objective.kind == "libsvm" && objective.path.empty()) {
      throw std::invalid_argument("config: objective.kind = libsvm needs objective.path");
    }
    if (objective.kind != "libsvm" && (objective.n == 0 || objective.d == 0)) {
      throw std::invalid_argument("config: objective n and d must be >= 1");
    }
  } else {
    rl.validate();
  }
  if (threshold && !(*threshold >= 0.0)) throw std::invalid_argument("config: threshold must be >= 0");
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const auto dot = key.rfind('.');
  const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
  const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
  if (section == kTheorySection) {
    rl.theory_constants[name] = parse_double(key, value);
    return;
  }
  for (const auto& f : fields()) {
    if (f.section == section && f.key == name) {
      f.set(*this, key, value);
      return;
    }
  }
  throw std::invalid_argument("unknown config key '" + key + "'");
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig cfg;
  std::string section;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
    const std::string line = trim(text);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": bad section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      cfg.set(section.empty() ? key : section + "." + key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  return parse(in);
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  std::string current;
  bool first = true;
  for (const auto& f : fields()) {
    const std::string value = f.get(*this);
    if (value.empty() && f.key != "output_dir" && f.key != "path") continue;
    if (f.section != current || first) {
      if (!f.section.empty()) os << (first ? "" : "\n") << '[' << f.section << "]\n";
      current = f.section;
      first = false;
    }
    os << f.key << " = " << value << '\n';
  }
  if (!rl.theory_constants.empty()) {
    os << "\n[" << kTheorySection << "]\n";
    for (const auto& [k, v] : rl.theory_constants) os << k << " = " << num(v) << '\n';
  }
  return os.str();
}

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  return serialize() == other.serialize();
}

}  // namespace abavr
