#include "moscito/app/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "moscito/error.hpp"
#include "../text.hpp"

namespace moscito::app {
namespace {

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!text::parse_double(text::trim(v), out) || !std::isfinite(out))
    throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  if (!text::parse_int(text::trim(v), out)) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  const auto s = text::trim(v);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(key, "expected a nonnegative integer, got '" + v + "'");
  return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& item : split_list(v)) out.push_back(to_int(key, item));
  if (out.empty()) throw ConfigError(key, "list must not be empty");
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

std::string join(const std::vector<int>& items) {
  std::string out;
  for (int s : items) out += (out.empty() ? "" : ",") + std::to_string(s);
  return out;
}

template <class Fn>
auto rethrow_as_config(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

struct Field {
  std::function<void(PipelineConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

#define NUM_FIELD(KEY, MEMBER, CONV)                                                                 \
  {                                                                                                  \
    KEY, Field {                                                                                     \
      [](PipelineConfig& c, const std::string& k, const std::string& v) { c.MEMBER = CONV(k, v); }, \
          [](const PipelineConfig& c) { return text::format_double(static_cast<double>(c.MEMBER)); } \
    }                                                                                                \
  }

#define STR_FIELD(KEY, MEMBER)                                                                   \
  {                                                                                              \
    KEY, Field {                                                                                 \
      [](PipelineConfig& c, const std::string&, const std::string& v) { c.MEMBER = std::string(text::trim(v)); }, \
          [](const PipelineConfig& c) { return c.MEMBER; }                                       \
    }                                                                                            \
  }

const std::vector<std::pair<std::string, Field>>& field_table() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"input.source",
       {[](PipelineConfig& c, const std::string& k, const std::string& v) {
          const auto s = text::trim(v);
          if (s == "auto") c.source = InputSource::automatic;
          else if (s == "synth") c.source = InputSource::synth;
          else if (s == "trajectory") c.source = InputSource::trajectory;
          else if (s == "features") c.source = InputSource::features;
          else throw ConfigError(k, "expected auto, synth, trajectory or features, got '" + v + "'");
        },
        [](const PipelineConfig& c) { return source_name(c.source); }}},
      STR_FIELD("input.trajectory", trajectory_path),
      STR_FIELD("input.topology", topology_path),
      STR_FIELD("input.features", features_path),

      NUM_FIELD("synth.n_states", synth.n_states, to_int),
      NUM_FIELD("synth.stay_prob", synth.stay_prob, to_double),
      NUM_FIELD("synth.n_frames", synth.n_frames, to_int),
      NUM_FIELD("synth.d_feat", synth.d_feat, to_int),
      NUM_FIELD("synth.state_separation", synth.state_separation, to_double),
      NUM_FIELD("synth.smoothing_window", synth.smoothing_window, to_int),

      {"features.selection",
       {[](PipelineConfig& c, const std::string& k, const std::string& v) {
          auto items = split_list(v);
          if (items.empty()) throw ConfigError(k, "selection must not be empty");
          for (const auto& name : items)
            if (std::find(features::kCanonicalOrder.begin(), features::kCanonicalOrder.end(), name) ==
                features::kCanonicalOrder.end())
              throw ConfigError(k, "unknown featurizer '" + name + "'");
          c.selection = std::move(items);
        },
        [](const PipelineConfig& c) { return join(c.selection); }}},
      {"features.scaling",
       {[](PipelineConfig& c, const std::string& k, const std::string& v) {
          const auto s = text::trim(v);
          if (s == "raw") c.scaling = features::Scaling::raw;
          else if (s == "minmax01") c.scaling = features::Scaling::minmax01;
          else throw ConfigError(k, "expected raw or minmax01, got '" + v + "'");
        },
        [](const PipelineConfig& c) {
          return std::string(c.scaling == features::Scaling::raw ? "raw" : "minmax01");
        }}},
      {"features.angles",
       {[](PipelineConfig& c, const std::string& k, const std::string& v) {
          const auto s = text::trim(v);
          if (s == "raw") c.feature_options.angles = features::AngleEncoding::raw;
          else if (s == "cossin") c.feature_options.angles = features::AngleEncoding::cossin;
          else throw ConfigError(k, "expected raw or cossin, got '" + v + "'");
        },
        [](const PipelineConfig& c) {
          return std::string(c.feature_options.angles == features::AngleEncoding::raw ? "raw" : "cossin");
        }}},
      NUM_FIELD("features.probe_radius", feature_options.probe_radius, to_double),
      NUM_FIELD("features.sphere_points", feature_options.sphere_points, to_int),

      NUM_FIELD("tempreg.s", tempreg.s, to_int),
      {"tempreg.mode",
       {[](PipelineConfig& c, const std::string& k, const std::string& v) {
          c.tempreg.mode = rethrow_as_config(k, [&] { return tempreg::parse_mode(text::trim(v)); });
        },
        [](const PipelineConfig& c) { return std::string(tempreg::mode_name(c.tempreg.mode)); }}},
      {"tempreg.gaussian_sigma",
       {[](PipelineConfig& c, const std::string& k, const std::string& v) {
          const auto s = text::trim(v);
          if (s.empty() || s == "auto") c.tempreg.gaussian_sigma.reset();
          else c.tempreg.gaussian_sigma = to_double(k, v);
        },
        [](const PipelineConfig& c) {
          return c.tempreg.gaussian_sigma ? text::format_double(*c.tempreg.gaussian_sigma) : std::string("auto");
        }}},
      NUM_FIELD("tempreg.exp_theta", tempreg.exp_theta, to_double),

      NUM_FIELD("solver.d", solver.d, to_int),
      NUM_FIELD("solver.lambda1", solver.lambda1, to_double),
      NUM_FIELD("solver.lambda2", solver.lambda2, to_double),
      NUM_FIELD("solver.alpha", solver.alpha, to_double),
      NUM_FIELD("solver.beta", solver.beta, to_double),
      NUM_FIELD("solver.nu", solver.nu, to_double),
      NUM_FIELD("solver.max_iters", solver.max_iters, to_int),
      NUM_FIELD("solver.tol", solver.tol, to_double),
      NUM_FIELD("solver.cg_tol", solver.cg_tol, to_double),
      NUM_FIELD("solver.cg_max_iters", solver.cg_max_iters, to_int),
      {"solver.multiplier_pairing",
       {[](PipelineConfig& c, const std::string& k, const std::string& v) {
          c.solver.pairing = rethrow_as_config(k, [&] { return dictlearn::parse_pairing(text::trim(v)); });
        },
        [](const PipelineConfig& c) { return std::string(dictlearn::pairing_name(c.solver.pairing)); }}},
      {"solver.preconditioner",
       {[](PipelineConfig& c, const std::string& k, const std::string& v) {
          c.solver.preconditioner =
              rethrow_as_config(k, [&] { return dictlearn::parse_preconditioner(text::trim(v)); });
        },
        [](const PipelineConfig& c) { return std::string(dictlearn::preconditioner_name(c.solver.preconditioner)); }}},

      {"clustering.k",
       {[](PipelineConfig& c, const std::string& k, const std::string& v) { c.k_list = to_int_list(k, v); },
        [](const PipelineConfig& c) { return join(c.k_list); }}},

      {"msm.tau",
       {[](PipelineConfig& c, const std::string& k, const std::string& v) { c.tau_list = to_int_list(k, v); },
        [](const PipelineConfig& c) { return join(c.tau_list); }}},
      NUM_FIELD("msm.m", m, to_int),
      NUM_FIELD("msm.r", r, to_double),

      NUM_FIELD("baselines.pca_variance", pca_variance, to_double),
      NUM_FIELD("baselines.tica_lag", tica_lag, to_int),
      NUM_FIELD("baselines.tica_variance", tica_variance, to_double),
      NUM_FIELD("baselines.ssc_lambda", ssc_lambda, to_double),

      {"run.methods",
       {[](PipelineConfig& c, const std::string& k, const std::string& v) {
          auto items = split_list(v);
          if (items.empty()) throw ConfigError(k, "methods must not be empty");
          for (const auto& name : items)
            if (std::find(kMethods.begin(), kMethods.end(), name) == kMethods.end())
              throw ConfigError(k, "unknown method '" + name + "'");
          c.methods = std::move(items);
        },
        [](const PipelineConfig& c) { return join(c.methods); }}},
      STR_FIELD("run.output_dir", output_dir),
      {"run.seed",
       {[](PipelineConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); },
        [](const PipelineConfig& c) { return std::to_string(c.seed); }}},
  };
  return table;
}

#undef NUM_FIELD
#undef STR_FIELD

const Field& find_field(const std::string& key) {
  for (const auto& [k, f] : field_table())
    if (k == key) return f;
  throw ConfigError(key, "unknown configuration key");
}

}  // namespace

std::string source_name(InputSource s) {
  switch (s) {
    case InputSource::automatic: return "auto";
    case InputSource::synth: return "synth";
    case InputSource::trajectory: return "trajectory";
    case InputSource::features: return "features";
  }
  return "auto";
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (auto item : text::split(text, ',')) {
    item = text::trim(item);
    if (!item.empty()) out.emplace_back(item);
  }
  return out;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  find_field(key).set(*this, key, value);
}

std::string PipelineConfig::get(const std::string& key) const { return find_field(key).get(*this); }

const std::vector<std::string>& PipelineConfig::keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, f] : field_table()) out.push_back(k);
    return out;
  }();
  return keys;
}

InputSource PipelineConfig::resolved_source() const {
  if (source != InputSource::automatic) return source;
  if (!features_path.empty()) return InputSource::features;
  if (!trajectory_path.empty() || !topology_path.empty()) return InputSource::trajectory;
  return InputSource::synth;
}

void PipelineConfig::validate() const {
  switch (resolved_source()) {
    case InputSource::trajectory:
      if (trajectory_path.empty()) throw ConfigError("input.trajectory", "a trajectory path is required");
      if (topology_path.empty()) throw ConfigError("input.topology", "a topology path is required");
      break;
    case InputSource::features:
      if (features_path.empty()) throw ConfigError("input.features", "a feature file path is required");
      break;
    default:
      rethrow_as_config("synth", [&] { synth.validate(); });
      break;
  }
  if (feature_options.probe_radius < 0.0) throw ConfigError("features.probe_radius", "must be >= 0");
  if (feature_options.sphere_points < 32) throw ConfigError("features.sphere_points", "must be >= 32");
  rethrow_as_config("tempreg", [&] { tempreg.validate(); });
  rethrow_as_config("solver", [&] { solver_config().validate(); });
  for (int k : k_list)
    if (k < 1) throw ConfigError("clustering.k", "every k must be >= 1");
  for (int t : tau_list)
    if (t < 1) throw ConfigError("msm.tau", "every tau must be >= 1");
  if (m < 1) throw ConfigError("msm.m", "must be >= 1");
  if (r < 1.0) throw ConfigError("msm.r", "must be >= 1");
  if (!(pca_variance > 0.0 && pca_variance <= 1.0)) throw ConfigError("baselines.pca_variance", "must lie in (0, 1]");
  if (!(tica_variance > 0.0 && tica_variance <= 1.0))
    throw ConfigError("baselines.tica_variance", "must lie in (0, 1]");
  if (tica_lag < 1) throw ConfigError("baselines.tica_lag", "must be >= 1");
  if (ssc_lambda < 0.0) throw ConfigError("baselines.ssc_lambda", "must be >= 0 (0 selects the default)");
  if (output_dir.empty()) throw ConfigError("run.output_dir", "must not be empty");
}

dictlearn::SolverConfig PipelineConfig::solver_config() const {
  dictlearn::SolverConfig cfg = solver;
  cfg.seed = seed;
  return cfg;
}

std::string PipelineConfig::dump() const {
  std::ostringstream out;
  std::string section;
  for (const auto& key : keys()) {
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      out << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
      section = sec;
    }
    out << key.substr(dot + 1) << " = " << get(key) << '\n';
  }
  return out.str();
}

std::string resolve_axis(const std::string& axis) {
  static const std::map<std::string, std::string> aliases = {
      {"s", "tempreg.s"},           {"weight_mode", "tempreg.mode"}, {"mode", "tempreg.mode"},
      {"d", "solver.d"},            {"lambda1", "solver.lambda1"},   {"lambda2", "solver.lambda2"},
      {"alpha", "solver.alpha"},    {"beta", "solver.beta"},         {"nu", "solver.nu"},
      {"max_iters", "solver.max_iters"}};
  const auto it = aliases.find(axis);
  const std::string key = it == aliases.end() ? axis : it->second;
  const auto& keys = PipelineConfig::keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError(axis, "unknown sweep axis");
  return key;
}

void apply_ini(PipelineConfig& cfg, std::istream& in, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(source, static_cast<int>(e.line()), e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(section, "key outside of any [section] in " + source);
    for (const auto& [name, value] : body) cfg.set(section + "." + name, value.data());
  }
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  PipelineConfig cfg;
  apply_ini(cfg, in, path);
  return cfg;
}

}  // namespace moscito::app
