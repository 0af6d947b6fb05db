#include "fishpath/config.hpp"

#include <fmt/format.h>
#include <set>

#include "fishpath/errors.hpp"

namespace fishpath::config {

using Json = nlohmann::json;

std::string to_string(Subcommand sub) {
  switch (sub) {
    case Subcommand::simulate: return "simulate";
    case Subcommand::solve_hjb: return "solve-hjb";
    case Subcommand::estimate_theta: return "estimate-theta";
    case Subcommand::strategy: return "strategy";
    case Subcommand::field: return "field";
    case Subcommand::verify: return "verify";
  }
  return "unknown";
}

Subcommand subcommand_from_string(const std::string& name) {
  for (auto s : {Subcommand::simulate, Subcommand::solve_hjb, Subcommand::estimate_theta,
                 Subcommand::strategy, Subcommand::field, Subcommand::verify}) {
    if (to_string(s) == name) return s;
  }
  throw ValidationError(fmt::format("unknown subcommand '{}'", name));
}

namespace {

/// One JSON object with its dotted path; every key must be claimed.
class Node {
 public:
  Node(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    require(j_.is_object(), fmt::format("'{}' must be an object", path_.empty() ? "<root>" : path_));
  }

  ~Node() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!claimed_.count(key)) {
        throw ValidationError(fmt::format("unknown key '{}'", join(key)));
      }
    }
  }

  bool has(const std::string& key) {
    claimed_.insert(key);
    return j_.contains(key);
  }

  const Json& at(const std::string& key) {
    require(has(key), fmt::format("missing required key '{}'", join(key)));
    return j_.at(key);
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  T get(const std::string& key) {
    const Json& v = at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        require(v.is_number(), "");
      } else if constexpr (std::is_same_v<T, bool>) {
        require(v.is_boolean(), "");
      } else if constexpr (std::is_same_v<T, std::string>) {
        require(v.is_string(), "");
      } else if constexpr (std::is_integral_v<T>) {
        require(v.is_number_integer() && (v.is_number_unsigned() || v.get<long long>() >= 0), "");
      }
      return v.get<T>();
    } catch (const std::exception&) {
      throw ValidationError(fmt::format("key '{}' has the wrong type", join(key)));
    }
  }

  template <typename T>
  void opt(const std::string& key, T& target) {
    if (has(key)) target = get<T>(key);
  }

  Node child(const std::string& key) { return Node(at(key), join(key)); }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> claimed_;
};

PerFish per_fish(const Json& v, const std::string& path) {
  if (v.is_number()) return PerFish(v.get<double>());
  require(v.is_array() && !v.empty(), fmt::format("key '{}' must be a number or an array", path));
  std::vector<double> out;
  for (const auto& e : v) {
    require(e.is_number(), fmt::format("key '{}' must hold numbers", path));
    out.push_back(e.get<double>());
  }
  return PerFish(std::move(out));
}

std::vector<double> numbers(const Json& v, const std::string& path) {
  require(v.is_array(), fmt::format("key '{}' must be an array", path));
  std::vector<double> out;
  for (const auto& e : v) {
    require(e.is_number(), fmt::format("key '{}' must hold numbers", path));
    out.push_back(e.get<double>());
  }
  return out;
}

Axis read_axis(Node& parent, const std::string& key, Axis axis) {
  if (!parent.has(key)) return axis;
  Node n = parent.child(key);
  n.opt("lo", axis.lo);
  n.opt("hi", axis.hi);
  n.opt("n", axis.n);
  axis.validate(key.c_str());
  return axis;
}

void set_mode(Modes& m, const std::string& key, const std::string& value) {
  if (key == "gaussian") {
    if (value == "exact") m.gaussian = feynman::GaussianMode::exact;
    else if (value == "paper") m.gaussian = feynman::GaussianMode::paper;
    else throw ValidationError(fmt::format("modes.gaussian must be exact or paper, got '{}'", value));
  } else if (key == "cross_term") {
    if (value == "paper") m.cross_term = CrossTerm::paper;
    else if (value == "conventional") m.cross_term = CrossTerm::conventional;
    else throw ValidationError(fmt::format("modes.cross_term must be paper or conventional, got '{}'", value));
  } else if (key == "velocity_convention") {
    if (value == "paper") m.velocity_convention = sde::VelocityConvention::paper;
    else if (value == "alignment") m.velocity_convention = sde::VelocityConvention::alignment;
    else throw ValidationError(fmt::format("modes.velocity_convention must be paper or alignment, got '{}'", value));
  } else if (key == "strategy_mode") {
    m.strategy_mode = strategy::strategy_mode_from_string(value);
  } else if (key == "f_assembly") {
    m.f_assembly = strategy::f_assembly_from_string(value);
  } else {
    throw ValidationError(fmt::format("unknown key 'modes.{}'", key));
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  RunConfig c;
  {
    Node r(root, "");
    if (r.has("schema_version")) {
      c.schema_version = r.get<int>("schema_version");
      require(c.schema_version == kSchemaVersion,
              fmt::format("unsupported schema_version {} (expected {})", c.schema_version, kSchemaVersion));
    }
    if (r.has("subcommand")) c.subcommand = subcommand_from_string(r.get<std::string>("subcommand"));
    c.seed = r.get<std::uint64_t>("seed");
    r.opt("output_dir", c.output_dir);

    {
      Node m = r.child("model");
      auto& p = c.model;
      p.n_fish = m.get<std::size_t>("n_fish");
      p.horizon = m.get<double>("horizon");
      p.dt = m.get<double>("dt");
      for (auto [key, target] : {std::pair<const char*, PerFish*>{"discount", &p.discount},
                                 {"weight", &p.weight},
                                 {"survival", &p.survival},
                                 {"sigma1", &p.sigma1},
                                 {"sigma2", &p.sigma2}}) {
        if (m.has(key)) *target = per_fish(m.at(key), m.join(key));
      }
      m.opt("comm_rate", p.comm_rate);
      m.opt("coupling", p.coupling);
      m.opt("mult1", p.mult1);
      m.opt("mult2", p.mult2);
      m.opt("mult3", p.mult3);
      m.opt("corr", p.corr);
      m.opt("quad_cost", p.quad_cost);
      m.opt("reward_floor", p.reward_floor);
      m.opt("omega_epsilon", p.omega_epsilon);
    }

    const std::size_t n = c.model.n_fish;
    c.initial.positions.resize(n);
    c.initial.velocities.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      c.initial.positions[i] = 1.0 + static_cast<double>(i);
      c.initial.velocities[i] = 1.0 + 0.25 * static_cast<double>(i);
    }
    if (r.has("initial")) {
      Node in = r.child("initial");
      if (in.has("positions")) c.initial.positions = numbers(in.at("positions"), "initial.positions");
      if (in.has("velocities")) c.initial.velocities = numbers(in.at("velocities"), "initial.velocities");
      in.opt("time", c.initial.time);
    }

    if (r.has("dynamics")) {
      Node d = r.child("dynamics");
      if (d.has("position_bounds")) {
        const Json& b = d.at("position_bounds");
        require(b.is_array(), "key 'dynamics.position_bounds' must be an array of [lo, hi] pairs");
        for (const auto& pair : b) {
          const auto v = numbers(pair, "dynamics.position_bounds");
          require(v.size() == 2, "key 'dynamics.position_bounds' must hold [lo, hi] pairs");
          c.position_bounds.push_back({v[0], v[1]});
        }
      }
    }

    if (r.has("policy")) {
      Node p = r.child("policy");
      p.opt("kind", c.policy.kind);
      p.opt("value", c.policy.value);
      require(c.policy.kind == "zero" || c.policy.kind == "constant" || c.policy.kind == "closed-form",
              fmt::format("policy.kind must be zero, constant or closed-form, got '{}'", c.policy.kind));
    }

    if (r.has("monte_carlo")) {
      Node m = r.child("monte_carlo");
      m.opt("n_paths", c.n_paths);
    }

    if (r.has("grid")) {
      Node g = r.child("grid");
      c.grid_x = read_axis(g, "x", c.grid_x);
      c.grid_v = read_axis(g, "v", c.grid_v);
    }

    if (r.has("hjb")) {
      Node h = r.child("hjb");
      auto& cfg = c.hjb;
      h.opt("potential", cfg.potential);
      h.opt("potential_weight", cfg.potential_weight);
      h.opt("drift", cfg.drift);
      h.opt("drift_rate", cfg.drift_rate);
      h.opt("sigma1", cfg.sigma1);
      h.opt("sigma2", cfg.sigma2);
      if (h.has("omega")) cfg.omega = h.get<double>("omega");
      h.opt("s_start", cfg.s_start);
      h.opt("s_end", cfg.s_end);
      h.opt("n_time_steps", cfg.n_time_steps);
      h.opt("stability_factor", cfg.stability_factor);
      require(cfg.potential == "quadratic" || cfg.potential == "constant",
              "hjb.potential must be quadratic or constant");
      require(cfg.drift == "ou" || cfg.drift == "zero", "hjb.drift must be ou or zero");
      require(cfg.sigma1 >= 0.0 && cfg.sigma2 >= 0.0, "hjb.sigma1 and hjb.sigma2 must be nonnegative");
      require(cfg.s_end > cfg.s_start, "hjb.s_end must exceed hjb.s_start");
    }

    if (r.has("feynman_kac")) {
      Node f = r.child("feynman_kac");
      auto& cfg = c.feynman_kac;
      if (f.has("probes")) {
        cfg.probes.clear();
        const Json& probes = f.at("probes");
        require(probes.is_array(), "key 'feynman_kac.probes' must be an array of [x, v] pairs");
        for (const auto& p : probes) {
          const auto v = numbers(p, "feynman_kac.probes");
          require(v.size() == 2, "key 'feynman_kac.probes' must hold [x, v] pairs");
          cfg.probes.push_back({v[0], v[1]});
        }
      }
      f.opt("n_paths", cfg.n_paths);
      f.opt("n_steps", cfg.n_steps);
      f.opt("extrapolate", cfg.extrapolate);
    }

    if (r.has("field")) {
      Node f = r.child("field");
      f.opt("gamma", c.field.gamma);
      f.opt("truncation", c.field.truncation);
      f.opt("parameter", c.field.parameter);
      f.opt("n_samples", c.field.n_samples);
      require(c.field.truncation >= 1, "field.truncation must be at least 1");
    }

    if (r.has("strategy")) {
      Node s = r.child("strategy");
      s.opt("time", c.strategy.time);
      s.opt("epsilon", c.strategy.epsilon);
      if (s.has("reference")) {
        const Json& ref = s.at("reference");
        require(ref.is_array(), "key 'strategy.reference' must be an array of fish indices");
        for (const auto& e : ref) {
          require(e.is_number_unsigned(), "key 'strategy.reference' must hold fish indices");
          c.strategy.reference.push_back(e.get<std::size_t>());
        }
      }
    }

    if (r.has("modes")) {
      Node m = r.child("modes");
      for (const char* key :
           {"gaussian", "cross_term", "velocity_convention", "strategy_mode", "f_assembly"}) {
        if (m.has(key)) set_mode(c.modes, key, m.get<std::string>(key));
      }
    }

    if (r.has("verify")) {
      Node v = r.child("verify");
      v.opt("scale", c.verify_scale);
      require(c.verify_scale == "quick" || c.verify_scale == "full",
              "verify.scale must be quick or full");
    }
  }

  c.model.cross_term = c.modes.cross_term;
  c.model.validate();
  c.initial.validate(c.model.n_fish);
  require(c.n_paths >= 1, "monte_carlo.n_paths must be at least 1");
  return c;
}

void apply_mode_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string::npos && eq > 0,
          fmt::format("mode override '{}' must look like KEY=VALUE", assignment));
  set_mode(config.modes, assignment.substr(0, eq), assignment.substr(eq + 1));
  config.model.cross_term = config.modes.cross_term;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  auto per_fish_json = [](const PerFish& p) -> nlohmann::ordered_json {
    if (p.shared()) return p[0];
    return p.values();
  };
  j["schema_version"] = c.schema_version;
  if (c.subcommand) j["subcommand"] = to_string(*c.subcommand);
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  const auto& p = c.model;
  j["model"] = {{"n_fish", p.n_fish},
                {"horizon", p.horizon},
                {"dt", p.dt},
                {"discount", per_fish_json(p.discount)},
                {"weight", per_fish_json(p.weight)},
                {"survival", per_fish_json(p.survival)},
                {"comm_rate", p.comm_rate},
                {"coupling", p.coupling},
                {"mult1", p.mult1},
                {"mult2", p.mult2},
                {"mult3", p.mult3},
                {"sigma1", per_fish_json(p.sigma1)},
                {"sigma2", per_fish_json(p.sigma2)},
                {"corr", p.corr},
                {"quad_cost", p.quad_cost},
                {"reward_floor", p.reward_floor},
                {"omega_epsilon", p.omega_epsilon}};
  j["initial"] = {{"time", c.initial.time},
                  {"positions", c.initial.positions},
                  {"velocities", c.initial.velocities}};
  nlohmann::ordered_json bounds = nlohmann::ordered_json::array();
  for (const auto& b : c.position_bounds) bounds.push_back({b.lo, b.hi});
  j["dynamics"] = {{"position_bounds", bounds}};
  j["policy"] = {{"kind", c.policy.kind}, {"value", c.policy.value}};
  j["monte_carlo"] = {{"n_paths", c.n_paths}};
  auto axis = [](const Axis& a) {
    return nlohmann::ordered_json{{"lo", a.lo}, {"hi", a.hi}, {"n", a.n}};
  };
  j["grid"] = {{"x", axis(c.grid_x)}, {"v", axis(c.grid_v)}};
  const auto& h = c.hjb;
  j["hjb"] = {{"potential", h.potential},
              {"potential_weight", h.potential_weight},
              {"drift", h.drift},
              {"drift_rate", h.drift_rate},
              {"sigma1", h.sigma1},
              {"sigma2", h.sigma2}};
  if (h.omega) j["hjb"]["omega"] = *h.omega;
  j["hjb"]["s_start"] = h.s_start;
  j["hjb"]["s_end"] = h.s_end;
  j["hjb"]["n_time_steps"] = h.n_time_steps;
  j["hjb"]["stability_factor"] = h.stability_factor;
  nlohmann::ordered_json probes = nlohmann::ordered_json::array();
  for (const auto& pr : c.feynman_kac.probes) probes.push_back({pr[0], pr[1]});
  j["feynman_kac"] = {{"probes", probes},
                      {"n_paths", c.feynman_kac.n_paths},
                      {"n_steps", c.feynman_kac.n_steps},
                      {"extrapolate", c.feynman_kac.extrapolate}};
  j["field"] = {{"gamma", c.field.gamma},
                {"truncation", c.field.truncation},
                {"parameter", c.field.parameter},
                {"n_samples", c.field.n_samples}};
  j["strategy"] = {{"time", c.strategy.time},
                   {"epsilon", c.strategy.epsilon},
                   {"reference", c.strategy.reference}};
  const auto& m = c.modes;
  j["modes"] = {
      {"gaussian", m.gaussian == feynman::GaussianMode::exact ? "exact" : "paper"},
      {"cross_term", m.cross_term == CrossTerm::paper ? "paper" : "conventional"},
      {"velocity_convention",
       m.velocity_convention == sde::VelocityConvention::paper ? "paper" : "alignment"},
      {"strategy_mode", strategy::to_string(m.strategy_mode)},
      {"f_assembly", strategy::to_string(m.f_assembly)}};
  j["verify"] = {{"scale", c.verify_scale}};
  return j;
}

}  // namespace fishpath::config
