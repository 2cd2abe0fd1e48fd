#include "coex/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "coex/error.hpp"

namespace coex {

using nlohmann::json;

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::LBT: return "LBT";
    case Scheme::Q1: return "Q1";
    case Scheme::Q2: return "Q2";
    case Scheme::Q2u: return "Q2u";
    case Scheme::QLearning: return "QLearning";
    case Scheme::DDQN: return "DDQN";
    case Scheme::MAB: return "MAB";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : kAllSchemes)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

std::array<PriorityClassConfig, 4> default_priority_classes() {
  return {{
      {4, 1, 8, 25.0, 16, 6, 1024, 79.0, 250.0, 2000.0},
      {8, 1, 16, 25.0, 16, 6, 1024, 43.0, 250.0, 3000.0},
      {16, 2, 64, 43.0, 16, 6, 1024, 34.0, 500.0, 8000.0},
      {16, 3, 128, 79.0, 16, 6, 1024, 34.0, 500.0, 8000.0},
  }};
}

namespace {

std::optional<PolicyName> parse_policy(std::string_view name) {
  for (PolicyName p : {PolicyName::Q1, PolicyName::Q2, PolicyName::Q2u})
    if (to_string(p) == name) return p;
  return std::nullopt;
}

// Reads one JSON object, remembering which keys were consumed so the rest
// can be reported as unknown.
class Section {
 public:
  Section(const json& obj, std::string path, std::vector<std::string>& errors,
          std::vector<std::string>& defaulted)
      : obj_(obj), path_(std::move(path)), errors_(errors), defaulted_(defaulted) {}

  ~Section() {
    if (!obj_.is_object()) return;
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) errors_.push_back("unknown key '" + key_path(it.key()) + "'");
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const std::string& key, bool leaf = true) {
    seen_.insert(key);
    if (!obj_.is_object() || !obj_.contains(key)) {
      if (leaf) defaulted_.push_back(key_path(key));
      return nullptr;
    }
    return &obj_.at(key);
  }

  void read(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (v->is_number_integer()) out = v->get<int>();
      else type_error(key, "an integer");
    }
  }
  void read(const std::string& key, std::int64_t& out) {
    if (const json* v = find(key)) {
      if (v->is_number_integer()) out = v->get<std::int64_t>();
      else type_error(key, "an integer");
    }
  }
  void read(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (v->is_number_unsigned()) out = v->get<std::uint64_t>();
      else type_error(key, "a non-negative integer");
    }
  }
  void read(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (v->is_number()) out = v->get<double>();
      else type_error(key, "a number");
    }
  }
  void read(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (v->is_boolean()) out = v->get<bool>();
      else type_error(key, "a boolean");
    }
  }
  void read(const std::string& key, std::vector<int>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) return type_error(key, "an array of integers");
      std::vector<int> tmp;
      for (const auto& e : *v) {
        if (!e.is_number_integer()) return type_error(key, "an array of integers");
        tmp.push_back(e.get<int>());
      }
      out = std::move(tmp);
    }
  }

  template <typename F>
  void read_string(const std::string& key, F&& assign) {
    if (const json* v = find(key)) {
      if (!v->is_string()) return type_error(key, "a string");
      if (!assign(v->get<std::string>()))
        errors_.push_back(key_path(key) + ": unrecognized value '" + v->get<std::string>() + "'");
    }
  }

  // Nested object; returns a null json when absent.
  const json& object(const std::string& key) {
    static const json kEmpty = json::object();
    const json* v = find(key, false);
    if (!v) return kEmpty;
    if (!v->is_object()) {
      type_error(key, "an object");
      return kEmpty;
    }
    return *v;
  }


 private:
  void type_error(const std::string& key, const char* what) {
    errors_.push_back(key_path(key) + " must be " + what);
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
  std::vector<std::string>& errors_;
  std::vector<std::string>& defaulted_;
};

void read_agent(Section& s, AgentConfig& a) {
  s.read("learning_rate", a.learning_rate);
  s.read("discount", a.discount);
  s.read("epsilon", a.epsilon);
  s.read("replay_capacity", a.replay_capacity);
  s.read("batch_size", a.batch_size);
  s.read("target_sync_interval", a.target_sync_interval);
  s.read("episodes", a.episodes);
  s.read("steps_per_episode", a.steps_per_episode);
  s.read("hidden_layers", a.hidden_layers);
  s.read("qlearning_bins", a.qlearning_bins);
  s.read("qlearning_state_max", a.qlearning_state_max);
  s.read("mab_window", a.mab_window);
  s.read_string("gradient_kernel", [&](const std::string& v) {
    if (v == "serial") a.gradient_kernel = GradientKernel::Serial;
    else if (v == "openmp") a.gradient_kernel = GradientKernel::OpenMP;
    else return false;
    return true;
  });
}

void read_timing(Section& s, AccessConfig& c, bool with_txop) {
  if (with_txop) s.read("txop_us", c.txop_us);
  s.read("slot_us", c.slot_us);
  s.read("rate_mbps", c.rate_mbps);
}

void read_class(Section& s, PriorityClassConfig& p) {
  s.read("nru_initial_window", p.nru_initial_window);
  s.read("nru_max_stage", p.nru_max_stage);
  s.read("nru_window_cap", p.nru_window_cap);
  s.read("nru_defer_us", p.nru_defer_us);
  s.read("wifi_initial_window", p.wifi_initial_window);
  s.read("wifi_max_stage", p.wifi_max_stage);
  s.read("wifi_window_cap", p.wifi_window_cap);
  s.read("wifi_defer_us", p.wifi_defer_us);
  s.read("t_min_us", p.t_min_us);
  s.read("t_max_us", p.t_max_us);
}

void read_policy(Section& s, RewardPolicy& p) {
  s.read("d1", p.d1);
  s.read("d2", p.d2);
  s.read("r1", p.r1);
  s.read("r2", p.r2);
  s.read("r3", p.r3);
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  if (!doc.is_object()) throw ValidationError({"top level must be a JSON object"});
  {
    Section top(doc, "", errors, cfg.defaulted);
    if (!doc.contains("schema_version")) {
      errors.push_back("schema_version is required");
    }
    top.read("schema_version", cfg.schema_version);
    top.read_string("scheme", [&](const std::string& v) {
      auto s = parse_scheme(v);
      if (s) cfg.scheme = *s;
      return s.has_value();
    });
    top.read("n_pairs", cfg.n_pairs);
    top.read("priority_class", cfg.priority_class);
    top.read("trials", cfg.trials);
    top.read("base_seed", cfg.base_seed);
    top.read_string("baseline_policy", [&](const std::string& v) {
      auto p = parse_policy(v);
      if (p) cfg.baseline_policy = *p;
      return p.has_value();
    });
    {
      Section s(top.object("agent"), "agent", errors, cfg.defaulted);
      read_agent(s, cfg.agent);
    }
    {
      Section s(top.object("sim"), "sim", errors, cfg.defaulted);
      s.read("window_slots", cfg.window_slots);
    }
    {
      Section s(top.object("wifi"), "wifi", errors, cfg.defaulted);
      read_timing(s, cfg.wifi, true);
    }
    {
      Section s(top.object("nru"), "nru", errors, cfg.defaulted);
      read_timing(s, cfg.nru, false);
    }
    {
      Section s(top.object("priority_classes"), "priority_classes", errors, cfg.defaulted);
      for (int k = 1; k <= 4; ++k) {
        const std::string key = std::to_string(k);
        Section c(s.object(key), "priority_classes." + key, errors, cfg.defaulted);
        read_class(c, cfg.priority_classes[k - 1]);
      }
    }
    {
      Section s(top.object("txop"), "txop", errors, cfg.defaulted);
      s.read("alpha", cfg.alpha);
      s.read("beta", cfg.beta);
    }
    {
      Section s(top.object("utility"), "utility", errors, cfg.defaulted);
      s.read("b_min", cfg.b_min);
      if (const json* v = s.find("b_max")) {
        if (v->is_number()) {
          cfg.b_max = v->get<double>();
        } else if (!v->is_null()) {
          errors.push_back("utility.b_max must be a number or null");
        }
      }
    }
    {
      Section s(top.object("policies"), "policies", errors, cfg.defaulted);
      Section q1(s.object("Q1"), "policies.Q1", errors, cfg.defaulted);
      read_policy(q1, cfg.q1);
      Section q2(s.object("Q2"), "policies.Q2", errors, cfg.defaulted);
      read_policy(q2, cfg.q2);
      Section q2u(s.object("Q2u"), "policies.Q2u", errors, cfg.defaulted);
      read_policy(q2u, cfg.q2u);
    }
    {
      Section s(top.object("stabilization"), "stabilization", errors, cfg.defaulted);
      s.read("window", cfg.stabilization.window);
      s.read("rel_tol", cfg.stabilization.rel_tol);
      s.read("hold", cfg.stabilization.hold);
    }
    {
      Section s(top.object("sweep"), "sweep", errors, cfg.defaulted);
      s.read("n_pairs", cfg.sweep.n_pairs);
      s.read("priorities", cfg.sweep.priorities);
      if (const json* v = s.find("schemes")) {
        std::vector<Scheme> schemes;
        bool ok = v->is_array();
        if (ok) {
          for (const auto& e : *v) {
            auto sc = e.is_string() ? parse_scheme(e.get<std::string>()) : std::nullopt;
            if (!sc) {
              errors.push_back("sweep.schemes: unrecognized entry " + e.dump());
              ok = false;
            } else {
              schemes.push_back(*sc);
            }
          }
        } else {
          errors.push_back("sweep.schemes must be an array of scheme names");
        }
        if (ok) cfg.sweep.schemes = std::move(schemes);
      }
    }
    {
      Section s(top.object("report"), "report", errors, cfg.defaulted);
      s.read("last_episodes", cfg.report.last_episodes);
      s.read("plots", cfg.report.plots);
    }
  }
  auto v = validate(cfg);
  errors.insert(errors.end(), v.begin(), v.end());
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return cfg;
}

ExperimentConfig parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> out;
  auto add = [&](std::vector<std::string> v) { out.insert(out.end(), v.begin(), v.end()); };
  if (c.schema_version != kSchemaVersion)
    out.push_back("schema_version must be " + std::to_string(kSchemaVersion));
  if (c.n_pairs < 1 || c.n_pairs > 10) out.push_back("n_pairs must be in 1..10");
  if (c.priority_class < 1 || c.priority_class > 4) out.push_back("priority_class must be in 1..4");
  if (c.trials < 1) out.push_back("trials must be >= 1");
  add(validate(c.agent));
  if (c.window_slots < kMinWindowSlots)
    out.push_back("sim.window_slots must be >= " + std::to_string(kMinWindowSlots));
  if (!(c.b_min > 0)) out.push_back("utility.b_min must be > 0");
  if (c.b_max && !(*c.b_max > c.b_min)) out.push_back("utility.b_max must be > utility.b_min");
  add(validate(c.q1, "policies.Q1"));
  add(validate(c.q2, "policies.Q2"));
  add(validate(c.q2u, "policies.Q2u"));
  add(validate(c.stabilization));
  if (c.report.last_episodes < 1) out.push_back("report.last_episodes must be >= 1");
  if (c.report.last_episodes > c.agent.episodes)
    out.push_back("report.last_episodes must be <= agent.episodes");
  for (int k = 1; k <= 4; ++k) {
    const std::string p = "priority_classes." + std::to_string(k);
    for (auto& e : validate(wifi_access(c, k), p + " wifi")) out.push_back(e);
    for (auto& e : validate(nru_access(c, k), p + " nru")) out.push_back(e);
    TxopControl t = txop_control(c, k);
    for (auto& e : validate(t)) out.push_back(p + ": " + e);
  }
  if (c.wifi.slot_us != c.nru.slot_us) out.push_back("wifi.slot_us and nru.slot_us must be equal");
  if (c.sweep.n_pairs.empty()) out.push_back("sweep.n_pairs must not be empty");
  for (int n : c.sweep.n_pairs)
    if (n < 1 || n > 10) out.push_back("sweep.n_pairs entries must be in 1..10");
  if (c.sweep.priorities.empty()) out.push_back("sweep.priorities must not be empty");
  for (int p : c.sweep.priorities)
    if (p < 1 || p > 4) out.push_back("sweep.priorities entries must be in 1..4");
  if (c.sweep.schemes.empty()) out.push_back("sweep.schemes must not be empty");
  return out;
}

namespace {
json policy_json(const RewardPolicy& p) {
  return {{"d1", p.d1}, {"d2", p.d2}, {"r1", p.r1}, {"r2", p.r2}, {"r3", p.r3}};
}
}  // namespace

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["scheme"] = std::string(to_string(c.scheme));
  j["n_pairs"] = c.n_pairs;
  j["priority_class"] = c.priority_class;
  j["trials"] = c.trials;
  j["base_seed"] = c.base_seed;
  j["baseline_policy"] = std::string(to_string(c.baseline_policy));
  const auto& a = c.agent;
  j["agent"] = {{"learning_rate", a.learning_rate},
                {"discount", a.discount},
                {"epsilon", a.epsilon},
                {"replay_capacity", a.replay_capacity},
                {"batch_size", a.batch_size},
                {"target_sync_interval", a.target_sync_interval},
                {"episodes", a.episodes},
                {"steps_per_episode", a.steps_per_episode},
                {"hidden_layers", a.hidden_layers},
                {"qlearning_bins", a.qlearning_bins},
                {"qlearning_state_max", a.qlearning_state_max},
                {"mab_window", a.mab_window},
                {"gradient_kernel", a.gradient_kernel == GradientKernel::OpenMP ? "openmp" : "serial"}};
  j["sim"] = {{"window_slots", c.window_slots}};
  j["wifi"] = {{"txop_us", c.wifi.txop_us}, {"slot_us", c.wifi.slot_us}, {"rate_mbps", c.wifi.rate_mbps}};
  j["nru"] = {{"slot_us", c.nru.slot_us}, {"rate_mbps", c.nru.rate_mbps}};
  json classes = json::object();
  for (int k = 1; k <= 4; ++k) {
    const auto& p = c.priority_classes[k - 1];
    classes[std::to_string(k)] = {{"nru_initial_window", p.nru_initial_window},
                                  {"nru_max_stage", p.nru_max_stage},
                                  {"nru_window_cap", p.nru_window_cap},
                                  {"nru_defer_us", p.nru_defer_us},
                                  {"wifi_initial_window", p.wifi_initial_window},
                                  {"wifi_max_stage", p.wifi_max_stage},
                                  {"wifi_window_cap", p.wifi_window_cap},
                                  {"wifi_defer_us", p.wifi_defer_us},
                                  {"t_min_us", p.t_min_us},
                                  {"t_max_us", p.t_max_us}};
  }
  j["priority_classes"] = classes;
  j["txop"] = {{"alpha", c.alpha}, {"beta", c.beta}};
  j["utility"] = {{"b_min", c.b_min}, {"b_max", c.b_max ? json(*c.b_max) : json(nullptr)}};
  j["policies"] = {{"Q1", policy_json(c.q1)}, {"Q2", policy_json(c.q2)}, {"Q2u", policy_json(c.q2u)}};
  j["stabilization"] = {{"window", c.stabilization.window},
                        {"rel_tol", c.stabilization.rel_tol},
                        {"hold", c.stabilization.hold}};
  json schemes = json::array();
  for (Scheme s : c.sweep.schemes) schemes.push_back(std::string(to_string(s)));
  j["sweep"] = {{"n_pairs", c.sweep.n_pairs}, {"priorities", c.sweep.priorities}, {"schemes", schemes}};
  j["report"] = {{"last_episodes", c.report.last_episodes}, {"plots", c.report.plots}};
  return j;
}

const PriorityClassConfig& priority_class(const ExperimentConfig& cfg, int priority) {
  if (priority < 1 || priority > 4) throw DomainError("priority class must be in 1..4");
  return cfg.priority_classes[static_cast<std::size_t>(priority - 1)];
}

AccessConfig wifi_access(const ExperimentConfig& cfg, int priority) {
  const auto& p = priority_class(cfg, priority);
  AccessConfig a = cfg.wifi;
  a.initial_window = p.wifi_initial_window;
  a.max_stage = p.wifi_max_stage;
  a.window_cap = p.wifi_window_cap;
  a.defer_us = p.wifi_defer_us;
  return a;
}

AccessConfig nru_access(const ExperimentConfig& cfg, int priority) {
  const auto& p = priority_class(cfg, priority);
  AccessConfig a = cfg.nru;
  a.initial_window = p.nru_initial_window;
  a.max_stage = p.nru_max_stage;
  a.window_cap = p.nru_window_cap;
  a.defer_us = p.nru_defer_us;
  a.txop_us = p.t_max_us;
  return a;
}

SimConfig sim_config(const ExperimentConfig& cfg, int n_pairs, int priority) {
  SimConfig s;
  s.n_wifi = n_pairs;
  s.n_nru = n_pairs;
  s.wifi = wifi_access(cfg, priority);
  s.nru = nru_access(cfg, priority);
  s.window_slots = cfg.window_slots;
  s.rng_seed = cfg.base_seed;
  return s;
}

TxopControl txop_control(const ExperimentConfig& cfg, int priority) {
  const auto& p = priority_class(cfg, priority);
  TxopControl t;
  t.t_nr_us = p.t_max_us;
  t.alpha = cfg.alpha;
  t.beta = cfg.beta;
  t.t_min_us = p.t_min_us;
  t.t_max_us = p.t_max_us;
  t.priority_class = priority;
  return t;
}

UtilityModel utility_model(const ExperimentConfig& cfg, int priority) {
  UtilityModel u;
  u.b_min = cfg.b_min;
  u.b_max = cfg.b_max ? *cfg.b_max
                      : std::max(lone_node_throughput(wifi_access(cfg, priority)),
                                 lone_node_throughput(nru_access(cfg, priority)));
  return u;
}

RewardPolicy policy_for(const ExperimentConfig& cfg, Scheme scheme) {
  auto by_name = [&](PolicyName n) {
    switch (n) {
      case PolicyName::Q1: return cfg.q1;
      case PolicyName::Q2: return cfg.q2;
      case PolicyName::Q2u: return cfg.q2u;
    }
    return cfg.q1;
  };
  switch (scheme) {
    case Scheme::Q1: return cfg.q1;
    case Scheme::Q2: return cfg.q2;
    case Scheme::Q2u: return cfg.q2u;
    default: return by_name(cfg.baseline_policy);
  }
}

AgentKind agent_kind(Scheme scheme) {
  switch (scheme) {
    case Scheme::LBT: return AgentKind::FixedLBT;
    case Scheme::QLearning: return AgentKind::QLearning;
    case Scheme::DDQN: return AgentKind::DDQN;
    case Scheme::MAB: return AgentKind::MAB;
    default: return AgentKind::DQN;
  }
}

RewardRange reward_range(const RewardPolicy& policy) { return {policy.r1, policy.r3}; }

}  // namespace coex
