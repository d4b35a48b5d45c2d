#include "aif/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace aif {

ConfigError::ConfigError(std::size_t line, std::string field, const std::string& message)
    : std::runtime_error((line ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? "" : field + ": ") + message),
      line_(line),
      field_(std::move(field)) {}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

struct Entry {
  std::string raw;
  std::size_t line = 0;
  bool used = false;
};

// One [section] (or one [[mutation]] element) with typed accessors that
// remember which keys were consumed.
class Table {
 public:
  Table(std::string name, std::size_t line) : name_(std::move(name)), line_(line) {}

  const std::string& name() const { return name_; }
  std::size_t line() const { return line_; }

  void set(const std::string& key, std::string raw, std::size_t line) {
    if (entries_.count(key)) throw ConfigError(line, field(key), "duplicate key");
    entries_[key] = Entry{std::move(raw), line, false};
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<std::string> string(const std::string& key) {
    Entry* e = take(key);
    if (!e) return std::nullopt;
    return parse_string(*e, key);
  }

  std::optional<double> number(const std::string& key) {
    Entry* e = take(key);
    if (!e) return std::nullopt;
    return parse_number(e->raw, e->line, key);
  }

  std::optional<std::size_t> count(const std::string& key) {
    Entry* e = take(key);
    if (!e) return std::nullopt;
    return parse_count(e->raw, e->line, key);
  }

  std::optional<bool> boolean(const std::string& key) {
    Entry* e = take(key);
    if (!e) return std::nullopt;
    if (e->raw == "true") return true;
    if (e->raw == "false") return false;
    throw ConfigError(e->line, field(key), "expected true or false, got '" + e->raw + "'");
  }

  std::optional<std::vector<std::string>> list(const std::string& key) {
    Entry* e = take(key);
    if (!e) return std::nullopt;
    const std::string& r = e->raw;
    if (r.size() < 2 || r.front() != '[' || r.back() != ']') {
      throw ConfigError(e->line, field(key), "expected a [list]");
    }
    std::vector<std::string> items;
    std::stringstream in(r.substr(1, r.size() - 2));
    for (std::string item; std::getline(in, item, ',');) {
      item = trim(item);
      if (!item.empty()) items.push_back(item);
    }
    line_of_last_ = e->line;
    return items;
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    auto items = list(key);
    if (!items) return std::nullopt;
    std::vector<double> out;
    for (const auto& s : *items) out.push_back(parse_number(s, line_of_last_, key));
    return out;
  }

  std::optional<std::vector<std::size_t>> counts(const std::string& key) {
    auto items = list(key);
    if (!items) return std::nullopt;
    std::vector<std::size_t> out;
    for (const auto& s : *items) out.push_back(parse_count(s, line_of_last_, key));
    return out;
  }

  std::size_t line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? line_ : it->second.line;
  }

  std::string field(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  void reject_unused() const {
    for (const auto& [key, e] : entries_) {
      if (!e.used) throw ConfigError(e.line, field(key), "unknown key");
    }
  }

 private:
  Entry* take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  std::string parse_string(const Entry& e, const std::string& key) const {
    if (e.raw.size() < 2 || e.raw.front() != '"' || e.raw.back() != '"') {
      throw ConfigError(e.line, field(key), "expected a quoted string");
    }
    return e.raw.substr(1, e.raw.size() - 2);
  }

  double parse_number(const std::string& s, std::size_t line, const std::string& key) const {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw ConfigError(line, field(key), "expected a number, got '" + s + "'");
    }
    return v;
  }

  std::size_t parse_count(const std::string& s, std::size_t line, const std::string& key) const {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ConfigError(line, field(key), "expected a non-negative integer, got '" + s + "'");
    }
    return v;
  }

  std::string name_;
  std::size_t line_;
  std::map<std::string, Entry> entries_;
  std::size_t line_of_last_ = 0;
};

struct Document {
  Table root{"", 0};
  std::map<std::string, Table> sections;
  std::vector<Table> mutations;
};

const std::vector<std::string> kSections{"environment", "agent",   "planner",
                                         "mixer",       "learner", "calibration"};

Document tokenize(std::string_view text) {
  Document doc;
  Table* current = &doc.root;
  std::istringstream in{std::string(text)};
  std::size_t n = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++n;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.rfind("[[", 0) == 0) {
      if (line.size() < 4 || line.substr(line.size() - 2) != "]]") {
        throw ConfigError(n, "", "malformed table header");
      }
      const std::string name = trim(line.substr(2, line.size() - 4));
      if (name != "mutation") throw ConfigError(n, name, "unknown table array");
      doc.mutations.emplace_back("mutation", n);
      current = &doc.mutations.back();
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(n, "", "malformed section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), name) == kSections.end()) {
        throw ConfigError(n, name, "unknown section");
      }
      if (doc.sections.count(name)) throw ConfigError(n, name, "duplicate section");
      current = &doc.sections.emplace(name, Table(name, n)).first->second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(n, "", "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(n, key, "expected key = value");
    current->set(key, value, n);
  }
  return doc;
}

Table& section(Document& doc, const std::string& name) {
  auto it = doc.sections.find(name);
  if (it == doc.sections.end()) it = doc.sections.emplace(name, Table(name, 0)).first;
  return it->second;
}

template <class T>
void assign(std::optional<T> v, T& out) {
  if (v) out = *v;
}

GridSpec load_maze(Table& t, const std::string& key, std::size_t step_limit,
                   const std::filesystem::path& base_dir) {
  const std::string ref = *t.string(key);
  try {
    return GridSpec::parse(maze_text(ref, base_dir), step_limit, ref);
  } catch (const UnsolvableMaze&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(t.line_of(key), t.field(key), e.what());
  }
}

void read_cartpole(Table& t, CartPoleSpec& c) {
  assign(t.number("gravity"), c.gravity);
  assign(t.number("cart_mass"), c.cart_mass);
  assign(t.number("pole_mass"), c.pole_mass);
  assign(t.number("half_length"), c.half_length);
  assign(t.number("force"), c.force);
  assign(t.number("dt"), c.dt);
  if (auto v = t.number("angle_threshold_deg")) c.angle_threshold = *v * kDegree;
  assign(t.number("position_threshold"), c.position_threshold);
  if (auto v = t.counts("bins")) {
    if (v->size() != 4) throw ConfigError(t.line_of("bins"), t.field("bins"), "expected 4 entries");
    std::copy(v->begin(), v->end(), c.bins.begin());
  }
  if (auto v = t.numbers("clip")) {
    if (v->size() != 4) throw ConfigError(t.line_of("clip"), t.field("clip"), "expected 4 entries");
    std::copy(v->begin(), v->end(), c.clip.begin());
    c.clip[2] *= kDegree;  // given in degrees
  }
  assign(t.count("max_steps"), c.max_steps);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(t.line(), t.name(), e.what());
  }
}

template <class E>
E choose(Table& t, const std::string& key, const std::vector<std::pair<std::string, E>>& options,
         E fallback) {
  auto v = t.string(key);
  if (!v) return fallback;
  for (const auto& [name, value] : options) {
    if (*v == name) return value;
  }
  std::string allowed;
  for (const auto& o : options) allowed += (allowed.empty() ? "" : ", ") + o.first;
  throw ConfigError(t.line_of(key), t.field(key), "expected one of " + allowed + ", got '" + *v + "'");
}

}  // namespace

std::string maze_text(const std::string& reference, const std::filesystem::path& base_dir) {
  constexpr std::string_view kPrefix = "builtin:";
  if (reference.rfind(kPrefix, 0) == 0) {
    return std::string(builtin_maze(std::string_view(reference).substr(kPrefix.size())));
  }
  std::filesystem::path p(reference);
  if (p.is_relative()) p = base_dir / p;
  std::ifstream in(p);
  if (!in) throw std::ios_base::failure("cannot open maze file " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  Document doc = tokenize(text);
  ExperimentConfig cfg;
  Table& root = doc.root;

  cfg.name = root.string("name").value_or("experiment");
  if (auto v = root.count("episodes")) {
    if (*v < 1) throw ConfigError(root.line_of("episodes"), "episodes", "must be >= 1");
    cfg.episodes = *v;
  } else {
    throw ConfigError(0, "episodes", "required");
  }
  if (auto v = root.list("seeds")) {
    std::vector<std::uint64_t> seeds;
    for (const auto& s : *v) {
      std::uint64_t x = 0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(root.line_of("seeds"), "seeds", "expected integer seeds, got '" + s + "'");
      }
      seeds.push_back(x);
    }
    if (seeds.empty()) throw ConfigError(root.line_of("seeds"), "seeds", "at least one seed required");
    cfg.seeds = seeds;
  } else {
    for (std::uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);
  }
  cfg.output_dir = root.string("output_dir").value_or(cfg.name);
  assign(root.boolean("trace"), cfg.trace);
  assign(root.boolean("record_wall_time"), cfg.record_wall_time);
  root.reject_unused();

  // Environment and mutation phases.
  Table& env = section(doc, "environment");
  PhaseConfig base;
  base.env.kind = choose<EnvironmentConfig::Kind>(
      env, "kind",
      {{"grid", EnvironmentConfig::Kind::grid}, {"cartpole", EnvironmentConfig::Kind::cartpole}},
      EnvironmentConfig::Kind::grid);
  if (base.env.kind == EnvironmentConfig::Kind::grid) {
    if (!env.has("maze")) throw ConfigError(env.line(), "environment.maze", "required for grid");
    if (!env.has("step_limit")) {
      throw ConfigError(env.line(), "environment.step_limit", "required for grid");
    }
    const std::size_t limit = *env.count("step_limit");
    if (limit == 0) throw ConfigError(env.line_of("step_limit"), "environment.step_limit", "must be positive");
    base.env.grid = load_maze(env, "maze", limit, base_dir);
    base.env.source = base.env.grid.name;
  } else {
    read_cartpole(env, base.env.cartpole);
  }
  env.reject_unused();
  cfg.phases.push_back(base);

  for (Table& m : doc.mutations) {
    PhaseConfig phase;
    phase.env = cfg.phases.back().env;
    const auto ep = m.count("episode");
    if (!ep) throw ConfigError(m.line(), "mutation.episode", "required");
    if (*ep <= cfg.phases.back().episode) {
      throw ConfigError(m.line_of("episode"), "mutation.episode", "episodes must be strictly increasing");
    }
    phase.episode = *ep;
    if (phase.env.kind == EnvironmentConfig::Kind::grid) {
      const std::size_t limit = m.count("step_limit").value_or(phase.env.grid.step_limit);
      if (m.has("maze")) {
        phase.env.grid = load_maze(m, "maze", limit, base_dir);
        phase.env.source = phase.env.grid.name;
      }
      phase.env.grid.step_limit = limit;
    } else {
      if (m.boolean("halve_thresholds").value_or(false)) {
        phase.env.cartpole = phase.env.cartpole.mutated();
      }
      read_cartpole(m, phase.env.cartpole);
    }
    m.reject_unused();
    cfg.phases.push_back(phase);
  }

  Table& agent = section(doc, "agent");
  const AgentKind kind = choose<AgentKind>(
      agent, "kind", {{"dpefe", AgentKind::dpefe}, {"cl", AgentKind::cl}, {"mixed", AgentKind::mixed}},
      AgentKind::mixed);

  Table& planner = section(doc, "planner");
  PlannerConfig pc;
  if (auto v = planner.count("depth")) {
    if (*v < 1 && kind != AgentKind::cl) {
      throw ConfigError(planner.line_of("depth"), "planner.depth", "must be >= 1 for planning agents");
    }
    pc.plan_depth = *v;
  }
  if (auto v = planner.number("precision")) {
    if (!(*v > 0.0)) throw ConfigError(planner.line_of("precision"), "planner.precision", "must be positive");
    pc.action_precision = *v;
  }
  pc.continuation = choose<Continuation>(
      planner, "continuation",
      {{"softmax", Continuation::softmax}, {"hard_min", Continuation::hard_min}}, pc.continuation);
  planner.reject_unused();

  Table& mixer = section(doc, "mixer");
  MixerConfig mc;
  mc.mode = choose<MixMode>(mixer, "mode",
                            {{"incremental", MixMode::incremental}, {"sigmoid", MixMode::sigmoid}},
                            mc.mode);
  if (auto v = mixer.number("alpha_mix")) {
    if (!(*v > 0.0)) throw ConfigError(mixer.line_of("alpha_mix"), "mixer.alpha_mix", "must be positive");
    mc.alpha_mix = *v;
  }
  if (auto v = mixer.number("beta_prior")) {
    if (*v < 0.0 || *v > 1.0) {
      throw ConfigError(mixer.line_of("beta_prior"), "mixer.beta_prior", "must be in [0, 1]");
    }
    mc.beta_prior = *v;
  }
  mc.timing = choose<BetaTiming>(
      mixer, "timing",
      {{"update_then_act", BetaTiming::update_then_act}, {"act_then_update", BetaTiming::act_then_update}},
      mc.timing);
  assign(mixer.boolean("frozen"), mc.frozen);
  mixer.reject_unused();

  Table& learner = section(doc, "learner");
  LearnerConfig lc;
  if (auto v = learner.number("cl_floor")) {
    if (!(*v > 0.0)) throw ConfigError(learner.line_of("cl_floor"), "learner.cl_floor", "must be positive");
    lc.cl_floor = *v;
  }
  assign(learner.number("initial_value"), lc.initial_value);
  assign(learner.boolean("scale_by_length"), lc.scale_by_length);
  learner.reject_unused();

  cfg.agent = make_agent_config(kind, pc, mc, lc);
  if (auto v = agent.number("transition_prior")) {
    if (!(*v >= kDirichletFloor)) {
      throw ConfigError(agent.line_of("transition_prior"), "agent.transition_prior",
                        "must be >= 1e-6");
    }
    cfg.agent.transition_prior = *v;
  }
  if (auto v = agent.number("learn_rate")) {
    if (!(*v > 0.0)) throw ConfigError(agent.line_of("learn_rate"), "agent.learn_rate", "must be positive");
    cfg.agent.learn_rate = *v;
  }
  assign(agent.boolean("absorbing_terminals"), cfg.agent.absorbing_terminals);
  agent.reject_unused();

  Table& cal = section(doc, "calibration");
  if (auto v = cal.numbers("band")) {
    if (v->size() != 2 || (*v)[0] > (*v)[1]) {
      throw ConfigError(cal.line_of("band"), "calibration.band", "expected [low, high] with low <= high");
    }
    cfg.calibration_band = std::array<double, 2>{(*v)[0], (*v)[1]};
  }
  if (auto v = cal.count("trials")) {
    if (*v == 0) throw ConfigError(cal.line_of("trials"), "calibration.trials", "must be positive");
    cfg.calibration_trials = *v;
  }
  if (auto v = cal.number("cap_factor")) {
    if (!(*v > 0.0)) throw ConfigError(cal.line_of("cap_factor"), "calibration.cap_factor", "must be positive");
    cfg.calibration_cap_factor = *v;
  }
  cal.reject_unused();

  try {
    cfg.validate();
  } catch (const UnsolvableMaze&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, "", e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace aif
