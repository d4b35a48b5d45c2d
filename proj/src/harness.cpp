#include "aif/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "aif/planner.hpp"

namespace aif {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out << text;
  if (!out) throw std::ios_base::failure("write failed: " + path.string());
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::unique_ptr<Environment> EnvironmentConfig::make() const {
  if (kind == Kind::grid) return std::make_unique<GridWorld>(grid);
  return std::make_unique<CartPole>(cartpole);
}

void ExperimentConfig::validate() const {
  if (episodes < 1) throw std::invalid_argument("episodes: must be >= 1");
  if (seeds.empty()) throw std::invalid_argument("seeds: at least one seed required");
  if (agent.kind != AgentKind::cl) agent.planner.validate();
  if (calibration_band && !((*calibration_band)[0] <= (*calibration_band)[1])) {
    throw std::invalid_argument("calibration_band: lower bound exceeds upper bound");
  }
  schedule().validate();
}

MutationSchedule ExperimentConfig::schedule() const {
  MutationSchedule s;
  for (const auto& p : phases) s.add(p.episode, std::shared_ptr<const Environment>(p.env.make()));
  return s;
}

SeedRun run_seed(const ExperimentConfig& config, std::uint64_t seed, bool trace,
                 bool parallel_planner,
                 const std::function<void(std::uint64_t, const EpisodeRecord&)>& on_episode) {
  using clock = std::chrono::steady_clock;
  std::size_t phase = 0;
  std::unique_ptr<Environment> env = config.phases.at(0).env.make();

  AgentConfig ac = config.agent;
  ac.planner.parallel = parallel_planner;
  Agent agent(ac, env->num_states(), env->num_actions(), env->step_limit(), env->preference(),
              mix_seed(seed, 1));
  Rng env_rng(mix_seed(seed, 2));

  SeedRun run;
  run.seed = seed;
  run.episodes.reserve(config.episodes);
  std::vector<char> visited(env->num_states(), 0);
  std::vector<std::size_t> visited_list;

  for (std::size_t e = 0; e < config.episodes; ++e) {
    if (phase + 1 < config.phases.size() && config.phases[phase + 1].episode == e) {
      ++phase;
      env = config.phases[phase].env.make();
      agent.set_preference(env->preference());
    }
    const auto t0 = clock::now();
    agent.begin_episode();
    std::size_t obs = env->reset(env_rng);
    double gamma_sum = 0.0;
    StepResult r;
    do {
      const std::size_t a = agent.act(obs);
      const std::size_t s = agent.last_step().state;
      if (!visited[s]) {
        visited[s] = 1;
        visited_list.push_back(s);
      }
      r = env->step(a);
      agent.feedback(r.state, r.goal_reached, r.failure);
      gamma_sum += agent.learner().gamma();
      if (trace) {
        run.steps.push_back({e, agent.steps_this_episode() - 1, s, a, agent.learner().gamma(),
                             agent.last_step().beta_used});
      }
      obs = r.state;
    } while (!r.done());

    EpisodeRecord rec;
    rec.seed = seed;
    rec.episode = e;
    rec.steps = agent.steps_this_episode();
    rec.goal = r.goal_reached || (env->survival_task() && r.horizon_hit);
    rec.gamma_mean = gamma_sum / static_cast<double>(rec.steps);
    rec.gamma_final = agent.learner().gamma();
    rec.plan_ops = agent.last_plan_ops();

    agent.end_episode(r.goal_reached ? Outcome::goal
                      : r.failure    ? Outcome::failure
                                     : Outcome::horizon);

    const auto betas = agent.mixer().betas();
    double bsum = 0.0;
    for (std::size_t s : visited_list) {
      bsum += betas[s];
      visited[s] = 0;
    }
    rec.beta_mean = bsum / static_cast<double>(visited_list.size());
    visited_list.clear();
    double all = 0.0;
    for (double b : betas) all += b;
    rec.beta_all_mean = all / static_cast<double>(betas.size());
    if (trace) run.beta_states.emplace_back(betas.begin(), betas.end());
    if (config.record_wall_time) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    }
    run.episodes.push_back(rec);
    if (on_episode) on_episode(seed, rec);
  }
  return run;
}

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  RunResult result;
  result.name = config.name;
  result.runs.resize(config.seeds.size());
  const bool trace = options.trace || config.trace;
  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, config.seeds.size());
  // Threaded planning only when seeds are not already spread over threads.
  const bool parallel_planner = workers == 1;

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
      result.runs[i] = run_seed(config, config.seeds[i], trace, parallel_planner, options.on_episode);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return result;
}

std::string episodes_csv(const RunResult& result) {
  std::ostringstream out;
  out << kEpisodeCsvHeader << '\n';
  for (const auto& run : result.runs) {
    for (const auto& r : run.episodes) {
      out << r.seed << ',' << r.episode << ',' << r.steps << ',' << (r.goal ? 1 : 0) << ','
          << fmt(r.gamma_mean) << ',' << fmt(r.gamma_final) << ',' << fmt(r.beta_mean) << ','
          << r.plan_ops << ',' << fmt(r.wall_ms) << '\n';
    }
  }
  return out.str();
}

Quantiles quantiles(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("quantiles of empty set");
  std::sort(v.begin(), v.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

std::vector<double> median_curve(const RunResult& result,
                                 const std::function<double(const EpisodeRecord&)>& field) {
  std::size_t episodes = std::numeric_limits<std::size_t>::max();
  for (const auto& run : result.runs) episodes = std::min(episodes, run.episodes.size());
  if (result.runs.empty()) episodes = 0;
  std::vector<double> curve(episodes);
  std::vector<double> column(result.runs.size());
  for (std::size_t e = 0; e < episodes; ++e) {
    for (std::size_t i = 0; i < result.runs.size(); ++i) column[i] = field(result.runs[i].episodes[e]);
    curve[e] = quantiles(column).median;
  }
  return curve;
}

std::string summary_json(const RunResult& result) {
  using nlohmann::json;
  using Field = std::function<double(const EpisodeRecord&)>;
  const std::vector<std::pair<const char*, Field>> fields{
      {"steps", [](const EpisodeRecord& r) { return static_cast<double>(r.steps); }},
      {"goal", [](const EpisodeRecord& r) { return r.goal ? 1.0 : 0.0; }},
      {"gamma_mean", [](const EpisodeRecord& r) { return r.gamma_mean; }},
      {"gamma_final", [](const EpisodeRecord& r) { return r.gamma_final; }},
      {"beta_mean", [](const EpisodeRecord& r) { return r.beta_mean; }},
      {"beta_all_states", [](const EpisodeRecord& r) { return r.beta_all_mean; }},
      {"plan_ops", [](const EpisodeRecord& r) { return static_cast<double>(r.plan_ops); }},
  };

  json doc;
  doc["name"] = result.name;
  json seeds = json::array();
  for (const auto& run : result.runs) seeds.push_back(run.seed);
  doc["seeds"] = seeds;
  std::size_t episodes = result.runs.empty() ? 0 : result.runs.front().episodes.size();
  doc["episodes"] = episodes;

  json per_episode = json::object();
  json per_run = json::object();
  for (const auto& [name, field] : fields) {
    json q25 = json::array(), med = json::array(), q75 = json::array();
    for (std::size_t e = 0; e < episodes; ++e) {
      std::vector<double> col;
      for (const auto& run : result.runs) col.push_back(field(run.episodes.at(e)));
      const Quantiles q = quantiles(col);
      q25.push_back(q.q25);
      med.push_back(q.median);
      q75.push_back(q.q75);
    }
    per_episode[name] = {{"q25", q25}, {"median", med}, {"q75", q75}};

    std::vector<double> run_means;
    for (const auto& run : result.runs) {
      std::vector<double> v;
      for (const auto& r : run.episodes) v.push_back(field(r));
      run_means.push_back(mean_of(v));
    }
    if (!run_means.empty()) {
      const Quantiles q = quantiles(run_means);
      per_run[name] = {{"q25", q.q25}, {"median", q.median}, {"q75", q.q75}};
    }
  }
  doc["per_episode"] = per_episode;
  doc["run_mean"] = per_run;
  return doc.dump(2) + "\n";
}

std::vector<std::filesystem::path> emit_metrics(const RunResult& result,
                                                const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::ios_base::failure("cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  written.push_back(dir / "episodes.csv");
  write_file(written.back(), episodes_csv(result));
  written.push_back(dir / "summary.json");
  write_file(written.back(), summary_json(result));

  for (const auto& run : result.runs) {
    if (!run.steps.empty()) {
      std::ostringstream t;
      t << "episode,t,state,action,gamma,beta\n";
      for (const auto& s : run.steps) {
        t << s.episode << ',' << s.t << ',' << s.state << ',' << s.action << ',' << fmt(s.gamma)
          << ',' << fmt(s.beta) << '\n';
      }
      written.push_back(dir / ("trace_seed" + std::to_string(run.seed) + ".csv"));
      write_file(written.back(), t.str());
    }
    if (!run.beta_states.empty()) {
      std::ostringstream b;
      b << "episode";
      for (std::size_t s = 0; s < run.beta_states.front().size(); ++s) b << ",s" << s;
      b << '\n';
      for (std::size_t e = 0; e < run.beta_states.size(); ++e) {
        b << e;
        for (double x : run.beta_states[e]) b << ',' << fmt(x);
        b << '\n';
      }
      written.push_back(dir / ("beta_states_seed" + std::to_string(run.seed) + ".csv"));
      write_file(written.back(), b.str());
    }
  }
  return written;
}

GenerativeModel learned_maze_model(const GridSpec& spec) {
  auto model = GenerativeModel::fully_observable(spec.num_states(), kGridActions, spec.step_limit,
                                                 kDirichletFloor);
  for (std::size_t s = 0; s < spec.num_states(); ++s) {
    if (spec.is_wall(s)) continue;
    for (std::size_t u = 0; u < kGridActions; ++u) {
      learn_transition(s, u, grid_step(spec, s, u).state, model);
    }
  }
  model.set_preference(goal_preference(spec.num_states(), spec.goal));
  return model;
}

std::vector<ComplexityRow> complexity_report(const GenerativeModel& model,
                                             const std::vector<std::size_t>& depths, bool timed,
                                             std::size_t repeats) {
  const std::size_t S = model.num_states();
  const std::size_t U = model.num_actions();
  const std::size_t O = model.num_obs();
  std::vector<ComplexityRow> rows;
  for (std::size_t n : depths) {
    ComplexityRow row;
    row.depth = n;
    row.enumeration = std::pow(static_cast<double>(U), static_cast<double>(n));
    row.tree_search = std::pow(static_cast<double>(U * O), static_cast<double>(n));
    row.tree_overflow = !std::isfinite(row.tree_search);
    row.dpefe = planning_cost(S, U, n);
    row.cl = 0;
    if (timed && n > 0) {
      PlannerConfig cfg;
      cfg.plan_depth = n;
      cfg.parallel = false;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const EfeTable g = evaluate_efe(model, cfg);
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
        if (g.depth() != n) throw std::logic_error("unexpected EFE depth");
      }
      row.dpefe_ms = best;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string complexity_table(const std::vector<ComplexityRow>& rows) {
  std::ostringstream out;
  out << "depth,enumeration,tree_search,dpefe_ops,cl_ops,dpefe_ms\n";
  for (const auto& r : rows) {
    char en[32];
    std::snprintf(en, sizeof en, "%.6g", r.enumeration);
    std::string tree = "overflow";
    if (!r.tree_overflow) {
      char tb[32];
      std::snprintf(tb, sizeof tb, "%.6g", r.tree_search);
      tree = tb;
    }
    out << r.depth << ',' << en << ',' << tree << ',' << r.dpefe << ',' << r.cl << ','
        << fmt(r.dpefe_ms) << '\n';
  }
  return out.str();
}

}  // namespace aif
