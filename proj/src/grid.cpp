#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include "aif/environments.hpp"
#include "aif/generative_model.hpp"

namespace aif {

namespace {

constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);

std::size_t move_target(const GridSpec& spec, std::size_t state, std::size_t action) {
  const std::size_t row = state / spec.width;
  const std::size_t col = state % spec.width;
  std::size_t r = row;
  std::size_t c = col;
  switch (action) {
    case kLeft:
      if (col == 0) return state;
      c = col - 1;
      break;
    case kRight:
      if (col + 1 == spec.width) return state;
      c = col + 1;
      break;
    case kUp:
      if (row == 0) return state;
      r = row - 1;
      break;
    case kDown:
      if (row + 1 == spec.height) return state;
      r = row + 1;
      break;
    default:
      throw std::out_of_range("grid action out of range");
  }
  const std::size_t next = spec.index(r, c);
  return spec.walls[next] ? state : next;
}

// Distances from the start; kUnvisited for unreachable cells.
std::vector<std::size_t> bfs(const GridSpec& spec, std::size_t from) {
  std::vector<std::size_t> dist(spec.num_states(), kUnvisited);
  std::deque<std::size_t> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    for (std::size_t u = 0; u < kGridActions; ++u) {
      const std::size_t n = move_target(spec, s, u);
      if (dist[n] == kUnvisited) {
        dist[n] = dist[s] + 1;
        queue.push_back(n);
      }
    }
  }
  return dist;
}

}  // namespace

GridSpec GridSpec::parse(std::string_view text, std::size_t step_limit, std::string name) {
  if (step_limit == 0) throw std::invalid_argument("step_limit must be positive");
  std::vector<std::string> rows;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(line);
  }
  if (rows.empty()) throw std::invalid_argument("maze: empty grid");

  GridSpec spec;
  spec.name = std::move(name);
  spec.step_limit = step_limit;
  spec.height = rows.size();
  spec.width = rows.front().size();
  spec.walls.assign(spec.width * spec.height, false);
  bool has_start = false;
  bool has_goal = false;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != spec.width) {
      throw std::invalid_argument("maze: ragged row " + std::to_string(r + 1));
    }
    for (std::size_t c = 0; c < spec.width; ++c) {
      const std::size_t k = spec.index(r, c);
      switch (rows[r][c]) {
        case '#':
          spec.walls[k] = true;
          break;
        case '.':
          break;
        case 'S':
          if (has_start) throw std::invalid_argument("maze: more than one start");
          spec.start = k;
          has_start = true;
          break;
        case 'G':
          if (has_goal) throw std::invalid_argument("maze: more than one goal");
          spec.goal = k;
          has_goal = true;
          break;
        default:
          throw std::invalid_argument("maze: unexpected character at row " + std::to_string(r + 1) +
                                      ", column " + std::to_string(c + 1));
      }
    }
  }
  if (!has_start || !has_goal) throw std::invalid_argument("maze: missing start or goal");
  if (!shortest_path_length(spec)) throw UnsolvableMaze("maze: goal unreachable from start");
  return spec;
}

GridSpec GridSpec::load(const std::filesystem::path& path, std::size_t step_limit) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open maze file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), step_limit, path.stem().string());
}

std::optional<std::size_t> shortest_path_length(const GridSpec& spec) {
  const std::size_t d = bfs(spec, spec.start)[spec.goal];
  if (d == kUnvisited) return std::nullopt;
  return d;
}

std::vector<std::size_t> shortest_path_actions(const GridSpec& spec) {
  const auto to_goal = bfs(spec, spec.goal);  // moves are symmetric
  if (to_goal[spec.start] == kUnvisited) throw UnsolvableMaze("maze: goal unreachable from start");
  std::vector<std::size_t> actions;
  for (std::size_t s = spec.start; s != spec.goal;) {
    for (std::size_t u = 0; u < kGridActions; ++u) {
      const std::size_t n = move_target(spec, s, u);
      if (to_goal[n] + 1 == to_goal[s]) {
        actions.push_back(u);
        s = n;
        break;
      }
    }
  }
  return actions;
}

std::size_t grid_reset(const GridSpec& spec) { return spec.start; }

StepResult grid_step(const GridSpec& spec, std::size_t state, std::size_t action,
                     std::size_t steps_taken) {
  if (state >= spec.num_states()) throw std::out_of_range("grid state out of range");
  StepResult r;
  r.state = move_target(spec, state, action);
  r.goal_reached = r.state == spec.goal;
  r.horizon_hit = !r.goal_reached && steps_taken + 1 >= spec.step_limit;
  return r;
}

MazeCalibration validate_maze_calibration(const GridSpec& spec, Rng& rng, std::size_t trials,
                                          double cap_factor) {
  const auto optimal = shortest_path_length(spec);
  if (!optimal) throw UnsolvableMaze("maze: goal unreachable from start");
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  const auto cap = static_cast<std::size_t>(cap_factor * static_cast<double>(*optimal));

  MazeCalibration out;
  out.optimal = *optimal;
  out.trials = trials;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    std::size_t s = spec.start;
    std::size_t n = 0;
    while (s != spec.goal && n < cap) {
      s = move_target(spec, s, static_cast<std::size_t>(rng.uniform() * kGridActions));
      ++n;
    }
    if (s != spec.goal) ++out.capped;
    sum += static_cast<double>(n);
    sum_sq += static_cast<double>(n) * static_cast<double>(n);
  }
  const double t = static_cast<double>(trials);
  out.mean_steps = sum / t;
  const double var = trials > 1 ? (sum_sq - t * out.mean_steps * out.mean_steps) / (t - 1.0) : 0.0;
  out.stderr_steps = std::sqrt(std::max(var, 0.0) / t);
  return out;
}

Categorical GridWorld::preference() const { return goal_preference(spec_.num_states(), spec_.goal); }

std::size_t GridWorld::reset(Rng&) {
  t_ = 0;
  state_ = grid_reset(spec_);
  return state_;
}

StepResult GridWorld::step(std::size_t action) {
  const StepResult r = grid_step(spec_, state_, action, t_);
  state_ = r.state;
  ++t_;
  return r;
}

std::unique_ptr<Environment> GridWorld::clone() const { return std::make_unique<GridWorld>(spec_); }

void MutationSchedule::add(std::size_t episode, std::shared_ptr<const Environment> env) {
  if (!env) throw std::invalid_argument("mutation schedule: null environment");
  entries_.push_back({episode, std::move(env)});
}

void MutationSchedule::validate() const {
  if (entries_.empty()) throw std::invalid_argument("mutation schedule: empty");
  if (entries_.front().episode != 0) {
    throw std::invalid_argument("mutation schedule: first entry must be at episode 0");
  }
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].episode <= entries_[i - 1].episode) {
      throw std::invalid_argument("mutation schedule: episodes must be strictly increasing");
    }
    const auto& a = *entries_[i - 1].prototype;
    const auto& b = *entries_[i].prototype;
    if (a.num_states() != b.num_states() || a.num_actions() != b.num_actions()) {
      throw std::invalid_argument("mutation schedule: state or action space changes");
    }
  }
}

std::size_t MutationSchedule::active(std::size_t episode) const {
  std::size_t k = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].episode <= episode) k = i;
  }
  return k;
}

}  // namespace aif
