#include <json.hpp>
#include <stdexcept>

#include "aif/generative_model.hpp"

namespace aif {

namespace {

constexpr const char* kFormat = "aif-generative-model";
constexpr int kVersion = 1;

nlohmann::json counts_to_json(const DirichletCounts& c) {
  nlohmann::json inc = nlohmann::json::array();
  for (std::size_t col = 0; col < c.columns(); ++col) {
    for (const Peak& p : c.increments(col)) inc.push_back({col, p.index, p.mass});
  }
  return {{"outcomes", c.outcomes()}, {"columns", c.columns()}, {"prior", c.prior()},
          {"increments", std::move(inc)}};
}

DirichletCounts counts_from_json(const nlohmann::json& j) {
  DirichletCounts c(j.at("outcomes").get<std::size_t>(), j.at("columns").get<std::size_t>(),
                    j.at("prior").get<double>());
  for (const auto& e : j.at("increments")) {
    c.add(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(), e.at(2).get<double>());
  }
  return c;
}

nlohmann::json column_to_json(const SparseColumn& col) {
  nlohmann::json peaks = nlohmann::json::array();
  for (const Peak& p : col.peaks()) peaks.push_back({p.index, p.mass});
  return {{"background", col.background()}, {"peaks", std::move(peaks)}};
}

SparseColumn column_from_json(std::size_t n, const nlohmann::json& j) {
  std::vector<Peak> peaks;
  for (const auto& p : j.at("peaks")) {
    peaks.push_back({p.at(0).get<std::uint32_t>(), p.at(1).get<double>()});
  }
  return SparseColumn::from_parts(n, j.at("background").get<double>(), std::move(peaks));
}

}  // namespace

void to_json(nlohmann::json& j, const GenerativeModel& m) {
  j = nlohmann::json{{"format", kFormat},
                     {"version", kVersion},
                     {"num_states", m.states_},
                     {"num_obs", m.obs_},
                     {"num_actions", m.actions_},
                     {"horizon", m.horizon_},
                     {"likelihood_learning", m.learn_likelihood_}};
  if (m.identity_) {
    j["likelihood"] = "identity";
  } else {
    // Flattened state-major: entry [s * num_obs + o] = A(o | s).
    std::vector<double> flat;
    flat.reserve(m.states_ * m.obs_);
    for (const auto& col : m.likelihood_) {
      for (std::size_t o = 0; o < m.obs_; ++o) flat.push_back(col.prob(o));
    }
    j["likelihood"] = std::move(flat);
  }
  j["preference"] = std::vector<double>(m.preference_.probs().begin(), m.preference_.probs().end());
  j["state_prior"] =
      std::vector<double>(m.state_prior_.probs().begin(), m.state_prior_.probs().end());
  j["action_prior"] =
      std::vector<double>(m.action_prior_.probs().begin(), m.action_prior_.probs().end());
  j["transition_counts"] = counts_to_json(m.b_counts_);
  j["likelihood_counts"] = counts_to_json(m.a_counts_);
  nlohmann::json overrides = nlohmann::json::array();
  for (std::size_t col = 0; col < m.transitions_.size(); ++col) {
    if (!(m.transitions_[col] == m.b_counts_.normalized(col))) {
      auto entry = column_to_json(m.transitions_[col]);
      entry["column"] = col;
      overrides.push_back(std::move(entry));
    }
  }
  j["transition_overrides"] = std::move(overrides);
}

void from_json(const nlohmann::json& j, GenerativeModel& m) {
  if (j.at("format").get<std::string>() != kFormat) {
    throw std::invalid_argument("not a generative model document");
  }
  if (j.at("version").get<int>() != kVersion) {
    throw std::invalid_argument("unsupported model document version");
  }
  const auto states = j.at("num_states").get<std::size_t>();
  const auto obs = j.at("num_obs").get<std::size_t>();
  const auto actions = j.at("num_actions").get<std::size_t>();
  const auto horizon = j.at("horizon").get<std::size_t>();
  const auto& lik = j.at("likelihood");
  const auto b = counts_from_json(j.at("transition_counts"));
  if (lik.is_string()) {
    if (lik.get<std::string>() != "identity" || obs != states) {
      throw std::invalid_argument("bad likelihood field");
    }
    m = GenerativeModel::fully_observable(states, actions, horizon, b.prior());
  } else {
    const auto flat = lik.get<std::vector<double>>();
    if (flat.size() != states * obs) throw std::invalid_argument("likelihood size mismatch");
    std::vector<Categorical> cols;
    for (std::size_t s = 0; s < states; ++s) {
      cols.push_back(Categorical::from_weights(
          std::vector<double>(flat.begin() + s * obs, flat.begin() + (s + 1) * obs)));
    }
    m = GenerativeModel::with_likelihood(std::move(cols), actions, horizon, b.prior());
  }
  if (b.outcomes() != states || b.columns() != states * actions) {
    throw std::invalid_argument("transition counts shape mismatch");
  }
  m.b_counts_ = b;
  for (std::size_t col = 0; col < m.transitions_.size(); ++col) {
    m.transitions_[col] = m.b_counts_.normalized(col);
  }
  for (const auto& o : j.at("transition_overrides")) {
    const auto col = o.at("column").get<std::size_t>();
    if (col >= m.transitions_.size()) throw std::invalid_argument("override column out of range");
    m.transitions_[col] = column_from_json(states, o);
  }
  m.a_counts_ = counts_from_json(j.at("likelihood_counts"));
  m.learn_likelihood_ = j.at("likelihood_learning").get<bool>();
  m.preference_ = Categorical::from_probs(j.at("preference").get<std::vector<double>>());
  m.state_prior_ = Categorical::from_probs(j.at("state_prior").get<std::vector<double>>());
  m.action_prior_ = Categorical::from_probs(j.at("action_prior").get<std::vector<double>>());
  if (m.preference_.size() != obs || m.state_prior_.size() != states ||
      m.action_prior_.size() != actions) {
    throw std::invalid_argument("prior vector size mismatch");
  }
}

}  // namespace aif
