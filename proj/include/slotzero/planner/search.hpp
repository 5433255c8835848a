#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "slotzero/model/gnn.hpp"
#include "slotzero/planner/candidates.hpp"
#include "slotzero/planner/halving.hpp"
#include "slotzero/planner/policy.hpp"
#include "slotzero/planner/value.hpp"

namespace sz::planner {

/// Thrown when the model faults mid-search; carries the partial trajectory that hit it.
class SearchFault : public std::runtime_error {
 public:
  SearchFault(const std::string& what, TrajectoryRecord context)
      : std::runtime_error(what), context_(std::move(context)) {}
  const TrajectoryRecord& context() const { return context_; }

 private:
  TrajectoryRecord context_;
};

template <class Latent>
struct SearchNode {
  Latent latent;
  double reward = 0.0;      // predicted reward on the incoming edge
  double prediction = 0.0;  // value head at this node
  double value_sum = 0.0;
  int visits = 0;
  int depth = 0;
  std::vector<ModelAction> actions;
  std::vector<double> logits;
  std::vector<int> children;  // node index per action, -1 while unexpanded

  double value() const { return visits > 0 ? value_sum / visits : prediction; }
};

template <SearchModel Model>
class SearchTree {
 public:
  using Latent = typename Model::Latent;
  using Node = SearchNode<Latent>;

  SearchTree(const Model& model, const PlannerConfig& config, std::uint64_t seed)
      : model_(model), config_(config), rng_(seed) {}

  /// Evaluates the root and draws the root candidates.
  void init_root(Latent latent, bool add_noise) {
    nodes_.clear();
    log_.clear();
    bounds_ = MinMax{};
    const NodePrediction pred = model_.evaluate(latent);
    Node root;
    root.latent = std::move(latent);
    root.prediction = pred.value;
    root.value_sum = pred.value;
    root.visits = 1;
    if (config_.continuous) {
      candidates_ = gumbel_root_candidates(pred.gaussian, config_.num_candidates, config_.beta,
                                           rng_, add_noise);
    } else {
      candidates_ = gumbel_root_candidates(pred.logits, config_.num_candidates, rng_, add_noise);
    }
    root.actions = candidates_.actions;
    root.logits = candidates_.logits;
    root.children.assign(root.actions.size(), -1);
    nodes_.push_back(std::move(root));
  }

  /// One simulation through root action `candidate`.
  const TrajectoryRecord& simulate_once(int candidate) {
    if (candidate < 0 || candidate >= static_cast<int>(nodes_[0].actions.size())) {
      throw std::out_of_range("simulate_once: candidate out of range");
    }
    TrajectoryRecord record;
    record.candidate = candidate;
    std::vector<int> path{0};
    int action = candidate;
    int leaf = -1;
    try {
      while (true) {
        const int parent = path.back();
        const int child = nodes_[parent].children[action];
        if (child < 0) {
          leaf = expand(parent, action);
          path.push_back(leaf);
          record.rewards.push_back(nodes_[leaf].reward);
          break;
        }
        path.push_back(child);
        record.rewards.push_back(nodes_[child].reward);
        if (nodes_[child].depth >= config_.depth_cap || nodes_[child].actions.empty()) {
          leaf = child;
          break;
        }
        action = select(child);
      }
    } catch (const model::NumericFault& fault) {
      record.depth = static_cast<int>(record.rewards.size());
      throw SearchFault(std::string("search: ") + fault.what() + " at depth " +
                            std::to_string(record.depth) + " via root action " +
                            std::to_string(candidate),
                        record);
    }
    record.leaf_value = nodes_[leaf].prediction;
    record.depth = static_cast<int>(record.rewards.size());
    backup(path, record.leaf_value);
    log_.push_back(record);
    return log_.back();
  }

  /// Q(root, a) = r(a) + gamma * V(child), or the root value where unvisited.
  double root_q(int a) const { return edge_q(0, a); }
  int root_visits(int a) const {
    const int c = nodes_[0].children[a];
    return c < 0 ? 0 : nodes_[c].visits;
  }

  /// Ranks survivors by Q, then Gumbel score, then index.
  void rank(std::vector<int>& ids) const {
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
      const double qa = root_q(a), qb = root_q(b);
      if (qa != qb) return qa > qb;
      const double sa = candidates_.score(a), sb = candidates_.score(b);
      if (sa != sb) return sa > sb;
      return a < b;
    });
  }

  const Node& node(int i) const { return nodes_[i]; }
  const Node& root() const { return nodes_[0]; }
  std::size_t size() const { return nodes_.size(); }
  const CandidateSet& candidates() const { return candidates_; }
  const std::vector<TrajectoryRecord>& log() const { return log_; }
  const MinMax& bounds() const { return bounds_; }
  const PlannerConfig& config() const { return config_; }

  /// Per-root-action visits and completed Q.
  std::vector<int> root_visit_counts() const {
    std::vector<int> v(nodes_[0].actions.size());
    for (std::size_t a = 0; a < v.size(); ++a) v[a] = root_visits(static_cast<int>(a));
    return v;
  }
  std::vector<double> root_q_values() const {
    std::vector<double> q(nodes_[0].actions.size());
    for (std::size_t a = 0; a < q.size(); ++a) q[a] = root_q(static_cast<int>(a));
    return q;
  }

 private:
  double edge_q(int parent, int a) const {
    const int c = nodes_[parent].children[a];
    if (c < 0) return nodes_[parent].value();
    return nodes_[c].reward + config_.gamma * nodes_[c].value();
  }

  int select(int n) {
    const Node& node = nodes_[n];
    std::vector<int> visits(node.actions.size());
    std::vector<double> q(node.actions.size());
    for (std::size_t a = 0; a < visits.size(); ++a) {
      const int c = node.children[a];
      visits[a] = c < 0 ? 0 : nodes_[c].visits;
      q[a] = edge_q(n, static_cast<int>(a));
    }
    return select_interior(node.logits, visits, q, node.value(), bounds_, config_);
  }

  int expand(int parent, int action) {
    Latent next = model_.transition(nodes_[parent].latent, nodes_[parent].actions[action]);
    const NodePrediction pred = model_.evaluate(next);
    Node child;
    child.latent = std::move(next);
    child.reward = pred.reward;
    child.prediction = pred.value;
    child.depth = nodes_[parent].depth + 1;
    if (child.depth < config_.depth_cap) {
      if (config_.continuous) {
        child.actions = sample_mixture_actions(pred.gaussian, config_.num_candidates, config_.beta,
                                               rng_);
        child.logits.assign(child.actions.size(), 0.0);
      } else {
        child.logits = pred.logits;
        for (std::size_t a = 0; a < pred.logits.size(); ++a) {
          child.actions.emplace_back(static_cast<int>(a));
        }
      }
      child.children.assign(child.actions.size(), -1);
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(child));
    nodes_[parent].children[action] = id;
    return id;
  }

  void backup(const std::vector<int>& path, double leaf_value) {
    double g = leaf_value;
    for (std::size_t i = path.size(); i-- > 0;) {
      Node& node = nodes_[path[i]];
      node.value_sum += g;
      node.visits += 1;
      if (i > 0) {
        g = node.reward + config_.gamma * g;
        bounds_.update(node.reward + config_.gamma * node.value());
      }
    }
  }

  const Model& model_;
  PlannerConfig config_;
  std::mt19937_64 rng_;
  std::vector<Node> nodes_;
  CandidateSet candidates_;
  MinMax bounds_;
  std::vector<TrajectoryRecord> log_;
};

/// Runs Sequential Halving over the root candidates of an initialised tree.
template <SearchModel Model>
SearchResult sequential_halving(SearchTree<Model>& tree) {
  const PlannerConfig& config = tree.config();
  std::vector<int> alive = tree.candidates().ids;
  const HalvingPlan plan = plan_halving(static_cast<int>(alive.size()), config.simulations);
  for (int p = 0; p < plan.phases(); ++p) {
    const auto share = allocate_phase(static_cast<int>(alive.size()), plan.phase_budget[p]);
    const int rounds = share.empty() ? 0 : share.front();
    for (int r = 0; r < rounds; ++r) {
      for (std::size_t i = 0; i < alive.size(); ++i) {
        if (share[i] > r) tree.simulate_once(alive[i]);
      }
    }
    tree.rank(alive);
    if (p + 1 < plan.phases()) alive.resize(static_cast<std::size_t>(survivors_after(static_cast<int>(alive.size()))));
  }

  SearchResult result;
  const auto& root = tree.root();
  result.root_actions = root.actions;
  result.visits = tree.root_visit_counts();
  result.q = tree.root_q_values();
  result.policy = make_target_policy(root.logits, result.visits, result.q, root.value(),
                                     tree.bounds(), config);
  result.trajectories = tree.log();
  result.value = search_value_estimate(result.trajectories, config.gamma);
  result.root_value = root.value();
  result.root_prediction = root.prediction;
  result.chosen = alive.front();
  result.chosen_action = root.actions[static_cast<std::size_t>(result.chosen)];
  return result;
}

/// Full search from a latent: root evaluation, candidate draw, Sequential Halving.
template <SearchModel Model>
SearchResult run_search(const Model& model, typename Model::Latent root, const PlannerConfig& config,
                        std::uint64_t seed, bool add_noise = true) {
  validate(config);
  SearchTree<Model> tree(model, config, seed);
  tree.init_root(std::move(root), add_noise);
  return sequential_halving(tree);
}

}  // namespace sz::planner
