#pragma once

// Fits soft-constraint weights to pairwise preferences. A chart's cost is
// w . x over its violation counts x, and the better chart should cost less by
// at least the margin.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "draco/error.hpp"
#include "draco/facts.hpp"
#include "draco/solver.hpp"

namespace draco {

struct LearnConfig {
  int epochs = 200;
  double learning_rate = 0.01;
  double margin = 1.0;
  double l2 = 0.001;
  std::uint64_t seed = 0;
  bool full_batch = false;  // one averaged step per epoch instead of one per pair
  bool average = true;      // return the mean of the later half of the epochs
};

struct PreferencePair {
  std::vector<double> better;
  std::vector<double> worse;
};

struct LearnResult {
  std::vector<double> weights;
  std::vector<double> loss;  // objective of the running iterate after each epoch
  std::vector<std::string> warnings;
};

namespace detail {

inline double dot(const std::vector<double>& w, const std::vector<double>& x) {
  return std::inner_product(w.begin(), w.end(), x.begin(), 0.0);
}

inline void check_dims(const std::vector<PreferencePair>& pairs, std::size_t dim) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].better.size() != dim || pairs[i].worse.size() != dim) {
      throw LearnError("pair " + std::to_string(i) + " has " + std::to_string(pairs[i].better.size()) + " and " +
                       std::to_string(pairs[i].worse.size()) + " features, expected " + std::to_string(dim));
    }
  }
}

}  // namespace detail

// Mean hinge loss plus the L2 penalty.
inline double objective(const std::vector<double>& w, const std::vector<PreferencePair>& pairs,
                        const LearnConfig& config = {}) {
  detail::check_dims(pairs, w.size());
  double loss = 0;
  for (const auto& p : pairs) {
    loss += std::max(0.0, config.margin - (detail::dot(w, p.worse) - detail::dot(w, p.better)));
  }
  if (!pairs.empty()) loss /= static_cast<double>(pairs.size());
  return loss + 0.5 * config.l2 * detail::dot(w, w);
}

// Share of pairs where the better chart costs less. A tie counts half.
inline double pair_accuracy(const std::vector<double>& w, const std::vector<PreferencePair>& pairs) {
  detail::check_dims(pairs, w.size());
  if (pairs.empty()) return 0;
  double right = 0;
  for (const auto& p : pairs) {
    double b = detail::dot(w, p.better), c = detail::dot(w, p.worse);
    right += b < c ? 1.0 : b == c ? 0.5 : 0.0;
  }
  return right / static_cast<double>(pairs.size());
}

// Projected subgradient descent; weights stay non-negative. Averaging the late
// iterates steadies the result on small pair sets. Pairs whose two
// sides are identical carry no signal and are skipped with a warning.
inline LearnResult learn_weights(const std::vector<PreferencePair>& pairs, std::size_t dim, const LearnConfig& config = {},
                                 std::vector<double> initial = {}) {
  if (config.epochs < 0 || !(config.learning_rate > 0) || config.l2 < 0) {
    throw LearnError("epochs must be >= 0, learning rate > 0 and l2 >= 0");
  }
  detail::check_dims(pairs, dim);
  LearnResult out;
  if (initial.empty()) initial.assign(dim, 0.0);
  if (initial.size() != dim) throw LearnError("initial weights have the wrong dimension");
  std::vector<double>& w = out.weights = std::move(initial);

  std::vector<PreferencePair> usable;
  std::vector<std::vector<double>> diff;  // worse - better
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].better == pairs[i].worse) {
      out.warnings.push_back("pair " + std::to_string(i) + " has identical violation counts and is ignored");
      continue;
    }
    usable.push_back(pairs[i]);
    std::vector<double> d(dim);
    for (std::size_t j = 0; j < dim; ++j) d[j] = pairs[i].worse[j] - pairs[i].better[j];
    diff.push_back(std::move(d));
  }
  if (usable.empty()) {
    out.warnings.push_back("no usable pairs; weights left unchanged");
    return out;
  }

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(usable.size());
  std::iota(order.begin(), order.end(), 0);
  auto project = [&] {
    for (auto& x : w) x = std::max(0.0, x);
  };
  std::vector<double> sum(dim, 0.0);
  std::size_t summed = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.full_batch) {
      std::vector<double> grad(dim, 0.0);
      for (const auto& d : diff) {
        if (config.margin - detail::dot(w, d) > 0) {
          for (std::size_t j = 0; j < dim; ++j) grad[j] -= d[j];
        }
      }
      for (std::size_t j = 0; j < dim; ++j) {
        w[j] -= config.learning_rate * (grad[j] / static_cast<double>(diff.size()) + config.l2 * w[j]);
      }
      project();
    } else {
      std::shuffle(order.begin(), order.end(), rng);
      for (auto i : order) {
        const auto& d = diff[i];
        bool active = config.margin - detail::dot(w, d) > 0;
        for (std::size_t j = 0; j < dim; ++j) w[j] -= config.learning_rate * ((active ? -d[j] : 0.0) + config.l2 * w[j]);
        project();
      }
    }
    if (epoch >= config.epochs / 2) {
      for (std::size_t j = 0; j < dim; ++j) sum[j] += w[j];
      ++summed;
    }
    out.loss.push_back(objective(w, usable, config));
  }
  if (config.average && summed > 0) {
    for (std::size_t j = 0; j < dim; ++j) w[j] = sum[j] / static_cast<double>(summed);
  }
  return out;
}

// Integer weights for the KB: round(w * 100).
inline Weights export_weights(const std::vector<std::string>& names, const std::vector<double>& w) {
  if (names.size() != w.size()) throw LearnError("names and weights differ in length");
  Weights out;
  for (std::size_t j = 0; j < w.size(); ++j) out[names[j]] = std::llround(w[j] * 100.0);
  return out;
}

// Feature vector of a chart: soft violation counts in `names` order.
inline std::vector<double> violation_vector(const KnowledgeBase& kb, const Facts& facts,
                                            const std::vector<std::string>& names) {
  Violations v = count_violations(kb, facts);
  std::vector<double> x;
  for (const auto& n : names) {
    auto it = v.find(n);
    if (it == v.end()) throw LearnError("unknown soft constraint '" + n + "'");
    x.push_back(static_cast<double>(it->second));
  }
  return x;
}

// Named soft constraints of the KB, the feature order used throughout.
inline std::vector<std::string> feature_names(const KnowledgeBase& kb) {
  std::vector<std::string> out;
  for (const auto& n : kb.soft_names()) {
    if (!n.empty()) out.push_back(n);
  }
  return out;
}

// Either {"pairs": [...]} or a bare array. Each side is a chart spec object or
// an array of violation counts.
inline std::vector<PreferencePair> pairs_from_json(const nlohmann::json& j, const KnowledgeBase& kb) {
  const nlohmann::json* list = &j;
  if (j.is_object()) {
    if (!j.contains("pairs")) throw LearnError("expected a \"pairs\" array");
    list = &j.at("pairs");
  }
  if (!list->is_array()) throw LearnError("pairs must be an array");
  auto names = feature_names(kb);
  auto side = [&](const nlohmann::json& p, const char* key, std::size_t i) {
    if (!p.is_object() || !p.contains(key)) throw LearnError("pair " + std::to_string(i) + " lacks \"" + key + "\"");
    const auto& s = p.at(key);
    if (s.is_array()) {
      std::vector<double> x;
      for (const auto& v : s) {
        if (!v.is_number()) throw LearnError("pair " + std::to_string(i) + ": counts must be numbers");
        x.push_back(v.get<double>());
      }
      return x;
    }
    try {
      return violation_vector(kb, flatten_spec(spec_from_json(s)), names);
    } catch (const IncompleteSpecError& e) {
      throw LearnError("pair " + std::to_string(i) + " " + key + ": incomplete spec: " + e.what());
    }
  };
  std::vector<PreferencePair> out;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const auto& p = (*list)[i];
    out.push_back({side(p, "better", i), side(p, "worse", i)});
  }
  return out;
}

}  // namespace draco
