#pragma once

// Brute-force reference implementations used to check the optimized code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "evoforge/engine.hpp"

namespace oracle {

using evoforge::engine::Candidate;

/// Indices of `sample` that may win a tournament over exactly that sample.
inline std::set<std::size_t> tournament_winners(const std::vector<Candidate>& sample) {
  std::vector<std::size_t> pool(sample.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  auto keep = [&](auto better) {
    std::vector<std::size_t> next;
    for (std::size_t i : pool) {
      bool beaten = false;
      for (std::size_t j : pool) beaten = beaten || better(sample[j], sample[i]);
      if (!beaten) next.push_back(i);
    }
    pool = next;
  };
  keep([](const Candidate& a, const Candidate& b) { return a.score > b.score; });
  keep([](const Candidate& a, const Candidate& b) { return a.eval_count < b.eval_count; });
  keep([](const Candidate& a, const Candidate& b) {
    return a.created_at_iteration > b.created_at_iteration;
  });
  return {pool.begin(), pool.end()};
}

/// Exact probability that each member wins a size-k tournament: average
/// over all k-subsets, ties split evenly.
inline std::vector<double> tournament_distribution(const std::vector<Candidate>& members,
                                                   std::size_t k) {
  const std::size_t n = members.size();
  std::vector<double> p(n, 0.0);
  std::size_t subsets = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    ++subsets;
    std::vector<Candidate> sample;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        sample.push_back(members[i]);
        index.push_back(i);
      }
    }
    const auto winners = tournament_winners(sample);
    for (std::size_t w : winners) p[index[w]] += 1.0 / static_cast<double>(winners.size());
  }
  for (double& x : p) x /= static_cast<double>(subsets);
  return p;
}

/// Member to delete: minimum score among members with >= min_evals votes
/// (everyone when nobody qualifies), then oldest, then first listed.
inline std::size_t removal(const std::vector<Candidate>& members, std::size_t min_evals) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i].eval_count >= min_evals) eligible.push_back(i);
  }
  if (eligible.empty()) {
    for (std::size_t i = 0; i < members.size(); ++i) eligible.push_back(i);
  }
  std::size_t best = eligible.front();
  for (std::size_t i : eligible) {
    const Candidate& a = members[i];
    const Candidate& b = members[best];
    if (a.score < b.score ||
        (a.score == b.score && a.created_at_iteration < b.created_at_iteration)) {
      best = i;
    }
  }
  return best;
}

/// Trailing mean recomputed from scratch for every index.
inline std::vector<double> trailing_mean(const std::vector<double>& raw, std::size_t window) {
  std::vector<double> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::size_t from = i + 1 >= window ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t j = from; j <= i; ++j) sum += raw[j];
    out.push_back(sum / static_cast<double>(i - from + 1));
  }
  return out;
}

/// Mean +- z standard deviations of Binomial(n, p).
struct Band {
  double lo;
  double hi;
};
inline Band binomial_band(std::size_t n, double p, double z) {
  const double mean = static_cast<double>(n) * p;
  const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  return {mean - z * sd, mean + z * sd};
}

}  // namespace oracle
