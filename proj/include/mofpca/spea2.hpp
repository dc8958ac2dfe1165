#pragma once

/// @file spea2.hpp
/// @brief SPEA2 search over size-r subsets of principal components.
///
/// Genome: a ComponentSelection. Each generation the population and the
/// external archive are pooled, every member gets a SPEA2 fitness (strength,
/// raw fitness, k-th nearest neighbour density), the best members form the
/// next archive, a binary tournament on the archive picks parents, and
/// crossover/mutation produce the next population. Both operators keep
/// genomes feasible: r distinct indices in [0, d).
///
/// Fitness details fixed by this implementation:
///  - objective space is min-max normalized over the current pool for every
///    distance computation; an objective with zero range contributes 0;
///  - density D(i) = 1 / (sigma_i^k + 2) with k = round(sqrt(P + E));
///  - archive truncation repeatedly drops the member closest to its nearest
///    neighbour (ties: second nearest, then the lexicographically larger
///    genome);
///  - round() is half-away-from-zero.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dominance.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "pca_core.hpp"
#include "rng.hpp"

namespace mofpca {

enum class DatasetKind { tabular, image };

struct Spea2Config {
  int population_size = 2;
  int archive_size = 1;
  int generations = 30;
  double crossover_rate = 50.0;  // percent of offspring made by crossover
  std::uint64_t seed = 0;
  int r = 1;
  int d = 1;
  int mutation_swaps = 1;  // indices replaced per mutation

  void validate() const {
    if (population_size < 2) throw ConfigError("population_size must be >= 2");
    if (archive_size < 1) throw ConfigError("archive_size must be >= 1");
    if (generations < 1) throw ConfigError("generations must be >= 1");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 100.0))
      throw ConfigError("crossover_rate must be within [0, 100]");
    if (d < 1) throw ConfigError("basis dimension d must be >= 1");
    if (r < 1 || r > d)
      throw ConfigError("r = " + std::to_string(r) + " outside 1.." + std::to_string(d));
    if (mutation_swaps < 1) throw ConfigError("mutation_swaps must be >= 1");
  }
};

inline long round_half_away(double x) { return std::lround(x); }

/// Population min(100, round(C(d,r)/2)) (at least 2), archive round(P/2)
/// (at least 1), crossover 50%, 30 generations for tabular data and 50 for
/// image data.
inline Spea2Config default_config(int d, int r, DatasetKind kind = DatasetKind::tabular) {
  if (r < 1 || r > d) throw ConfigError("r = " + std::to_string(r) + " outside 1.." + std::to_string(d));
  const double half = 0.5 * static_cast<double>(binomial(d, r));
  Spea2Config cfg;
  cfg.population_size = static_cast<int>(std::max(2L, half >= 100.0 ? 100L : round_half_away(half)));
  cfg.archive_size = static_cast<int>(std::max(1L, round_half_away(cfg.population_size / 2.0)));
  cfg.crossover_rate = 50.0;
  cfg.generations = kind == DatasetKind::image ? 50 : 30;
  cfg.r = r;
  cfg.d = d;
  return cfg;
}

inline int density_k(const Spea2Config& cfg) {
  return static_cast<int>(round_half_away(std::sqrt(double(cfg.population_size + cfg.archive_size))));
}

struct EvaluatedIndividual {
  ComponentSelection selection;
  ObjectiveVector objectives;
  int strength = 0;
  double raw_fitness = 0.0;
  double density = 0.0;
  double fitness = 0.0;
};

namespace detail {

// Pool coordinates after per-objective min-max normalization.
template <typename Item, typename Get>
std::vector<std::pair<double, double>> normalized_objectives(const std::vector<Item>& items, Get get) {
  double lo0 = std::numeric_limits<double>::infinity(), hi0 = -lo0;
  double lo1 = lo0, hi1 = -lo0;
  for (const auto& it : items) {
    const ObjectiveVector& o = get(it);
    lo0 = std::min(lo0, o.recon_error);
    hi0 = std::max(hi0, o.recon_error);
    lo1 = std::min(lo1, o.fairness);
    hi1 = std::max(hi1, o.fairness);
  }
  const double span0 = hi0 - lo0, span1 = hi1 - lo1;
  std::vector<std::pair<double, double>> out;
  out.reserve(items.size());
  for (const auto& it : items) {
    const ObjectiveVector& o = get(it);
    out.emplace_back(span0 > 0 ? (o.recon_error - lo0) / span0 : 0.0,
                     span1 > 0 ? (o.fairness - lo1) / span1 : 0.0);
  }
  return out;
}

inline double distance(const std::pair<double, double>& a, const std::pair<double, double>& b) {
  return std::hypot(a.first - b.first, a.second - b.second);
}

// Partial Fisher-Yates: `count` distinct items of `items`, in draw order.
inline std::vector<int> sample_without_replacement(std::vector<int> items, std::size_t count, Rng& rng) {
  count = std::min(count, items.size());
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(items.size() - i);
    std::swap(items[i], items[j]);
  }
  items.resize(count);
  return items;
}

inline std::vector<int> iota_vector(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

inline void audit(const ComponentSelection& sel, int r, int d) {
  if (sel.size() != r) throw std::logic_error("infeasible individual: wrong size");
  sel.validate(d);
}

}  // namespace detail

/// P distinct uniformly drawn r-subsets, or every subset (in lexicographic
/// order) when there are at most P of them.
inline std::vector<ComponentSelection> initialize_population(const Spea2Config& cfg, Rng& rng) {
  cfg.validate();
  const std::uint64_t total = binomial(cfg.d, cfg.r);
  std::vector<ComponentSelection> population;
  if (total <= static_cast<std::uint64_t>(cfg.population_size)) {
    std::vector<int> idx = detail::iota_vector(cfg.r);
    do population.emplace_back(idx);
    while (next_combination(idx, cfg.d));
    return population;
  }
  std::set<ComponentSelection> seen;
  const std::vector<int> all = detail::iota_vector(cfg.d);
  while (population.size() < static_cast<std::size_t>(cfg.population_size)) {
    ComponentSelection sel(detail::sample_without_replacement(all, static_cast<std::size_t>(cfg.r), rng));
    if (seen.insert(sel).second) population.push_back(std::move(sel));
  }
  return population;
}

/// SPEA2 fitness of every pool member; `k` is the neighbour rank used for density.
inline std::vector<EvaluatedIndividual> assign_fitness(const std::vector<FrontRecord>& pool, int k) {
  if (pool.empty()) throw InputError("cannot assign fitness to an empty pool");
  const std::size_t n = pool.size();
  std::vector<EvaluatedIndividual> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].selection = pool[i].selection;
    out[i].objectives = pool[i].objectives;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && dominates(pool[i].objectives, pool[j].objectives)) ++out[i].strength;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && dominates(pool[j].objectives, pool[i].objectives)) out[i].raw_fitness += out[j].strength;

  const auto coords = detail::normalized_objectives(pool, [](const FrontRecord& r) -> const ObjectiveVector& {
    return r.objectives;
  });
  std::vector<double> dist;
  for (std::size_t i = 0; i < n; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) dist.push_back(detail::distance(coords[i], coords[j]));
    double sigma = 0.0;
    if (!dist.empty()) {
      const std::size_t kk = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(k, 1)), 1, dist.size());
      std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk - 1), dist.end());
      sigma = dist[kk - 1];
    }
    out[i].density = 1.0 / (sigma + 2.0);
    out[i].fitness = out[i].raw_fitness + out[i].density;
  }
  return out;
}

/// Next archive of at most `archive_size` members (see file comment).
inline std::vector<EvaluatedIndividual> environmental_selection(const std::vector<EvaluatedIndividual>& pool,
                                                                int archive_size) {
  if (pool.empty()) throw InputError("cannot select from an empty pool");
  if (archive_size < 1) throw ConfigError("archive_size must be >= 1");
  const std::size_t cap = static_cast<std::size_t>(archive_size);

  std::vector<std::size_t> nondominated;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (pool[i].fitness < 1.0) nondominated.push_back(i);

  if (nondominated.size() <= cap) {
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(pool[a].fitness, pool[a].selection) < std::tie(pool[b].fitness, pool[b].selection);
    });
    order.resize(std::min(cap, order.size()));
    std::vector<EvaluatedIndividual> archive;
    for (std::size_t i : order) archive.push_back(pool[i]);
    return archive;
  }

  const auto coords = detail::normalized_objectives(pool, [](const EvaluatedIndividual& e) -> const ObjectiveVector& {
    return e.objectives;
  });
  const std::size_t m = nondominated.size();
  std::vector<double> dist(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      dist[a * m + b] = dist[b * m + a] = detail::distance(coords[nondominated[a]], coords[nondominated[b]]);

  std::vector<bool> alive(m, true);
  std::size_t alive_count = m;
  constexpr double inf = std::numeric_limits<double>::infinity();
  while (alive_count > cap) {
    std::size_t victim = m;
    double v1 = inf, v2 = inf;
    for (std::size_t a = 0; a < m; ++a) {
      if (!alive[a]) continue;
      double d1 = inf, d2 = inf;
      for (std::size_t b = 0; b < m; ++b) {
        if (b == a || !alive[b]) continue;
        const double x = dist[a * m + b];
        if (x < d1) {
          d2 = d1;
          d1 = x;
        } else if (x < d2) {
          d2 = x;
        }
      }
      bool worse = victim == m || d1 < v1 || (d1 == v1 && d2 < v2);
      if (!worse && d1 == v1 && d2 == v2)
        worse = pool[nondominated[victim]].selection <= pool[nondominated[a]].selection;
      if (worse) {
        victim = a;
        v1 = d1;
        v2 = d2;
      }
    }
    alive[victim] = false;
    --alive_count;
  }
  std::vector<EvaluatedIndividual> archive;
  for (std::size_t a = 0; a < m; ++a)
    if (alive[a]) archive.push_back(pool[nondominated[a]]);
  return archive;
}

/// `count` parents, each the fitter of two archive members drawn with
/// replacement; equal fitness is settled by a coin flip.
inline std::vector<ComponentSelection> binary_tournament(const std::vector<EvaluatedIndividual>& archive, Rng& rng,
                                                         int count) {
  if (archive.empty()) throw InputError("binary tournament needs a non-empty archive");
  std::vector<ComponentSelection> mating;
  mating.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    const std::size_t a = rng.below(archive.size());
    const std::size_t b = rng.below(archive.size());
    std::size_t winner = a;
    if (archive[b].fitness < archive[a].fitness) winner = b;
    else if (archive[b].fitness == archive[a].fitness && rng.coin()) winner = b;
    mating.push_back(archive[winner].selection);
  }
  return mating;
}

/// Child keeps the parents' common indices and fills the remaining slots
/// uniformly from the indices found in exactly one parent.
inline ComponentSelection crossover(const ComponentSelection& parent1, const ComponentSelection& parent2, Rng& rng) {
  if (parent1.size() != parent2.size()) throw InputError("crossover parents differ in size");
  std::vector<int> common, exclusive;
  std::set_intersection(parent1.indices().begin(), parent1.indices().end(), parent2.indices().begin(),
                        parent2.indices().end(), std::back_inserter(common));
  std::set_symmetric_difference(parent1.indices().begin(), parent1.indices().end(), parent2.indices().begin(),
                                parent2.indices().end(), std::back_inserter(exclusive));
  const std::size_t missing = static_cast<std::size_t>(parent1.size()) - common.size();
  for (int i : detail::sample_without_replacement(std::move(exclusive), missing, rng)) common.push_back(i);
  return ComponentSelection(std::move(common));
}

/// Replaces `swaps` (default one) uniformly chosen indices by indices not in
/// the selection. Returns the parent unchanged when r == d.
inline ComponentSelection mutate(const ComponentSelection& parent, Rng& rng, int d, int swaps = 1) {
  parent.validate(d);
  const int r = parent.size();
  if (r == d) return parent;
  std::vector<int> outside;
  for (int i = 0; i < d; ++i)
    if (!parent.contains(i)) outside.push_back(i);
  const std::size_t s = static_cast<std::size_t>(std::min({std::max(swaps, 1), r, d - r}));
  const auto positions = detail::sample_without_replacement(detail::iota_vector(r), s, rng);
  const auto incoming = detail::sample_without_replacement(std::move(outside), s, rng);
  std::vector<int> child = parent.indices();
  for (std::size_t i = 0; i < s; ++i) child[static_cast<std::size_t>(positions[i])] = incoming[i];
  return ComponentSelection(std::move(child));
}

struct GenerationLog {
  int generation = 0;
  std::size_t archive_size = 0;
  double best_recon_error = 0.0;
  double best_fairness = 0.0;
  // Sum over both objectives of (archive range / pool range).
  double spread = 0.0;
};

struct Spea2Result {
  std::vector<FrontRecord> front;  // non-dominated, deduplicated, ascending recon_error
  std::vector<GenerationLog> log;
  std::size_t evaluations = 0;
};

/// Runs G generations and returns the non-dominated members of the final
/// archive. Objective evaluation is spread over `workers` threads; the random
/// sequence is consumed only by the sequential generation loop.
inline Spea2Result run(const PrincipalBasis& basis, const Spea2Config& cfg, std::size_t workers = 1) {
  cfg.validate();
  if (cfg.d != basis.dim())
    throw ConfigError("config d = " + std::to_string(cfg.d) + " does not match basis d = " +
                      std::to_string(basis.dim()));
  Rng rng(cfg.seed);
  const int k = density_k(cfg);
  const std::size_t pop_size = static_cast<std::size_t>(cfg.population_size);

  std::vector<ComponentSelection> population = initialize_population(cfg, rng);
  std::vector<EvaluatedIndividual> archive;
  Spea2Result result;

  for (int g = 1; g <= cfg.generations; ++g) {
    std::vector<ObjectiveVector> objectives(population.size());
    parallel_for(population.size(), workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) objectives[i] = evaluate(basis, population[i]);
    });
    result.evaluations += population.size();

    std::vector<FrontRecord> pool;
    pool.reserve(population.size() + archive.size());
    for (std::size_t i = 0; i < population.size(); ++i) pool.push_back({std::move(population[i]), objectives[i]});
    for (auto& member : archive) pool.push_back({std::move(member.selection), member.objectives});

    archive = environmental_selection(assign_fitness(pool, k), cfg.archive_size);

    GenerationLog entry;
    entry.generation = g;
    entry.archive_size = archive.size();
    entry.best_recon_error = std::numeric_limits<double>::infinity();
    entry.best_fairness = std::numeric_limits<double>::infinity();
    double a_lo[2] = {entry.best_recon_error, entry.best_fairness}, a_hi[2] = {-a_lo[0], -a_lo[1]};
    double p_lo[2] = {a_lo[0], a_lo[1]}, p_hi[2] = {a_hi[0], a_hi[1]};
    for (const auto& m : archive) {
      const double v[2] = {m.objectives.recon_error, m.objectives.fairness};
      for (int o = 0; o < 2; ++o) a_lo[o] = std::min(a_lo[o], v[o]), a_hi[o] = std::max(a_hi[o], v[o]);
    }
    for (const auto& m : pool) {
      const double v[2] = {m.objectives.recon_error, m.objectives.fairness};
      for (int o = 0; o < 2; ++o) p_lo[o] = std::min(p_lo[o], v[o]), p_hi[o] = std::max(p_hi[o], v[o]);
    }
    entry.best_recon_error = a_lo[0];
    entry.best_fairness = a_lo[1];
    for (int o = 0; o < 2; ++o)
      if (p_hi[o] > p_lo[o]) entry.spread += (a_hi[o] - a_lo[o]) / (p_hi[o] - p_lo[o]);
    result.log.push_back(entry);

    if (g == cfg.generations) break;

    const auto mating = binary_tournament(archive, rng, cfg.population_size);
    const std::size_t n_cross =
        std::min(pop_size, static_cast<std::size_t>(round_half_away(cfg.crossover_rate / 100.0 * pop_size)));
    population.clear();
    population.reserve(pop_size);
    for (std::size_t c = 0; c < n_cross; ++c)
      population.push_back(crossover(mating[(2 * c) % pop_size], mating[(2 * c + 1) % pop_size], rng));
    for (std::size_t j = 0; population.size() < pop_size; ++j)
      population.push_back(mutate(mating[(2 * n_cross + j) % pop_size], rng, cfg.d, cfg.mutation_swaps));
    for (const auto& child : population) detail::audit(child, cfg.r, cfg.d);
  }

  std::vector<FrontRecord> final_records;
  for (auto& m : archive) final_records.push_back({std::move(m.selection), m.objectives});
  result.front = nondominated_filter(std::move(final_records));
  return result;
}

}  // namespace mofpca
