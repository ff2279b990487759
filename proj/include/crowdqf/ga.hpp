// Copyright 2026 The crowdqf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

#include "crowdqf/errors.hpp"

// Real-valued genetic algorithm: tournament selection, uniform crossover,
// clamped Gaussian mutation, elitism. Minimizes.

namespace crowdqf {

struct GaConfig {
  std::size_t population_size{64};
  std::size_t max_generations{300};
  double crossover_rate{0.9};
  double mutation_rate{0.1};
  double mutation_scale{0.1};  // fraction of each gene's range
  std::size_t elitism_count{2};
  std::uint64_t seed{0};
  std::size_t plateau_generations{30};  // 0 disables the plateau stop
  double plateau_epsilon{1e-4};
  double mutation_decay{1.0};  // per-generation factor on mutation_scale
  std::size_t tournament_size{3};
  std::size_t threads{1};
};

struct GeneBounds {
  double low{0.0};
  double high{1.0};
};

struct Genome {
  std::vector<double> values;
  std::vector<GeneBounds> bounds;
};

enum class GaStop { kMaxGenerations, kPlateau, kZeroFitness };

struct GaResult {
  Genome best;
  double best_fitness{std::numeric_limits<double>::infinity()};
  /// Best fitness seen so far, one entry per generation (index 0 is the
  /// initial population). Non-increasing.
  std::vector<double> history;
  GaStop stop{GaStop::kMaxGenerations};
};

struct GaOptions {
  /// Seeded into the initial population ahead of random genomes.
  std::vector<std::vector<double>> initial_population;
  /// When false the fitness may depend on the generation, so elites are
  /// re-evaluated every generation.
  bool stationary{true};
  /// Called after each generation is evaluated with (generation, best genome
  /// of that generation, its fitness).
  std::function<void(std::size_t, std::span<const double>, double)> on_generation;
};

inline void validate(const GaConfig& c, std::span<const GeneBounds> bounds) {
  const auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (c.population_size < 2) throw ConfigurationError("population_size must be at least 2");
  if (!in_unit(c.crossover_rate) || !in_unit(c.mutation_rate)) throw ConfigurationError("rates must lie in [0, 1]");
  if (c.elitism_count >= c.population_size) throw ConfigurationError("elitism_count must be below population_size");
  if (!(c.mutation_scale >= 0.0) || !std::isfinite(c.mutation_scale)) throw ConfigurationError("mutation_scale must be >= 0");
  if (!(c.mutation_decay > 0.0 && c.mutation_decay <= 1.0)) throw ConfigurationError("mutation_decay must lie in (0, 1]");
  if (c.tournament_size == 0) throw ConfigurationError("tournament_size must be positive");
  if (!(c.plateau_epsilon >= 0.0)) throw ConfigurationError("plateau_epsilon must be >= 0");
  if (bounds.empty()) throw ConfigurationError("genome has no genes");
  for (const GeneBounds& b : bounds) {
    if (!std::isfinite(b.low) || !std::isfinite(b.high) || b.low > b.high) {
      throw ConfigurationError("gene bounds must be finite with low <= high");
    }
  }
}

/// Independent stream for (seed, a, b), so draws never depend on scheduling.
[[nodiscard]] inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept {
  const auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

namespace detail {

template <typename Fitness>
double call_fitness(Fitness& f, std::span<const double> g, std::size_t generation) {
  double v = 0.0;
  if constexpr (std::is_invocable_v<Fitness&, std::span<const double>, std::size_t>) {
    v = f(g, generation);
  } else {
    v = f(g);
  }
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

template <typename Fitness>
void evaluate(Fitness& fitness, const std::vector<std::vector<double>>& pop, std::vector<double>& fit,
              const std::vector<char>& pending, std::size_t generation, std::size_t threads) {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (pending[i]) todo.push_back(i);
  }
  threads = std::max<std::size_t>(1, std::min(threads, todo.size()));
  if (threads == 1) {
    for (std::size_t i : todo) fit[i] = call_fitness(fitness, pop[i], generation);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t k = w; k < todo.size(); k += threads) fit[todo[k]] = call_fitness(fitness, pop[todo[k]], generation);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

template <typename Fitness>
[[nodiscard]] GaResult ga_optimize(Fitness&& fitness, std::span<const GeneBounds> bounds, const GaConfig& config,
                                   const GaOptions& options = {}) {
  validate(config, bounds);
  const std::size_t genes = bounds.size();
  const std::size_t pop_size = config.population_size;
  constexpr std::uint64_t kInitStream = ~0ULL;

  const auto clamp_gene = [&](std::size_t j, double v) { return std::clamp(v, bounds[j].low, bounds[j].high); };

  std::vector<std::vector<double>> pop(pop_size, std::vector<double>(genes));
  for (std::size_t i = 0; i < pop_size; ++i) {
    if (i < options.initial_population.size()) {
      const auto& seeded = options.initial_population[i];
      if (seeded.size() != genes) throw ConfigurationError("initial genome has the wrong number of genes");
      for (std::size_t j = 0; j < genes; ++j) pop[i][j] = clamp_gene(j, seeded[j]);
    } else {
      std::mt19937_64 rng(split_seed(config.seed, kInitStream, i));
      for (std::size_t j = 0; j < genes; ++j) {
        pop[i][j] = std::uniform_real_distribution<double>(bounds[j].low, bounds[j].high)(rng);
        pop[i][j] = clamp_gene(j, pop[i][j]);
      }
    }
  }

  GaResult result;
  result.best.bounds.assign(bounds.begin(), bounds.end());
  std::vector<double> fit(pop_size, 0.0);
  std::vector<char> pending(pop_size, 1);
  std::vector<std::size_t> order(pop_size);

  for (std::size_t generation = 0;; ++generation) {
    detail::evaluate(fitness, pop, fit, pending, generation, config.threads);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });
    const std::size_t champion = order.front();
    if (fit[champion] < result.best_fitness || result.history.empty()) {
      result.best_fitness = fit[champion];
      result.best.values = pop[champion];
    }
    result.history.push_back(result.best_fitness);
    if (options.on_generation) options.on_generation(generation, pop[champion], fit[champion]);

    if (result.best_fitness <= 0.0) {
      result.stop = GaStop::kZeroFitness;
      break;
    }
    if (generation >= config.max_generations) {
      result.stop = GaStop::kMaxGenerations;
      break;
    }
    const std::size_t window = config.plateau_generations;
    if (window > 0 && generation >= window &&
        result.history[generation - window] - result.history[generation] < config.plateau_epsilon) {
      result.stop = GaStop::kPlateau;
      break;
    }

    const double scale = config.mutation_scale * std::pow(config.mutation_decay, static_cast<double>(generation));
    std::vector<std::vector<double>> next(pop_size);
    std::vector<double> next_fit(pop_size, 0.0);
    std::vector<char> next_pending(pop_size, 1);
    for (std::size_t e = 0; e < config.elitism_count; ++e) {
      next[e] = pop[order[e]];
      next_fit[e] = fit[order[e]];
      next_pending[e] = options.stationary ? 0 : 1;
    }
    for (std::size_t i = config.elitism_count; i < pop_size; ++i) {
      std::mt19937_64 rng(split_seed(config.seed, generation, i));
      std::uniform_int_distribution<std::size_t> pick(0, pop_size - 1);
      const auto tournament = [&] {
        std::size_t best = pick(rng);
        for (std::size_t k = 1; k < config.tournament_size; ++k) {
          const std::size_t c = pick(rng);
          if (fit[c] < fit[best] || (fit[c] == fit[best] && c < best)) best = c;
        }
        return best;
      };
      const auto& a = pop[tournament()];
      const auto& b = pop[tournament()];
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<double> child = a;
      if (unit(rng) < config.crossover_rate) {
        for (std::size_t j = 0; j < genes; ++j) {
          if (unit(rng) < 0.5) child[j] = b[j];
        }
      }
      for (std::size_t j = 0; j < genes; ++j) {
        if (unit(rng) < config.mutation_rate) {
          const double sd = scale * (bounds[j].high - bounds[j].low);
          if (sd > 0.0) child[j] = clamp_gene(j, child[j] + std::normal_distribution<double>(0.0, sd)(rng));
        }
      }
      next[i] = std::move(child);
    }
    pop = std::move(next);
    fit = std::move(next_fit);
    pending = std::move(next_pending);
  }
  return result;
}

template <typename Fitness>
[[nodiscard]] GaResult ga_optimize(Fitness&& fitness, const std::vector<GeneBounds>& bounds, const GaConfig& config,
                                   const GaOptions& options = {}) {
  return ga_optimize(std::forward<Fitness>(fitness), std::span<const GeneBounds>(bounds), config, options);
}

}  // namespace crowdqf
