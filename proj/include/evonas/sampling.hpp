#pragma once

#include <random>
#include <vector>

#include "evonas/genome.hpp"
#include "evonas/validate.hpp"

namespace evonas {

/// Every field drawn uniformly from its vocabulary, resampled until
/// validate() passes. Deterministic for a fixed rng state. Throws
/// ResampleLimitError after max_resample_attempts draws.
Genome random_genome(std::mt19937_64& rng, const ValidationConfig& constraints);

struct MutationDraw {
  Genome child;
  std::vector<int> mask;  // flat indices of fields selected for mutation
};

/// One raw mutation draw: each of the 156 fields mutates independently with
/// probability `rate`; a mutated field takes a uniform value from its
/// vocabulary excluding the current one (fields with a single-element
/// vocabulary stay put). No validity check.
MutationDraw draw_mutation(const Genome& parent, double rate, std::mt19937_64& rng,
                           const SearchSpaceOptions& options);

/// Validated mutation: redraws the entire mutation from the parent until the
/// child passes validate(). Throws ResampleLimitError at the retry bound.
MutationDraw mutate_with_mask(const Genome& parent, double rate,
                              std::mt19937_64& rng, const ValidationConfig& constraints);

Genome mutate(const Genome& parent, double rate, std::mt19937_64& rng,
              const ValidationConfig& constraints);

}  // namespace evonas
