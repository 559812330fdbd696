#include "evonas/sampling.hpp"

namespace evonas {

namespace {

std::size_t uniform_index(std::mt19937_64& rng, std::size_t size) {
  return std::uniform_int_distribution<std::size_t>(0, size - 1)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Samples directly from each field's vocabulary without materializing it;
// rejection sampling runs this millions of times.
BranchGene draw_branch(std::mt19937_64& rng, int block_index, bool decoder,
                       const SearchSpaceOptions& options) {
  BranchGene branch;
  branch.input = uniform_int(rng, 0, block_index);
  branch.normalization = options.allow_none_normalization && uniform_int(rng, 0, 1) == 1
                             ? Normalization::kNone
                             : Normalization::kLayerNorm;
  const std::vector<LayerKind>& layers = layer_vocabulary(decoder);
  branch.layer = layers[uniform_index(rng, layers.size())];
  branch.relative_dim = uniform_int(rng, kMinRelativeDim, kMaxRelativeDim);
  branch.activation = static_cast<Activation>(uniform_int(rng, 0, 3));
  return branch;
}

Genome draw_uniform_genome(std::mt19937_64& rng, const SearchSpaceOptions& options) {
  Genome genome;
  auto draw_blocks = [&](auto& blocks, bool decoder) {
    for (int i = 0; i < static_cast<int>(blocks.size()); ++i) {
      blocks[i].left = draw_branch(rng, i, decoder, options);
      blocks[i].right = draw_branch(rng, i, decoder, options);
      blocks[i].combiner = static_cast<Combiner>(uniform_int(rng, 0, 2));
    }
  };
  draw_blocks(genome.encoder_blocks, false);
  draw_blocks(genome.decoder_blocks, true);
  genome.encoder_cells = uniform_int(rng, kMinCells, kMaxCells);
  genome.decoder_cells = uniform_int(rng, kMinCells, kMaxCells);
  return genome;
}

}  // namespace

Genome random_genome(std::mt19937_64& rng, const ValidationConfig& constraints) {
  for (int attempt = 0; attempt < constraints.max_resample_attempts; ++attempt) {
    Genome candidate = draw_uniform_genome(rng, constraints.space);
    if (validate(candidate, constraints).valid) return candidate;
  }
  throw ResampleLimitError("random_genome: no valid genome in " +
                           std::to_string(constraints.max_resample_attempts) +
                           " attempts; the configuration is over-constrained");
}

MutationDraw draw_mutation(const Genome& parent, double rate, std::mt19937_64& rng,
                           const SearchSpaceOptions& options) {
  MutationDraw draw;
  draw.child = parent;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < kGenomeFieldCount; ++i) {
    if (unit(rng) >= rate) continue;
    const FieldRef ref = field_ref_at(i);
    const FieldValue current = get_field(parent, ref);
    std::vector<FieldValue> choices;
    for (FieldValue& value : field_vocabulary(ref, options))
      if (value != current) choices.push_back(std::move(value));
    if (choices.empty()) continue;  // single-element vocabulary
    set_field(draw.child, ref, choices[uniform_index(rng, choices.size())]);
    draw.mask.push_back(i);
  }
  return draw;
}

MutationDraw mutate_with_mask(const Genome& parent, double rate,
                              std::mt19937_64& rng,
                              const ValidationConfig& constraints) {
  for (int attempt = 0; attempt < constraints.max_resample_attempts; ++attempt) {
    MutationDraw draw = draw_mutation(parent, rate, rng, constraints.space);
    if (validate(draw.child, constraints).valid) return draw;
  }
  throw ResampleLimitError("mutate: no valid child in " +
                           std::to_string(constraints.max_resample_attempts) +
                           " redraws; the configuration is over-constrained");
}

Genome mutate(const Genome& parent, double rate, std::mt19937_64& rng,
              const ValidationConfig& constraints) {
  return mutate_with_mask(parent, rate, rng, constraints).child;
}

}  // namespace evonas
