#include "doctest.h"

#include <random>

#include "evonas/forward.hpp"
#include "evonas/seeds.hpp"

using namespace evonas;

namespace {

ModelConfig toy_config(int embedding = 32) {
  ModelConfig config;
  config.input_embedding_dim = embedding;
  config.vocab_size = 97;
  config.sequence_length = 12;
  return config;
}

Genome identity_passthrough() {
  // Block 0 forwards the cell input through an identity branch; every other
  // block is fully dead, so the cell output equals the input.
  Genome genome = transformer_seed();
  auto wipe = [](auto& blocks) {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      blocks[i].left = BranchGene{0, Normalization::kNone,
                                  i == 0 ? identity_layer() : dead_branch(), 2,
                                  Activation::kNone};
      blocks[i].right =
          BranchGene{0, Normalization::kNone, dead_branch(), 2, Activation::kNone};
      blocks[i].combiner = Combiner::kAddition;
    }
  };
  wipe(genome.encoder_blocks);
  wipe(genome.decoder_blocks);
  genome.encoder_cells = 1;
  genome.decoder_cells = 1;
  return genome;
}

}  // namespace

TEST_CASE("identity cell reproduces the embedded input sequence") {
  const ModelConfig config = toy_config();
  const ScaledArchitecture arch =
      architecture_at_scale(identity_passthrough(), config, reference_sigma(config));
  std::mt19937_64 rng(11);
  const std::vector<int> enc_ids = {1, 2, 3, 4, 5};
  const std::vector<int> dec_ids = {9, 8, 7};
  const ForwardTrace trace = forward_trace(arch, enc_ids, dec_ids, rng);
  CHECK((trace.encoder_output - trace.encoder_input).norm() == 0.0);
  CHECK((trace.decoder_output - trace.decoder_input).norm() == 0.0);
}

TEST_CASE("multiplication with an all-ones operand is the identity") {
  Tensor x(3, 4);
  x << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12;
  const Tensor ones = Tensor::Ones(3, 4);
  CHECK((combine(x, ones, Combiner::kMultiplication) - x).norm() == 0.0);
  CHECK((combine(ones, x, Combiner::kMultiplication) - x).norm() == 0.0);
}

TEST_CASE("padding semantics against hand-computed two-channel examples") {
  Tensor wide(2, 2);
  wide << 1.0, 2.0, 3.0, 4.0;
  Tensor narrow(2, 1);
  narrow << 10.0, 20.0;

  const Tensor added = combine(wide, narrow, Combiner::kAddition);
  CHECK(added(0, 0) == 11.0);  // overlapping channel adds
  CHECK(added(1, 0) == 23.0);
  CHECK(added(0, 1) == 2.0);  // zero padding preserves the wide channel
  CHECK(added(1, 1) == 4.0);

  const Tensor multiplied = combine(wide, narrow, Combiner::kMultiplication);
  CHECK(multiplied(0, 0) == 10.0);
  CHECK(multiplied(1, 0) == 60.0);
  CHECK(multiplied(0, 1) == 2.0);  // one padding preserves the wide channel
  CHECK(multiplied(1, 1) == 4.0);

  const Tensor stacked = combine(wide, narrow, Combiner::kConcatenation);
  CHECK(stacked.cols() == 3);
  CHECK(stacked(0, 2) == 10.0);
}

TEST_CASE("combiners reject mismatched sequence lengths") {
  const Tensor a = Tensor::Ones(3, 2);
  const Tensor b = Tensor::Ones(4, 2);
  CHECK_THROWS_AS(combine(a, b, Combiner::kAddition), ShapeError);
}

TEST_CASE("sequences beyond the configured length are rejected") {
  const ModelConfig config = toy_config();
  const ScaledArchitecture arch =
      architecture_at_scale(transformer_seed(), config, reference_sigma(config));
  std::mt19937_64 rng(1);
  const std::vector<int> too_long(config.sequence_length + 1, 1);
  CHECK_THROWS_AS(forward(arch, too_long, {1, 2}, rng), ShapeError);
}

TEST_CASE("decoder outputs are causal for both seeds") {
  const ModelConfig config = toy_config();
  std::vector<int> enc_ids = {5, 6, 7, 8};
  std::vector<int> dec_ids = {1, 2, 3, 4, 5, 6};
  for (const Genome* genome : {&transformer_seed(), &et_seed()}) {
    const ScaledArchitecture arch =
        architecture_at_scale(*genome, config, reference_sigma(config));
    std::mt19937_64 rng_a(42), rng_b(42);
    const Tensor base = forward(arch, enc_ids, dec_ids, rng_a);
    std::vector<int> perturbed = dec_ids;
    const int t = 2;
    for (std::size_t p = t + 1; p < perturbed.size(); ++p)
      perturbed[p] = (perturbed[p] + 13) % config.vocab_size;
    const Tensor changed = forward(arch, enc_ids, perturbed, rng_b);
    CHECK((base.topRows(t + 1) - changed.topRows(t + 1)).cwiseAbs().maxCoeff() <
          1e-6);
    // Later positions actually see the perturbation.
    CHECK((base.bottomRows(1) - changed.bottomRows(1)).cwiseAbs().maxCoeff() >
          1e-9);
  }
}

TEST_CASE("forward pass is deterministic in the weight seed") {
  const ModelConfig config = toy_config();
  const ScaledArchitecture arch =
      architecture_at_scale(et_seed(), config, reference_sigma(config));
  std::mt19937_64 rng_a(7), rng_b(7), rng_c(8);
  const Tensor a = forward(arch, {1, 2, 3}, {4, 5}, rng_a);
  const Tensor b = forward(arch, {1, 2, 3}, {4, 5}, rng_b);
  const Tensor c = forward(arch, {1, 2, 3}, {4, 5}, rng_c);
  CHECK((a - b).norm() == 0.0);
  CHECK((a - c).norm() > 0.0);
}
