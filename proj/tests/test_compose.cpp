#include "doctest.h"

#include "evonas/compose.hpp"
#include "evonas/seeds.hpp"

using namespace evonas;

TEST_CASE("transformer decoder graph carries attend-to-encoder nodes") {
  auto [encoder, decoder] = compose(transformer_seed(), ModelConfig{});
  int attend_nodes = 0;
  for (const BlockGene& block : decoder.blocks)
    for (const BranchGene* branch : {&block.left, &block.right})
      if (branch->layer.type == LayerType::kAttendToEncoder) ++attend_nodes;
  CHECK(attend_nodes >= 1);
  CHECK(encoder.blocks.size() == 6);
  CHECK(decoder.blocks.size() == 8);
  CHECK(decoder.decoder);
  CHECK_FALSE(encoder.decoder);
  // Every hidden state of both seeds feeds a later branch.
  CHECK(encoder.unused_states.empty());
  CHECK(decoder.unused_states.empty());
}

TEST_CASE("hidden states consumed by nobody are added to the cell output") {
  Genome genome = transformer_seed();
  // Redirect every consumer of state 4 (block 3's output) elsewhere.
  genome.encoder_blocks[4].left.input = 3;
  genome.encoder_blocks[5].left.input = 5;
  genome.encoder_blocks[5].right.input = 3;
  auto [encoder, decoder] = compose(genome, ModelConfig{});
  CHECK(encoder.unused_states == std::vector<int>{4});

  // The cell output width then covers the widest unused addend.
  const CellWidths widths = resolve_cell(encoder, 512, 0, 16.0);
  CHECK(widths.output_width >= widths.state_width[4]);
}

TEST_CASE("dead branches do not consume their stored input") {
  Genome genome = transformer_seed();
  // State 5 ends up referenced only by a dead branch; it still counts as
  // unused and flows to the cell output.
  genome.encoder_blocks[5].left =
      BranchGene{4, Normalization::kNone, identity_layer(), 2, Activation::kNone};
  genome.encoder_blocks[5].right =
      BranchGene{5, Normalization::kNone, dead_branch(), 2, Activation::kNone};
  CHECK(compose(genome, ModelConfig{}).first.unused_states ==
        std::vector<int>{5});
}

TEST_CASE("composition rejects malformed input indices") {
  Genome genome = transformer_seed();
  genome.decoder_blocks[2].left.input = 9;
  CHECK_THROWS_AS(compose(genome, ModelConfig{}), MalformedGenomeError);
}

TEST_CASE("decoder convolutions are causal with shift (w-1)/2") {
  auto [encoder, decoder] = compose(et_seed(), ModelConfig{});
  CHECK(causal_shift(decoder, et_seed().decoder_blocks[2].left) == 5);   // 11x1
  CHECK(causal_shift(decoder, et_seed().decoder_blocks[2].right) == 3);  // 7x1
  CHECK(causal_shift(decoder, et_seed().decoder_blocks[6].left) == 0);   // 1x1
  CHECK(causal_shift(encoder, et_seed().encoder_blocks[2].left) == 0);   // encoder
  CHECK(causal_shift(decoder, et_seed().decoder_blocks[0].left) == 0);   // attention
}

TEST_CASE("addition and multiplication pad to the wider operand") {
  // Left projects to 8 units, right to 4: the block output carries 8.
  Genome genome = transformer_seed();
  BlockGene& block = genome.encoder_blocks[1];
  block.left.relative_dim = 8;
  block.right = block.left;
  block.right.relative_dim = 4;
  for (Combiner combiner : {Combiner::kAddition, Combiner::kMultiplication}) {
    block.combiner = combiner;
    auto [encoder, decoder] = compose(genome, ModelConfig{});
    const CellWidths widths = resolve_cell(encoder, 512, 0, 1.0);
    CHECK(widths.branch_dims[1][0].out == 128);
    CHECK(widths.branch_dims[1][1].out == 64);
    CHECK(widths.state_width[2] == 128);  // narrower operand padded
  }
  block.combiner = Combiner::kConcatenation;
  auto [encoder, decoder] = compose(genome, ModelConfig{});
  const CellWidths widths = resolve_cell(encoder, 512, 0, 1.0);
  CHECK(widths.state_width[2] == 128 + 64);
}

TEST_CASE("identity-only cells contribute zero parameters") {
  Genome genome = transformer_seed();
  for (BlockGene& block : genome.encoder_blocks) {
    block.left = BranchGene{block.left.input, Normalization::kNone, identity_layer(),
                            1, Activation::kNone};
    block.right = BranchGene{block.right.input, Normalization::kNone, dead_branch(),
                             1, Activation::kNone};
    block.combiner = Combiner::kAddition;
  }
  auto [encoder, decoder] = compose(genome, ModelConfig{});
  const CellWidths widths = resolve_cell(encoder, 512, 0, 16.0);
  CHECK(widths.cell_params == 0);
  CHECK(widths.output_width == 512);
}

TEST_CASE("seed parameter counts reproduce the published totals") {
  ModelConfig base;  // embedding 512, vocab 32768
  const double sigma = reference_sigma(base);
  const double t = static_cast<double>(param_count_at_scale(transformer_seed(), base, sigma));
  const double e = static_cast<double>(param_count_at_scale(et_seed(), base, sigma));
  CHECK(std::abs(t - 61.1e6) / 61.1e6 < 0.05);
  CHECK(std::abs(e - 64.1e6) / 64.1e6 < 0.05);

  ModelConfig mobile = base;
  mobile.input_embedding_dim = 128;
  const double sigma_m = reference_sigma(mobile);
  const double tm = static_cast<double>(param_count_at_scale(transformer_seed(), mobile, sigma_m));
  const double em = static_cast<double>(param_count_at_scale(et_seed(), mobile, sigma_m));
  CHECK(std::abs(tm - 7.0e6) / 7.0e6 < 0.10);
  CHECK(std::abs(em - 7.2e6) / 7.2e6 < 0.10);
}

TEST_CASE("parameter count is invariant under permuting dead-only blocks") {
  Genome a = transformer_seed();
  auto deaden = [](BlockGene& block, int input) {
    block.left = BranchGene{input, Normalization::kNone, dead_branch(), 3,
                            Activation::kRelu};
    block.right = BranchGene{input, Normalization::kNone, dead_branch(), 5,
                             Activation::kNone};
    block.combiner = Combiner::kAddition;
  };
  // Two dead-only blocks with distinguishable stored fields; the chain
  // around them reads from state 1 directly.
  deaden(a.encoder_blocks[1], 1);
  deaden(a.encoder_blocks[2], 0);
  a.encoder_blocks[3].left.input = 1;
  a.encoder_blocks[3].right.input = 1;
  Genome b = a;
  std::swap(b.encoder_blocks[1], b.encoder_blocks[2]);
  const ModelConfig config;
  CHECK(param_count_at_scale(a, config, 16.0) == param_count_at_scale(b, config, 16.0));
}
