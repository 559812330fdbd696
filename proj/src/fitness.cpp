#include "evonas/fitness.hpp"

#include <algorithm>
#include <cmath>

#include "evonas/rng.hpp"

namespace evonas {

double gaussian_from_hash(std::uint64_t h) {
  const double u1 = u01_from_hash(hash_combine(h, 0x67e6c7493f1f5e21ull));
  const double u2 = u01_from_hash(hash_combine(h, 0x9216d5d98979fb1bull));
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  return r * std::cos(2.0 * M_PI * u2);
}

namespace {

int count_branches(const Genome& genome, auto&& predicate) {
  int count = 0;
  auto scan = [&](const auto& blocks) {
    for (const BlockGene& block : blocks)
      for (const BranchGene* branch : {&block.left, &block.right})
        if (predicate(*branch)) ++count;
  };
  scan(genome.encoder_blocks);
  scan(genome.decoder_blocks);
  return count;
}

int count_identity_residual_blocks(const Genome& genome) {
  int count = 0;
  auto scan = [&](const auto& blocks) {
    for (const BlockGene& block : blocks) {
      if (block.combiner != Combiner::kAddition) continue;
      if (block.left.layer.type == LayerType::kIdentity ||
          block.right.layer.type == LayerType::kIdentity)
        ++count;
    }
  };
  scan(genome.encoder_blocks);
  scan(genome.decoder_blocks);
  return count;
}

// Longest identity-addition chain from the cell input to a state that feeds
// the cell output; extending it takes coordinated input/layer/combiner
// values, which is what makes it slow to assemble from random encodings.
template <std::size_t N>
int residual_chain_depth(const std::array<BlockGene, N>& blocks) {
  const int n = static_cast<int>(N);
  std::vector<int> depth(n + 1, -1);
  depth[0] = 0;
  for (int i = 0; i < n; ++i) {
    if (blocks[i].combiner != Combiner::kAddition) continue;
    for (const BranchGene* branch : {&blocks[i].left, &blocks[i].right}) {
      if (branch->layer.type != LayerType::kIdentity) continue;
      if (branch->input < 0 || branch->input > i) continue;
      if (depth[branch->input] < 0) continue;
      depth[i + 1] = std::max(depth[i + 1], depth[branch->input] + 1);
    }
  }
  std::vector<bool> used(n + 1, false);
  for (const BlockGene& block : blocks)
    for (const BranchGene* branch : {&block.left, &block.right})
      if (branch->layer.type != LayerType::kDeadBranch && branch->input >= 0 &&
          branch->input <= n)
        used[branch->input] = true;
  int best = 0;
  for (int s = 0; s <= n; ++s)
    if (depth[s] >= 0 && (s == n || !used[s])) best = std::max(best, depth[s]);
  return best;
}

bool is_conv(const LayerKind& layer) {
  return layer.type == LayerType::kStandardConv ||
         layer.type == LayerType::kSeparableConv ||
         layer.type == LayerType::kLightweightConv;
}

// Branch counts restricted to blocks wrapped by an identity-addition
// residual; operations pay off most inside trainable skip structure.
int count_residual_branches(const Genome& genome, auto&& predicate) {
  int count = 0;
  auto scan = [&](const auto& blocks) {
    for (const BlockGene& block : blocks) {
      if (block.combiner != Combiner::kAddition) continue;
      if (block.left.layer.type != LayerType::kIdentity &&
          block.right.layer.type != LayerType::kIdentity)
        continue;
      for (const BranchGene* branch : {&block.left, &block.right})
        if (predicate(*branch)) ++count;
    }
  };
  scan(genome.encoder_blocks);
  scan(genome.decoder_blocks);
  return count;
}

}  // namespace

const std::vector<std::string>& known_feature_names() {
  static const std::vector<std::string> names = {
      "identity_residual_blocks", "attention_branches",
      "attend_to_encoder_branches", "separable_conv_branches",
      "wide_conv_branches",        "glu_first_encoder_block",
      "decoder_cells_is_four",     "swish_activations",
      "active_branches",           "conv_branches",
      "cells_total",               "residual_chain_depth",
      "residual_separable_convs",  "residual_wide_convs",
      "residual_swish",            "shallow_conv_branches",
  };
  return names;
}

double genome_feature(const Genome& genome, const std::string& name) {
  if (name == "identity_residual_blocks")
    return count_identity_residual_blocks(genome);
  if (name == "attention_branches")
    return count_branches(genome, [](const BranchGene& b) {
      return b.layer.type == LayerType::kAttention;
    });
  if (name == "attend_to_encoder_branches")
    return count_branches(genome, [](const BranchGene& b) {
      return b.layer.type == LayerType::kAttendToEncoder;
    });
  if (name == "separable_conv_branches")
    return count_branches(genome, [](const BranchGene& b) {
      return b.layer.type == LayerType::kSeparableConv;
    });
  if (name == "wide_conv_branches")
    return count_branches(genome, [](const BranchGene& b) {
      return is_conv(b.layer) && b.layer.kernel_width >= 7;
    });
  if (name == "glu_first_encoder_block") {
    const BlockGene& block = genome.encoder_blocks[0];
    return block.left.layer.type == LayerType::kGatedLinearUnit ||
                   block.right.layer.type == LayerType::kGatedLinearUnit
               ? 1.0
               : 0.0;
  }
  if (name == "decoder_cells_is_four") return genome.decoder_cells == 4 ? 1.0 : 0.0;
  if (name == "swish_activations")
    return count_branches(genome, [](const BranchGene& b) {
      return b.layer.type != LayerType::kDeadBranch &&
             b.activation == Activation::kSwish;
    });
  if (name == "active_branches")
    return count_branches(genome, [](const BranchGene& b) {
      return b.layer.type != LayerType::kDeadBranch &&
             b.layer.type != LayerType::kIdentity;
    });
  if (name == "conv_branches")
    return count_branches(genome, [](const BranchGene& b) { return is_conv(b.layer); });
  if (name == "shallow_conv_branches")
    return count_branches(genome, [](const BranchGene& b) {
      return b.layer.type == LayerType::kStandardConv ||
             b.layer.type == LayerType::kLightweightConv;
    });
  if (name == "cells_total") return genome.encoder_cells + genome.decoder_cells;
  if (name == "residual_chain_depth")
    return residual_chain_depth(genome.encoder_blocks) +
           residual_chain_depth(genome.decoder_blocks);
  if (name == "residual_separable_convs")
    return count_residual_branches(genome, [](const BranchGene& b) {
      return b.layer.type == LayerType::kSeparableConv;
    });
  if (name == "residual_wide_convs")
    return count_residual_branches(genome, [](const BranchGene& b) {
      return is_conv(b.layer) && b.layer.kernel_width >= 7;
    });
  if (name == "residual_swish")
    return count_residual_branches(genome, [](const BranchGene& b) {
      return b.layer.type != LayerType::kDeadBranch &&
             b.layer.type != LayerType::kIdentity &&
             b.activation == Activation::kSwish;
    });
  throw std::invalid_argument("unknown oracle feature '" + name + "'");
}

std::vector<std::pair<std::string, double>> default_feature_weights() {
  return {
      {"residual_chain_depth", 0.035},
      {"identity_residual_blocks", 0.010},
      {"attention_branches", 0.010},
      {"attend_to_encoder_branches", 0.020},
      {"separable_conv_branches", 0.004},
      {"wide_conv_branches", 0.002},
      {"residual_separable_convs", 0.022},
      {"residual_wide_convs", 0.005},
      {"residual_swish", 0.015},
      {"glu_first_encoder_block", 0.030},
      {"decoder_cells_is_four", 0.040},
      {"swish_activations", 0.002},
      {"shallow_conv_branches", -0.012},
      {"cells_total", 0.007},
  };
}

std::vector<std::pair<std::string, double>> default_rate_feature_weights() {
  // Shallow convolution-heavy models converge fast; attention-rich deep
  // models converge slowly toward higher asymptotes.
  return {
      {"cells_total", -0.10},
      {"shallow_conv_branches", 0.06},
      {"attention_branches", -0.035},
  };
}

OracleConfig default_oracle_config() {
  OracleConfig config;
  config.feature_weights = default_feature_weights();
  config.rate_feature_weights = default_rate_feature_weights();
  return config;
}

CurveParams curve_for(const Genome& genome, const OracleConfig& config,
                      std::uint64_t oracle_seed) {
  const std::uint64_t id = genome_hash(genome);
  double asymptote = config.base_asymptote;
  for (const auto& [name, weight] : config.feature_weights)
    asymptote += weight * genome_feature(genome, name);
  asymptote += config.asymptote_jitter *
               symmetric_from_hash(hash_combine(hash_combine(id, oracle_seed),
                                                0x41737961ull));
  double rate_v = config.rate_jitter *
                  symmetric_from_hash(hash_combine(hash_combine(id, oracle_seed),
                                                   0x52617465ull));
  for (const auto& [name, weight] : config.rate_feature_weights)
    rate_v += weight * genome_feature(genome, name);
  rate_v = std::clamp(rate_v, -1.5, 1.5);
  CurveParams curve;
  curve.asymptote = asymptote;
  curve.start = config.start_fitness +
                config.start_jitter *
                    symmetric_from_hash(hash_combine(hash_combine(id, oracle_seed),
                                                     0x5374617274ull));
  curve.rate = config.rate_base * std::exp(config.rate_spread * rate_v);
  curve.noise_scale = config.noise_scale;
  curve.monotone = config.monotone;
  return curve;
}

double latent_fitness(const CurveParams& curve, std::uint64_t steps) {
  const double span = curve.asymptote - curve.start;
  return curve.asymptote - span * std::exp(-curve.rate * static_cast<double>(steps));
}

double fitness_from_perplexity(double perplexity) { return -std::log(perplexity); }
double perplexity_from_fitness(double fitness) { return std::exp(-fitness); }

EvaluationSession start_session(const Genome& genome, const OracleConfig& config,
                                std::uint64_t oracle_seed) {
  EvaluationSession session;
  session.genome_id = genome_hash(genome);
  session.oracle_seed = oracle_seed;
  session.curve = curve_for(genome, config, oracle_seed);
  return session;
}

namespace {

double evaluate_curve(const CurveParams& curve, std::uint64_t genome_id,
                      std::uint64_t oracle_seed, std::uint64_t steps,
                      int eval_ordinal) {
  double fitness = latent_fitness(curve, steps);
  if (!curve.monotone) {
    const double span = curve.asymptote - curve.start;
    const double phase =
        u01_from_hash(hash_combine(genome_id, 0x576f62626cull)) * 2.0 * M_PI;
    fitness += 0.05 * span * std::sin(0.05 * static_cast<double>(steps) + phase);
  }
  if (curve.noise_scale > 0.0) {
    std::uint64_t h = hash_combine(genome_id, oracle_seed);
    h = hash_combine(h, steps);
    h = hash_combine(h, static_cast<std::uint64_t>(eval_ordinal));
    fitness += curve.noise_scale * gaussian_from_hash(h);
  }
  return fitness;
}

}  // namespace

EvaluationSession train_and_evaluate(EvaluationSession session,
                                     std::uint64_t additional_steps) {
  if (additional_steps == 0)
    throw std::invalid_argument("train_and_evaluate: additional_steps must be > 0");
  session.steps_trained += additional_steps;
  session.fitness =
      evaluate_curve(session.curve, session.genome_id, session.oracle_seed,
                     session.steps_trained, static_cast<int>(session.history.size()));
  session.history.emplace_back(session.steps_trained, session.fitness);
  return session;
}

double SimulatedOracle::evaluate(const Genome& genome, std::uint64_t cumulative_steps,
                                 int eval_ordinal) const {
  const CurveParams curve = curve_for(genome, config_, seed_);
  return evaluate_curve(curve, genome_hash(genome), seed_, cumulative_steps,
                        eval_ordinal);
}

}  // namespace evonas
