#include "evonas/compose.hpp"

#include <algorithm>
#include <cmath>

namespace evonas {

namespace {

CellGraph compose_cell(const std::vector<BlockGene>& blocks, bool decoder) {
  CellGraph cell;
  cell.decoder = decoder;
  cell.blocks = blocks;
  const int state_count = static_cast<int>(blocks.size()) + 1;
  std::vector<bool> used(state_count, false);
  for (int i = 0; i < static_cast<int>(blocks.size()); ++i) {
    for (const BranchGene* branch : {&blocks[i].left, &blocks[i].right}) {
      if (branch->input < 0 || branch->input > i)
        throw MalformedGenomeError("block " + std::to_string(i) + " input " +
                                   std::to_string(branch->input) + " outside [0," +
                                   std::to_string(i) + "]");
      // A dead branch produces nothing and does not consume its input.
      if (branch->layer.type != LayerType::kDeadBranch) used[branch->input] = true;
    }
  }
  for (int s = 0; s + 1 < state_count; ++s)
    if (!used[s]) cell.unused_states.push_back(s);
  return cell;
}

bool is_convolution(const LayerKind& layer) {
  return layer.type == LayerType::kStandardConv ||
         layer.type == LayerType::kSeparableConv ||
         layer.type == LayerType::kLightweightConv;
}

std::int64_t branch_params(const BranchGene& gene, int in, int out,
                           int encoder_output_width) {
  if (in <= 0) return 0;
  const std::int64_t n = in;
  const std::int64_t m = out;
  std::int64_t total = 0;
  if (gene.normalization == Normalization::kLayerNorm) total += 2 * n;
  switch (gene.layer.type) {
    case LayerType::kStandardConv:
      total += n * m * gene.layer.kernel_width + m;
      break;
    case LayerType::kSeparableConv:
      total += n * gene.layer.kernel_width + n * m + m;
      break;
    case LayerType::kLightweightConv: {
      // Softmax-normalized depthwise weights shared across channel groups;
      // no projections, so the layer preserves width.
      const std::int64_t groups = (n + gene.layer.reduction - 1) / gene.layer.reduction;
      total += groups * gene.layer.kernel_width;
      break;
    }
    case LayerType::kAttention:
      // q, k, v project in -> m with inner dim = out, then m -> m output
      // projection; biases included.
      total += 3 * (n * m + m) + m * m + m;
      break;
    case LayerType::kAttendToEncoder: {
      const std::int64_t e = encoder_output_width;
      total += (n * m + m) + 2 * (e * m + m) + m * m + m;
      break;
    }
    case LayerType::kGatedLinearUnit:
      total += 2 * (n * m + m);
      break;
    case LayerType::kIdentity:
    case LayerType::kDeadBranch:
      break;
  }
  return total;
}

}  // namespace

int causal_shift(const CellGraph& cell, const BranchGene& branch) {
  if (!cell.decoder || !is_convolution(branch.layer)) return 0;
  return (branch.layer.kernel_width - 1) / 2;
}

std::pair<CellGraph, CellGraph> compose(const Genome& genome, const ModelConfig&) {
  CellGraph encoder = compose_cell(
      {genome.encoder_blocks.begin(), genome.encoder_blocks.end()}, false);
  CellGraph decoder = compose_cell(
      {genome.decoder_blocks.begin(), genome.decoder_blocks.end()}, true);
  return {std::move(encoder), std::move(decoder)};
}

int absolute_dim(int relative_dim, double sigma) {
  const long rounded = std::lround(relative_dim * sigma);
  return static_cast<int>(std::max(16L, 16L * rounded));
}

CellWidths resolve_cell(const CellGraph& cell, int input_width,
                        int encoder_output_width, double sigma) {
  CellWidths widths;
  const int block_count = static_cast<int>(cell.blocks.size());
  widths.state_width.assign(block_count + 1, 0);
  widths.state_width[0] = input_width;
  widths.branch_dims.resize(block_count);

  for (int i = 0; i < block_count; ++i) {
    const BlockGene& block = cell.blocks[i];
    std::array<BranchDims, 2> dims;
    const BranchGene* genes[2] = {&block.left, &block.right};
    for (int side = 0; side < 2; ++side) {
      const BranchGene& gene = *genes[side];
      BranchDims d;
      d.in = widths.state_width[gene.input];
      if (d.in == 0 || gene.layer.type == LayerType::kDeadBranch) {
        d.out = 0;  // nothing flows through
      } else {
        switch (gene.layer.type) {
          case LayerType::kIdentity:
          case LayerType::kLightweightConv:
            d.out = d.in;
            break;
          default:
            d.out = absolute_dim(gene.relative_dim, sigma);
            break;
        }
        d.params = branch_params(gene, d.in, d.out, encoder_output_width);
      }
      dims[side] = d;
    }
    int block_width = 0;
    if (dims[0].out == 0 || dims[1].out == 0) {
      block_width = std::max(dims[0].out, dims[1].out);
    } else if (block.combiner == Combiner::kConcatenation) {
      block_width = dims[0].out + dims[1].out;
    } else {
      block_width = std::max(dims[0].out, dims[1].out);  // narrower side padded
    }
    widths.branch_dims[i] = dims;
    widths.state_width[i + 1] = block_width;
    widths.cell_params += dims[0].params + dims[1].params;
  }

  widths.output_width = widths.state_width[block_count];
  for (int s : cell.unused_states)
    widths.output_width = std::max(widths.output_width, widths.state_width[s]);
  return widths;
}

std::int64_t param_count_at_scale(const Genome& genome, const ModelConfig& config,
                                  double sigma) {
  return param_count(architecture_at_scale(genome, config, sigma));
}

std::int64_t param_count(const ScaledArchitecture& arch) { return arch.total_params; }

double reference_sigma(const ModelConfig& config) {
  return config.input_embedding_dim / 32.0;
}

ScaledArchitecture architecture_at_scale(const Genome& genome,
                                         const ModelConfig& config, double sigma) {
  ScaledArchitecture arch;
  arch.genome = genome;
  arch.config = config;
  std::tie(arch.encoder, arch.decoder) = compose(genome, config);
  arch.scale_factor = sigma;
  arch.encoder_widths =
      resolve_cell(arch.encoder, config.input_embedding_dim, 0, sigma);
  arch.decoder_widths = resolve_cell(arch.decoder, config.input_embedding_dim,
                                     arch.encoder_widths.output_width, sigma);
  // Each cell repetition owns its weights; the token embedding is shared by
  // encoder input, decoder input and output softmax, so it is counted once.
  arch.total_params =
      arch.encoder_widths.cell_params * genome.encoder_cells +
      arch.decoder_widths.cell_params * genome.decoder_cells +
      static_cast<std::int64_t>(config.vocab_size) * config.input_embedding_dim;
  return arch;
}

ScaledArchitecture scale_dimensions(const Genome& genome, const ModelConfig& config) {
  const int max_grid = static_cast<int>(kSigmaMax) * kSigmaGranularity;
  auto params_at = [&](int grid) {
    return param_count_at_scale(genome, config,
                                static_cast<double>(grid) / kSigmaGranularity);
  };
  // Smallest grid point with params >= min_params; monotonicity makes this
  // the first valid scale whenever one exists.
  int lo = 1, hi = max_grid;
  if (params_at(max_grid) < config.min_params)
    throw ParamRangeError("no scale reaches the minimum parameter count");
  int iterations = 0;
  while (lo < hi && iterations++ < kScaleSearchIterations) {
    const int mid = lo + (hi - lo) / 2;
    if (params_at(mid) >= config.min_params)
      hi = mid;
    else
      lo = mid + 1;
  }
  const double sigma = static_cast<double>(lo) / kSigmaGranularity;
  ScaledArchitecture arch = architecture_at_scale(genome, config, sigma);
  if (arch.total_params < config.min_params || arch.total_params > config.max_params)
    throw ParamRangeError("parameter total " + std::to_string(arch.total_params) +
                          " falls outside [" + std::to_string(config.min_params) +
                          ", " + std::to_string(config.max_params) + "]");
  return arch;
}

}  // namespace evonas
