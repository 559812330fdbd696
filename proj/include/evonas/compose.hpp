#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "evonas/genome.hpp"

namespace evonas {

struct ModelConfig {
  int input_embedding_dim = 512;
  int vocab_size = 32768;
  std::int64_t min_params = 59'100'000;
  std::int64_t max_params = 64'100'000;
  int sequence_length = 32;  // toy forward pass only
};

class MalformedGenomeError : public std::runtime_error {
 public:
  explicit MalformedGenomeError(const std::string& what) : std::runtime_error(what) {}
};

/// No scaling factor places total parameters inside [min_params, max_params];
/// the genome is outside the search space.
class ParamRangeError : public std::runtime_error {
 public:
  explicit ParamRangeError(const std::string& what) : std::runtime_error(what) {}
};

/// One cell of the composed computation graph. Hidden state 0 is the cell
/// input; hidden state i+1 is block i's output. Hidden states consumed by no
/// live branch are added to the final block output to form the cell output.
struct CellGraph {
  bool decoder = false;
  std::vector<BlockGene> blocks;
  std::vector<int> unused_states;

  int output_state() const { return static_cast<int>(blocks.size()); }
};

/// Left shift applied to decoder convolutions so position t never sees
/// positions > t; zero for encoder branches and non-convolution layers.
int causal_shift(const CellGraph& cell, const BranchGene& branch);

std::pair<CellGraph, CellGraph> compose(const Genome& genome, const ModelConfig& config);

// --- Dimension scaling ------------------------------------------------------

/// Widths snap to multiples of 16 so every width divides evenly by the
/// largest head count; zero-width layers are rounded up to 16.
int absolute_dim(int relative_dim, double sigma);

inline constexpr double kSigmaMax = 64.0;
inline constexpr int kSigmaGranularity = 64;  // grid step 1/64
inline constexpr int kScaleSearchIterations = 40;

struct BranchDims {
  int in = 0;
  int out = 0;
  std::int64_t params = 0;
};

struct CellWidths {
  std::vector<int> state_width;                       // block_count + 1 entries
  std::vector<std::array<BranchDims, 2>> branch_dims;  // {left, right} per block
  int output_width = 0;
  std::int64_t cell_params = 0;
};

/// Resolves widths and per-branch parameter counts for one cell instance.
/// `encoder_output_width` feeds attend-to-encoder key/value widths and is
/// ignored for encoder cells.
CellWidths resolve_cell(const CellGraph& cell, int input_width,
                        int encoder_output_width, double sigma);

struct ScaledArchitecture {
  Genome genome;
  ModelConfig config;
  CellGraph encoder;
  CellGraph decoder;
  double scale_factor = 0.0;
  CellWidths encoder_widths;  // first repetition, cell input = embedding
  CellWidths decoder_widths;
  std::int64_t total_params = 0;
};

/// Total parameters at a fixed scale: per-cell parameters multiplied by the
/// cell count, plus the shared token embedding (counted once).
std::int64_t param_count_at_scale(const Genome& genome, const ModelConfig& config,
                                  double sigma);

std::int64_t param_count(const ScaledArchitecture& arch);

/// Scale at which relative dimension 2 equals the input embedding width,
/// matching the Transformer calibration (512 -> 2, 2048 -> 8).
double reference_sigma(const ModelConfig& config);

ScaledArchitecture architecture_at_scale(const Genome& genome,
                                         const ModelConfig& config, double sigma);

/// Binary search over the sigma grid for the smallest scale whose parameter
/// total lands in [min_params, max_params]. Total parameters are
/// non-decreasing in sigma, so the boundary scale is in range exactly when
/// any grid scale is. Throws ParamRangeError when none is.
ScaledArchitecture scale_dimensions(const Genome& genome, const ModelConfig& config);

}  // namespace evonas
