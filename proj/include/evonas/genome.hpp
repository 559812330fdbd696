#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace evonas {

inline constexpr int kEncoderBlockCount = 6;
inline constexpr int kDecoderBlockCount = 8;
inline constexpr int kFieldsPerBlock = 11;
inline constexpr int kGenomeFieldCount =
    kFieldsPerBlock * (kEncoderBlockCount + kDecoderBlockCount) + 2;  // 156

inline constexpr int kMinCells = 1;
inline constexpr int kMaxCells = 6;
inline constexpr int kMinRelativeDim = 1;
inline constexpr int kMaxRelativeDim = 10;

enum class LayerType : std::uint8_t {
  kStandardConv,
  kSeparableConv,
  kLightweightConv,
  kAttention,
  kGatedLinearUnit,
  kAttendToEncoder,
  kIdentity,
  kDeadBranch,
};

/// A layer choice together with its parameter tuple. Only the tuples listed
/// in the vocabulary are representable; use the factory functions below.
struct LayerKind {
  LayerType type = LayerType::kIdentity;
  int kernel_width = 0;  // convolutions
  int reduction = 0;     // lightweight convolution
  int heads = 0;         // attention

  friend bool operator==(const LayerKind&, const LayerKind&) = default;
};

LayerKind standard_conv(int kernel_width);
LayerKind separable_conv(int kernel_width);
LayerKind lightweight_conv(int kernel_width, int reduction);
LayerKind attention(int heads);
LayerKind gated_linear_unit();
LayerKind attend_to_encoder();
LayerKind identity_layer();
LayerKind dead_branch();

/// Layer vocabulary in canonical order; the decoder additionally gets
/// attend_to_encoder.
const std::vector<LayerKind>& layer_vocabulary(bool decoder);

enum class Normalization : std::uint8_t { kLayerNorm, kNone };
enum class Activation : std::uint8_t { kSwish, kRelu, kLeakyRelu, kNone };
enum class Combiner : std::uint8_t { kAddition, kConcatenation, kMultiplication };

struct BranchGene {
  int input = 0;  // hidden-state index; 0 is the cell input
  Normalization normalization = Normalization::kNone;
  LayerKind layer;
  int relative_dim = 1;  // stored even when the layer ignores it
  Activation activation = Activation::kNone;

  friend bool operator==(const BranchGene&, const BranchGene&) = default;
};

struct BlockGene {
  BranchGene left;
  BranchGene right;
  Combiner combiner = Combiner::kAddition;

  friend bool operator==(const BlockGene&, const BlockGene&) = default;
};

struct Genome {
  std::array<BlockGene, kEncoderBlockCount> encoder_blocks;
  std::array<BlockGene, kDecoderBlockCount> decoder_blocks;
  int encoder_cells = 1;
  int decoder_cells = 1;

  friend bool operator==(const Genome&, const Genome&) = default;
};

// --- Flattened field addressing -------------------------------------------
//
// The encoding flattens to exactly 156 fields: 11 per block in the order
// [left input, left norm, left layer, left rel dim, left activation,
//  right input, right norm, right layer, right rel dim, right activation,
//  combiner], encoder blocks first, then the two cell counts.

enum class GeneSection : std::uint8_t { kEncoder, kDecoder, kCells };
enum class GeneBranch : std::uint8_t { kLeft, kRight, kBlockLevel, kCellLevel };
enum class GeneField : std::uint8_t {
  kInput,
  kNormalization,
  kLayer,
  kRelativeDim,
  kActivation,
  kCombiner,
  kEncoderCells,
  kDecoderCells,
};

struct FieldRef {
  GeneSection section = GeneSection::kEncoder;
  int block_index = 0;  // meaningless for kCells
  GeneBranch branch = GeneBranch::kLeft;
  GeneField field = GeneField::kInput;

  friend bool operator==(const FieldRef&, const FieldRef&) = default;
};

using FieldValue = std::variant<int, Normalization, LayerKind, Activation, Combiner>;

FieldRef field_ref_at(int flat_index);
int flat_index_of(const FieldRef& ref);
FieldValue get_field(const Genome& genome, const FieldRef& ref);
void set_field(Genome& genome, const FieldRef& ref, const FieldValue& value);

/// Options that shape the sampling vocabularies (not genome validity).
struct SearchSpaceOptions {
  // Layer normalization is removed from the normalization mutation
  // vocabulary by default; the main-search schedule re-adds NONE.
  bool allow_none_normalization = false;
};

/// The set of values field `ref` may take under `options`. Input fields
/// depend on the block index ([0, i] for 0-indexed block i), layer fields on
/// the section.
std::vector<FieldValue> field_vocabulary(const FieldRef& ref,
                                         const SearchSpaceOptions& options);

std::string to_string(GeneSection section);
std::string to_string(GeneBranch branch);
std::string to_string(GeneField field);
std::string to_string(const LayerKind& layer);
std::string to_string(Normalization norm);
std::string to_string(Activation act);
std::string to_string(Combiner comb);
std::string to_string(const FieldValue& value);

// --- Genome diffing ---------------------------------------------------------

struct FieldDiff {
  GeneSection section;
  int block_index;  // -1 for cell-level fields
  GeneBranch branch;
  GeneField field;
  FieldValue value_a;
  FieldValue value_b;
};

/// One entry per flattened field where the genomes differ, in flat-index
/// order. Symmetric up to swapping value_a/value_b.
std::vector<FieldDiff> diff(const Genome& a, const Genome& b);

/// Stable content hash; invariant under serialization round-trips.
std::uint64_t genome_hash(const Genome& genome);

}  // namespace evonas
