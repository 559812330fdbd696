#include "evonas/genome.hpp"

#include <cassert>
#include <stdexcept>

namespace evonas {

namespace {

LayerKind make_layer(LayerType type, int w, int r, int h) {
  LayerKind k;
  k.type = type;
  k.kernel_width = w;
  k.reduction = r;
  k.heads = h;
  return k;
}

std::vector<LayerKind> build_layer_vocabulary(bool decoder) {
  std::vector<LayerKind> vocab;
  for (int w : {1, 3}) vocab.push_back(standard_conv(w));
  for (int w : {3, 5, 7, 9, 11}) vocab.push_back(separable_conv(w));
  for (int w : {3, 5, 7, 15})
    for (int r : {1, 4, 16}) vocab.push_back(lightweight_conv(w, r));
  for (int h : {4, 8, 16}) vocab.push_back(attention(h));
  vocab.push_back(gated_linear_unit());
  if (decoder) vocab.push_back(attend_to_encoder());
  vocab.push_back(identity_layer());
  vocab.push_back(dead_branch());
  return vocab;
}

bool contains(const std::vector<int>& xs, int x) {
  for (int v : xs)
    if (v == x) return true;
  return false;
}

}  // namespace

LayerKind standard_conv(int kernel_width) {
  if (!contains({1, 3}, kernel_width))
    throw std::invalid_argument("standard_conv: unrepresentable kernel width");
  return make_layer(LayerType::kStandardConv, kernel_width, 0, 0);
}

LayerKind separable_conv(int kernel_width) {
  if (!contains({3, 5, 7, 9, 11}, kernel_width))
    throw std::invalid_argument("separable_conv: unrepresentable kernel width");
  return make_layer(LayerType::kSeparableConv, kernel_width, 0, 0);
}

LayerKind lightweight_conv(int kernel_width, int reduction) {
  if (!contains({3, 5, 7, 15}, kernel_width) || !contains({1, 4, 16}, reduction))
    throw std::invalid_argument("lightweight_conv: unrepresentable parameters");
  return make_layer(LayerType::kLightweightConv, kernel_width, reduction, 0);
}

LayerKind attention(int heads) {
  if (!contains({4, 8, 16}, heads))
    throw std::invalid_argument("attention: unrepresentable head count");
  return make_layer(LayerType::kAttention, 0, 0, heads);
}

LayerKind gated_linear_unit() { return make_layer(LayerType::kGatedLinearUnit, 0, 0, 0); }
LayerKind attend_to_encoder() { return make_layer(LayerType::kAttendToEncoder, 0, 0, 0); }
LayerKind identity_layer() { return make_layer(LayerType::kIdentity, 0, 0, 0); }
LayerKind dead_branch() { return make_layer(LayerType::kDeadBranch, 0, 0, 0); }

const std::vector<LayerKind>& layer_vocabulary(bool decoder) {
  static const std::vector<LayerKind> encoder_vocab = build_layer_vocabulary(false);
  static const std::vector<LayerKind> decoder_vocab = build_layer_vocabulary(true);
  return decoder ? decoder_vocab : encoder_vocab;
}

FieldRef field_ref_at(int flat_index) {
  if (flat_index < 0 || flat_index >= kGenomeFieldCount)
    throw std::out_of_range("field_ref_at: index outside [0,156)");
  FieldRef ref;
  const int block_fields = kFieldsPerBlock * (kEncoderBlockCount + kDecoderBlockCount);
  if (flat_index >= block_fields) {
    ref.section = GeneSection::kCells;
    ref.block_index = -1;
    ref.branch = GeneBranch::kCellLevel;
    ref.field = flat_index == block_fields ? GeneField::kEncoderCells
                                           : GeneField::kDecoderCells;
    return ref;
  }
  int block = flat_index / kFieldsPerBlock;
  int within = flat_index % kFieldsPerBlock;
  if (block < kEncoderBlockCount) {
    ref.section = GeneSection::kEncoder;
    ref.block_index = block;
  } else {
    ref.section = GeneSection::kDecoder;
    ref.block_index = block - kEncoderBlockCount;
  }
  if (within == 10) {
    ref.branch = GeneBranch::kBlockLevel;
    ref.field = GeneField::kCombiner;
    return ref;
  }
  ref.branch = within < 5 ? GeneBranch::kLeft : GeneBranch::kRight;
  switch (within % 5) {
    case 0: ref.field = GeneField::kInput; break;
    case 1: ref.field = GeneField::kNormalization; break;
    case 2: ref.field = GeneField::kLayer; break;
    case 3: ref.field = GeneField::kRelativeDim; break;
    default: ref.field = GeneField::kActivation; break;
  }
  return ref;
}

int flat_index_of(const FieldRef& ref) {
  const int block_fields = kFieldsPerBlock * (kEncoderBlockCount + kDecoderBlockCount);
  if (ref.section == GeneSection::kCells)
    return ref.field == GeneField::kEncoderCells ? block_fields : block_fields + 1;
  int block = ref.block_index +
              (ref.section == GeneSection::kDecoder ? kEncoderBlockCount : 0);
  if (ref.branch == GeneBranch::kBlockLevel) return block * kFieldsPerBlock + 10;
  int within = ref.branch == GeneBranch::kRight ? 5 : 0;
  switch (ref.field) {
    case GeneField::kInput: break;
    case GeneField::kNormalization: within += 1; break;
    case GeneField::kLayer: within += 2; break;
    case GeneField::kRelativeDim: within += 3; break;
    case GeneField::kActivation: within += 4; break;
    default: throw std::invalid_argument("flat_index_of: bad branch field");
  }
  return block * kFieldsPerBlock + within;
}

namespace {

const BlockGene& block_at(const Genome& genome, const FieldRef& ref) {
  return ref.section == GeneSection::kEncoder ? genome.encoder_blocks.at(ref.block_index)
                                              : genome.decoder_blocks.at(ref.block_index);
}

BlockGene& block_at(Genome& genome, const FieldRef& ref) {
  return ref.section == GeneSection::kEncoder ? genome.encoder_blocks.at(ref.block_index)
                                              : genome.decoder_blocks.at(ref.block_index);
}

}  // namespace

FieldValue get_field(const Genome& genome, const FieldRef& ref) {
  if (ref.section == GeneSection::kCells)
    return ref.field == GeneField::kEncoderCells ? genome.encoder_cells
                                                 : genome.decoder_cells;
  const BlockGene& block = block_at(genome, ref);
  if (ref.field == GeneField::kCombiner) return block.combiner;
  const BranchGene& branch =
      ref.branch == GeneBranch::kLeft ? block.left : block.right;
  switch (ref.field) {
    case GeneField::kInput: return branch.input;
    case GeneField::kNormalization: return branch.normalization;
    case GeneField::kLayer: return branch.layer;
    case GeneField::kRelativeDim: return branch.relative_dim;
    case GeneField::kActivation: return branch.activation;
    default: throw std::invalid_argument("get_field: bad field");
  }
}

void set_field(Genome& genome, const FieldRef& ref, const FieldValue& value) {
  if (ref.section == GeneSection::kCells) {
    (ref.field == GeneField::kEncoderCells ? genome.encoder_cells
                                           : genome.decoder_cells) = std::get<int>(value);
    return;
  }
  BlockGene& block = block_at(genome, ref);
  if (ref.field == GeneField::kCombiner) {
    block.combiner = std::get<Combiner>(value);
    return;
  }
  BranchGene& branch = ref.branch == GeneBranch::kLeft ? block.left : block.right;
  switch (ref.field) {
    case GeneField::kInput: branch.input = std::get<int>(value); break;
    case GeneField::kNormalization:
      branch.normalization = std::get<Normalization>(value);
      break;
    case GeneField::kLayer: branch.layer = std::get<LayerKind>(value); break;
    case GeneField::kRelativeDim: branch.relative_dim = std::get<int>(value); break;
    case GeneField::kActivation: branch.activation = std::get<Activation>(value); break;
    default: throw std::invalid_argument("set_field: bad field");
  }
}

std::vector<FieldValue> field_vocabulary(const FieldRef& ref,
                                         const SearchSpaceOptions& options) {
  std::vector<FieldValue> vocab;
  switch (ref.field) {
    case GeneField::kInput:
      for (int i = 0; i <= ref.block_index; ++i) vocab.emplace_back(i);
      break;
    case GeneField::kNormalization:
      vocab.emplace_back(Normalization::kLayerNorm);
      if (options.allow_none_normalization) vocab.emplace_back(Normalization::kNone);
      break;
    case GeneField::kLayer:
      for (const LayerKind& layer :
           layer_vocabulary(ref.section == GeneSection::kDecoder))
        vocab.emplace_back(layer);
      break;
    case GeneField::kRelativeDim:
      for (int d = kMinRelativeDim; d <= kMaxRelativeDim; ++d) vocab.emplace_back(d);
      break;
    case GeneField::kActivation:
      vocab.emplace_back(Activation::kSwish);
      vocab.emplace_back(Activation::kRelu);
      vocab.emplace_back(Activation::kLeakyRelu);
      vocab.emplace_back(Activation::kNone);
      break;
    case GeneField::kCombiner:
      vocab.emplace_back(Combiner::kAddition);
      vocab.emplace_back(Combiner::kConcatenation);
      vocab.emplace_back(Combiner::kMultiplication);
      break;
    case GeneField::kEncoderCells:
    case GeneField::kDecoderCells:
      for (int c = kMinCells; c <= kMaxCells; ++c) vocab.emplace_back(c);
      break;
  }
  return vocab;
}

std::string to_string(GeneSection section) {
  switch (section) {
    case GeneSection::kEncoder: return "encoder";
    case GeneSection::kDecoder: return "decoder";
    case GeneSection::kCells: return "cells";
  }
  return "?";
}

std::string to_string(GeneBranch branch) {
  switch (branch) {
    case GeneBranch::kLeft: return "left";
    case GeneBranch::kRight: return "right";
    case GeneBranch::kBlockLevel: return "block";
    case GeneBranch::kCellLevel: return "cell";
  }
  return "?";
}

std::string to_string(GeneField field) {
  switch (field) {
    case GeneField::kInput: return "input";
    case GeneField::kNormalization: return "norm";
    case GeneField::kLayer: return "layer";
    case GeneField::kRelativeDim: return "rel_dim";
    case GeneField::kActivation: return "activation";
    case GeneField::kCombiner: return "combiner";
    case GeneField::kEncoderCells: return "encoder_cells";
    case GeneField::kDecoderCells: return "decoder_cells";
  }
  return "?";
}

std::string to_string(const LayerKind& layer) {
  switch (layer.type) {
    case LayerType::kStandardConv:
      return "standard_conv_" + std::to_string(layer.kernel_width) + "x1";
    case LayerType::kSeparableConv:
      return "separable_conv_" + std::to_string(layer.kernel_width) + "x1";
    case LayerType::kLightweightConv:
      return "lightweight_conv_" + std::to_string(layer.kernel_width) + "x1_r" +
             std::to_string(layer.reduction);
    case LayerType::kAttention: return "attention_" + std::to_string(layer.heads);
    case LayerType::kGatedLinearUnit: return "gated_linear_unit";
    case LayerType::kAttendToEncoder: return "attend_to_encoder";
    case LayerType::kIdentity: return "identity";
    case LayerType::kDeadBranch: return "dead_branch";
  }
  return "?";
}

std::string to_string(Normalization norm) {
  return norm == Normalization::kLayerNorm ? "layer_norm" : "none";
}

std::string to_string(Activation act) {
  switch (act) {
    case Activation::kSwish: return "swish";
    case Activation::kRelu: return "relu";
    case Activation::kLeakyRelu: return "leaky_relu";
    case Activation::kNone: return "none";
  }
  return "?";
}

std::string to_string(Combiner comb) {
  switch (comb) {
    case Combiner::kAddition: return "addition";
    case Combiner::kConcatenation: return "concatenation";
    case Combiner::kMultiplication: return "multiplication";
  }
  return "?";
}

std::string to_string(const FieldValue& value) {
  struct Visitor {
    std::string operator()(int v) const { return std::to_string(v); }
    std::string operator()(Normalization v) const { return to_string(v); }
    std::string operator()(const LayerKind& v) const { return to_string(v); }
    std::string operator()(Activation v) const { return to_string(v); }
    std::string operator()(Combiner v) const { return to_string(v); }
  };
  return std::visit(Visitor{}, value);
}

std::vector<FieldDiff> diff(const Genome& a, const Genome& b) {
  std::vector<FieldDiff> out;
  for (int i = 0; i < kGenomeFieldCount; ++i) {
    FieldRef ref = field_ref_at(i);
    FieldValue va = get_field(a, ref);
    FieldValue vb = get_field(b, ref);
    if (va != vb)
      out.push_back(FieldDiff{ref.section, ref.block_index, ref.branch, ref.field,
                              va, vb});
  }
  return out;
}

std::uint64_t genome_hash(const Genome& genome) {
  // FNV-1a over the flattened field stream; enum payloads are hashed through
  // their canonical byte encodings so the hash is platform stable.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t byte) {
    h ^= byte & 0xff;
    h *= 1099511628211ull;
  };
  auto mix_int = [&mix](std::uint64_t v) {
    for (int shift = 0; shift < 64; shift += 8) mix(v >> shift);
  };
  for (int i = 0; i < kGenomeFieldCount; ++i) {
    FieldValue value = get_field(genome, field_ref_at(i));
    if (std::holds_alternative<int>(value)) {
      mix_int(static_cast<std::uint64_t>(std::get<int>(value)));
    } else if (std::holds_alternative<Normalization>(value)) {
      mix_int(static_cast<std::uint64_t>(std::get<Normalization>(value)));
    } else if (std::holds_alternative<LayerKind>(value)) {
      const LayerKind& l = std::get<LayerKind>(value);
      mix_int(static_cast<std::uint64_t>(l.type));
      mix_int(static_cast<std::uint64_t>(l.kernel_width));
      mix_int(static_cast<std::uint64_t>(l.reduction));
      mix_int(static_cast<std::uint64_t>(l.heads));
    } else if (std::holds_alternative<Activation>(value)) {
      mix_int(static_cast<std::uint64_t>(std::get<Activation>(value)));
    } else {
      mix_int(static_cast<std::uint64_t>(std::get<Combiner>(value)));
    }
  }
  return h;
}

}  // namespace evonas
