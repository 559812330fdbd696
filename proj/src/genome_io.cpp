#include "evonas/genome_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace evonas {

namespace {

using OrderedJson = nlohmann::ordered_json;

Normalization norm_from_string(const std::string& s) {
  if (s == "layer_norm") return Normalization::kLayerNorm;
  if (s == "none") return Normalization::kNone;
  throw VocabError("unknown normalization '" + s + "'");
}

Activation activation_from_string(const std::string& s) {
  if (s == "swish") return Activation::kSwish;
  if (s == "relu") return Activation::kRelu;
  if (s == "leaky_relu") return Activation::kLeakyRelu;
  if (s == "none") return Activation::kNone;
  throw VocabError("unknown activation '" + s + "'");
}

Combiner combiner_from_string(const std::string& s) {
  if (s == "addition") return Combiner::kAddition;
  if (s == "concatenation") return Combiner::kConcatenation;
  if (s == "multiplication") return Combiner::kMultiplication;
  throw VocabError("unknown combiner '" + s + "'");
}

OrderedJson branch_to_json(const BranchGene& branch) {
  OrderedJson j;
  j["input"] = branch.input;
  j["norm"] = to_string(branch.normalization);
  j["layer"] = to_string(branch.layer);
  j["rel_dim"] = branch.relative_dim;
  j["activation"] = to_string(branch.activation);
  return j;
}

std::string require_string(const OrderedJson& j, const std::string& key,
                           const std::string& where) {
  if (!j.contains(key) || !j[key].is_string())
    throw ParseError(where + ": missing string field '" + key + "'");
  return j[key].get<std::string>();
}

int require_int(const OrderedJson& j, const std::string& key,
                const std::string& where) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ParseError(where + ": missing integer field '" + key + "'");
  return j[key].get<int>();
}

BranchGene branch_from_json(const OrderedJson& j, bool decoder,
                            int block_index, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": branch is not an object");
  BranchGene branch;
  branch.input = require_int(j, "input", where);
  if (branch.input < 0 || branch.input > block_index)
    throw VocabError(where + ": input " + std::to_string(branch.input) +
                     " outside [0," + std::to_string(block_index) + "]");
  branch.normalization = norm_from_string(require_string(j, "norm", where));
  branch.layer = layer_from_string(require_string(j, "layer", where));
  if (!decoder && branch.layer.type == LayerType::kAttendToEncoder)
    throw VocabError(where + ": attend_to_encoder is decoder-only");
  branch.relative_dim = require_int(j, "rel_dim", where);
  if (branch.relative_dim < kMinRelativeDim || branch.relative_dim > kMaxRelativeDim)
    throw VocabError(where + ": rel_dim " + std::to_string(branch.relative_dim) +
                     " outside [1,10]");
  branch.activation = activation_from_string(require_string(j, "activation", where));
  return branch;
}

BlockGene block_from_json(const OrderedJson& j, bool decoder, int block_index,
                          const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": block is not an object");
  BlockGene block;
  if (!j.contains("left") || !j.contains("right"))
    throw ParseError(where + ": block needs 'left' and 'right' branches");
  block.left = branch_from_json(j["left"], decoder, block_index, where + ".left");
  block.right = branch_from_json(j["right"], decoder, block_index, where + ".right");
  block.combiner = combiner_from_string(require_string(j, "combiner", where));
  return block;
}

}  // namespace

std::string layer_to_string(const LayerKind& layer) { return to_string(layer); }

LayerKind layer_from_string(const std::string& text) {
  for (bool decoder : {false, true})
    for (const LayerKind& layer : layer_vocabulary(decoder))
      if (to_string(layer) == text) return layer;
  throw VocabError("unknown layer '" + text + "'");
}

std::string serialize(const Genome& genome) {
  OrderedJson j;
  j["encoder_blocks"] = OrderedJson::array();
  for (const BlockGene& block : genome.encoder_blocks) {
    OrderedJson b;
    b["left"] = branch_to_json(block.left);
    b["right"] = branch_to_json(block.right);
    b["combiner"] = to_string(block.combiner);
    j["encoder_blocks"].push_back(b);
  }
  j["decoder_blocks"] = OrderedJson::array();
  for (const BlockGene& block : genome.decoder_blocks) {
    OrderedJson b;
    b["left"] = branch_to_json(block.left);
    b["right"] = branch_to_json(block.right);
    b["combiner"] = to_string(block.combiner);
    j["decoder_blocks"].push_back(b);
  }
  j["encoder_cells"] = genome.encoder_cells;
  j["decoder_cells"] = genome.decoder_cells;
  return j.dump(2) + "\n";
}

Genome deserialize(const std::string& text) {
  OrderedJson j;
  try {
    j = OrderedJson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!j.is_object()) throw ParseError("genome document is not an object");
  if (!j.contains("encoder_blocks") || !j["encoder_blocks"].is_array() ||
      j["encoder_blocks"].size() != kEncoderBlockCount)
    throw ParseError("expected 'encoder_blocks' with exactly 6 entries");
  if (!j.contains("decoder_blocks") || !j["decoder_blocks"].is_array() ||
      j["decoder_blocks"].size() != kDecoderBlockCount)
    throw ParseError("expected 'decoder_blocks' with exactly 8 entries");

  Genome genome;
  for (int i = 0; i < kEncoderBlockCount; ++i)
    genome.encoder_blocks[i] = block_from_json(
        j["encoder_blocks"][i], false, i, "encoder_blocks[" + std::to_string(i) + "]");
  for (int i = 0; i < kDecoderBlockCount; ++i)
    genome.decoder_blocks[i] = block_from_json(
        j["decoder_blocks"][i], true, i, "decoder_blocks[" + std::to_string(i) + "]");
  genome.encoder_cells = require_int(j, "encoder_cells", "genome");
  genome.decoder_cells = require_int(j, "decoder_cells", "genome");
  for (int cells : {genome.encoder_cells, genome.decoder_cells})
    if (cells < kMinCells || cells > kMaxCells)
      throw VocabError("cell count " + std::to_string(cells) + " outside [1,6]");
  return genome;
}

Genome load_genome_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open genome file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return deserialize(buffer.str());
}

void save_genome_file(const Genome& genome, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write genome file '" + path + "'");
  out << serialize(genome);
}

}  // namespace evonas
