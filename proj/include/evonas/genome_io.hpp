#pragma once

#include <stdexcept>
#include <string>

#include "evonas/genome.hpp"

namespace evonas {

/// Malformed document: missing keys, wrong shapes, unparseable text.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Well-formed document carrying a value outside a field's vocabulary
/// (e.g. rel_dim 11, attend_to_encoder in an encoder block).
class VocabError : public std::runtime_error {
 public:
  explicit VocabError(const std::string& what) : std::runtime_error(what) {}
};

/// Canonical JSON rendering. deserialize(serialize(g)) == g, and the text is
/// byte-stable: serializing the reparsed genome reproduces it exactly.
std::string serialize(const Genome& genome);
Genome deserialize(const std::string& text);

std::string layer_to_string(const LayerKind& layer);
LayerKind layer_from_string(const std::string& text);

Genome load_genome_file(const std::string& path);
void save_genome_file(const Genome& genome, const std::string& path);

}  // namespace evonas
