#pragma once

#include "evonas/genome.hpp"

namespace evonas {

/// Canonical Transformer genome (base size: 3 encoder cells of 6 blocks,
/// 3 decoder cells of 8 blocks). Parsed from the checked-in seed file.
const Genome& transformer_seed();

/// Canonical Evolved Transformer genome: the Transformer seed with the 16
/// published mutations applied.
const Genome& et_seed();

/// Raw text of the checked-in seed files (round-trips through deserialize).
const char* transformer_seed_text();
const char* et_seed_text();

}  // namespace evonas
