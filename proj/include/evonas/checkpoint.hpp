#pragma once

#include <cstdint>
#include <string>

#include "evonas/config.hpp"
#include "evonas/evolution.hpp"

namespace evonas {

/// Full serialized search state, resumable via `search --resume PATH`. The
/// RNG stream is captured exactly, so a resumed single-worker run continues
/// byte-identically.
struct Checkpoint {
  SearchState state;
  OracleConfig oracle;
  std::uint64_t oracle_seed = 1;
  std::string experiment_name = "custom";
};

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace evonas
