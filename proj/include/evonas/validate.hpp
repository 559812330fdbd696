#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "evonas/compose.hpp"
#include "evonas/genome.hpp"

namespace evonas {

struct ValidationConfig {
  ModelConfig model;
  SearchSpaceOptions space;
  int max_resample_attempts = 1000;
};

enum class ValidationFailure {
  kNoAttendToEncoder,
  kNoResidualPath,
  kParamRangeUnsatisfiable,
  kBadInputIndex,
};

std::string to_string(ValidationFailure failure);

struct ValidityReport {
  bool valid = true;
  std::vector<ValidationFailure> failures;
};

/// Checks, in order: input indices in range, at least one attend-to-encoder
/// branch in the decoder, an unbroken residual path in both cells, and a
/// scale placing total parameters inside the configured range. Failures are
/// data, not errors.
ValidityReport validate(const Genome& genome, const ValidationConfig& config);

/// A residual path is a chain of identity-layer branches from hidden state 0
/// to the cell output whose combiners are all addition; the automatic
/// addition of an unused hidden state to the cell output counts as a final
/// addition link.
bool has_residual_path(const std::vector<BlockGene>& blocks);

class ResampleLimitError : public std::runtime_error {
 public:
  explicit ResampleLimitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace evonas
