#include "evonas/validate.hpp"

namespace evonas {

std::string to_string(ValidationFailure failure) {
  switch (failure) {
    case ValidationFailure::kNoAttendToEncoder: return "NO_ATTEND_TO_ENCODER";
    case ValidationFailure::kNoResidualPath: return "NO_RESIDUAL_PATH";
    case ValidationFailure::kParamRangeUnsatisfiable: return "PARAM_RANGE_UNSATISFIABLE";
    case ValidationFailure::kBadInputIndex: return "BAD_INPUT_INDEX";
  }
  return "?";
}

bool has_residual_path(const std::vector<BlockGene>& blocks) {
  const int n = static_cast<int>(blocks.size());
  std::vector<bool> reachable(n + 1, false);
  reachable[0] = true;
  for (int i = 0; i < n; ++i) {
    if (blocks[i].combiner != Combiner::kAddition) continue;
    for (const BranchGene* branch : {&blocks[i].left, &blocks[i].right}) {
      if (branch->layer.type == LayerType::kIdentity && branch->input <= i &&
          branch->input >= 0 && reachable[branch->input])
        reachable[i + 1] = true;
    }
  }
  std::vector<bool> used(n + 1, false);
  for (const BlockGene& block : blocks)
    for (const BranchGene* branch : {&block.left, &block.right})
      if (branch->layer.type != LayerType::kDeadBranch && branch->input >= 0 &&
          branch->input <= n)
        used[branch->input] = true;
  for (int s = 0; s <= n; ++s)
    if (reachable[s] && (s == n || !used[s])) return true;
  return false;
}

ValidityReport validate(const Genome& genome, const ValidationConfig& config) {
  ValidityReport report;
  auto fail = [&report](ValidationFailure f) {
    report.valid = false;
    report.failures.push_back(f);
  };

  bool indices_ok = true;
  auto check_indices = [&indices_ok](const auto& blocks) {
    for (int i = 0; i < static_cast<int>(blocks.size()); ++i)
      for (const BranchGene* branch : {&blocks[i].left, &blocks[i].right})
        if (branch->input < 0 || branch->input > i) indices_ok = false;
  };
  check_indices(genome.encoder_blocks);
  check_indices(genome.decoder_blocks);
  if (!indices_ok) fail(ValidationFailure::kBadInputIndex);

  bool has_attend = false;
  for (const BlockGene& block : genome.decoder_blocks)
    for (const BranchGene* branch : {&block.left, &block.right})
      if (branch->layer.type == LayerType::kAttendToEncoder) has_attend = true;
  if (!has_attend) fail(ValidationFailure::kNoAttendToEncoder);

  if (!has_residual_path({genome.encoder_blocks.begin(), genome.encoder_blocks.end()}) ||
      !has_residual_path({genome.decoder_blocks.begin(), genome.decoder_blocks.end()}))
    fail(ValidationFailure::kNoResidualPath);

  // The scaling search dominates validation cost, so it runs only once the
  // structural checks pass; rejection sampling leans on this ordering.
  if (report.valid) {
    try {
      scale_dimensions(genome, config.model);
    } catch (const ParamRangeError&) {
      fail(ValidationFailure::kParamRangeUnsatisfiable);
    }
  }
  return report;
}

}  // namespace evonas
