#pragma once

#include <Eigen/Dense>
#include <random>
#include <stdexcept>
#include <vector>

#include "evonas/compose.hpp"

namespace evonas {

/// Activations laid out as sequence positions x channels.
using Tensor = Eigen::MatrixXd;

class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

Tensor apply_layer_norm(const Tensor& x, const Eigen::VectorXd& gain,
                        const Eigen::VectorXd& bias);
Tensor apply_activation(const Tensor& x, Activation activation);

/// Joins two branch outputs. Width mismatches pad the narrower operand
/// (zeros for addition, ones for multiplication); concatenation stacks
/// channels. An empty operand yields the other unchanged. Throws ShapeError
/// when both operands are non-empty with different sequence lengths.
Tensor combine(const Tensor& left, const Tensor& right, Combiner combiner);

/// Addition with zero padding; used for folding unused hidden states into
/// the cell output.
Tensor add_padded(const Tensor& a, const Tensor& b);

struct ForwardTrace {
  Tensor encoder_input;  // embedded token sequences
  Tensor decoder_input;
  Tensor encoder_output;
  Tensor decoder_output;
};

/// Runs the composed graph numerically at toy scale with weights drawn
/// uniformly from [-0.1, 0.1] in a fixed traversal order, so identical
/// (architecture, inputs, rng seed) give identical outputs. Decoder
/// self-referential layers are causal.
ForwardTrace forward_trace(const ScaledArchitecture& arch,
                           const std::vector<int>& encoder_ids,
                           const std::vector<int>& decoder_ids,
                           std::mt19937_64& rng);

Tensor forward(const ScaledArchitecture& arch, const std::vector<int>& encoder_ids,
               const std::vector<int>& decoder_ids, std::mt19937_64& rng);

}  // namespace evonas
