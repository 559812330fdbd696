#include "evonas/forward.hpp"

#include <cmath>

namespace evonas {

namespace {

constexpr double kLayerNormEpsilon = 1e-6;

class WeightSource {
 public:
  explicit WeightSource(std::mt19937_64& rng) : rng_(rng) {}

  Eigen::MatrixXd matrix(int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = dist_(rng_);
    return m;
  }

  Eigen::VectorXd vector(int size) {
    Eigen::VectorXd v(size);
    for (int i = 0; i < size; ++i) v(i) = dist_(rng_);
    return v;
  }

 private:
  std::mt19937_64& rng_;
  std::uniform_real_distribution<double> dist_{-0.1, 0.1};
};

Tensor empty_like(const Tensor& x) { return Tensor(x.rows(), 0); }

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& scores) {
  Eigen::MatrixXd out(scores.rows(), scores.cols());
  for (int r = 0; r < scores.rows(); ++r) {
    const double max = scores.row(r).maxCoeff();
    Eigen::ArrayXd e = (scores.row(r).array() - max).exp();
    out.row(r) = (e / e.sum()).matrix();
  }
  return out;
}

/// 1-D convolution over the sequence axis with zero padding. The window for
/// output position t covers input positions [t - shift - (w-1)/2,
/// t - shift + w - 1 - (w-1)/2]; shift = (w-1)/2 makes it causal.
Tensor conv_gather(const Tensor& x, int tap, int shift) {
  // Returns x shifted so row t holds x[t + tap - shift] (zeros off the ends).
  Tensor out = Tensor::Zero(x.rows(), x.cols());
  for (int t = 0; t < x.rows(); ++t) {
    const int src = t + tap - shift;
    if (src >= 0 && src < x.rows()) out.row(t) = x.row(src);
  }
  return out;
}

Tensor standard_conv_forward(const Tensor& x, int width, int out_dim, int shift,
                             WeightSource& weights) {
  const int in_dim = static_cast<int>(x.cols());
  const int half = (width - 1) / 2;
  Tensor acc = Tensor::Zero(x.rows(), out_dim);
  for (int tap = 0; tap < width; ++tap) {
    Eigen::MatrixXd w = weights.matrix(in_dim, out_dim);
    acc += conv_gather(x, tap - half, shift) * w;
  }
  acc.rowwise() += weights.vector(out_dim).transpose();
  return acc;
}

Tensor separable_conv_forward(const Tensor& x, int width, int out_dim, int shift,
                              WeightSource& weights) {
  const int in_dim = static_cast<int>(x.cols());
  const int half = (width - 1) / 2;
  // Depthwise pass: one scalar tap per channel per offset.
  Tensor depthwise = Tensor::Zero(x.rows(), in_dim);
  for (int tap = 0; tap < width; ++tap) {
    Eigen::VectorXd w = weights.vector(in_dim);
    depthwise += conv_gather(x, tap - half, shift) * w.asDiagonal();
  }
  Eigen::MatrixXd pointwise = weights.matrix(in_dim, out_dim);
  Tensor out = depthwise * pointwise;
  out.rowwise() += weights.vector(out_dim).transpose();
  return out;
}

Tensor lightweight_conv_forward(const Tensor& x, int width, int reduction,
                                int shift, WeightSource& weights) {
  const int in_dim = static_cast<int>(x.cols());
  const int groups = (in_dim + reduction - 1) / reduction;
  // Shared depthwise weights, softmax-normalized across the kernel taps.
  Eigen::MatrixXd raw = weights.matrix(groups, width);
  Eigen::MatrixXd taps = row_softmax(raw);
  Tensor out = Tensor::Zero(x.rows(), in_dim);
  const int half = (width - 1) / 2;
  for (int tap = 0; tap < width; ++tap) {
    Tensor gathered = conv_gather(x, tap - half, shift);
    for (int c = 0; c < in_dim; ++c)
      out.col(c) += taps(c / reduction, tap) * gathered.col(c);
  }
  return out;
}

Tensor attention_forward(const Tensor& queries_in, const Tensor& keys_in,
                         int heads, int out_dim, bool causal,
                         WeightSource& weights) {
  const int q_dim = static_cast<int>(queries_in.cols());
  const int kv_dim = static_cast<int>(keys_in.cols());
  Eigen::MatrixXd wq = weights.matrix(q_dim, out_dim);
  Eigen::VectorXd bq = weights.vector(out_dim);
  Eigen::MatrixXd wk = weights.matrix(kv_dim, out_dim);
  Eigen::VectorXd bk = weights.vector(out_dim);
  Eigen::MatrixXd wv = weights.matrix(kv_dim, out_dim);
  Eigen::VectorXd bv = weights.vector(out_dim);
  Eigen::MatrixXd wo = weights.matrix(out_dim, out_dim);
  Eigen::VectorXd bo = weights.vector(out_dim);

  Tensor q = queries_in * wq;
  q.rowwise() += bq.transpose();
  Tensor k = keys_in * wk;
  k.rowwise() += bk.transpose();
  Tensor v = keys_in * wv;
  v.rowwise() += bv.transpose();

  const int head_dim = out_dim / heads;
  Tensor concat(q.rows(), out_dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  for (int h = 0; h < heads; ++h) {
    auto qh = q.middleCols(h * head_dim, head_dim);
    auto kh = k.middleCols(h * head_dim, head_dim);
    auto vh = v.middleCols(h * head_dim, head_dim);
    Eigen::MatrixXd scores = qh * kh.transpose() * scale;
    if (causal) {
      for (int r = 0; r < scores.rows(); ++r)
        for (int c = r + 1; c < scores.cols(); ++c) scores(r, c) = -1e30;
    }
    concat.middleCols(h * head_dim, head_dim) = row_softmax(scores) * vh;
  }
  Tensor out = concat * wo;
  out.rowwise() += bo.transpose();
  return out;
}

Tensor glu_forward(const Tensor& x, int out_dim, WeightSource& weights) {
  Eigen::MatrixXd wv = weights.matrix(x.cols(), out_dim);
  Eigen::VectorXd bv = weights.vector(out_dim);
  Eigen::MatrixXd wg = weights.matrix(x.cols(), out_dim);
  Eigen::VectorXd bg = weights.vector(out_dim);
  Tensor values = x * wv;
  values.rowwise() += bv.transpose();
  Tensor gates = x * wg;
  gates.rowwise() += bg.transpose();
  return values.array() * gates.unaryExpr([](double v) { return sigmoid(v); }).array();
}

struct CellContext {
  const CellGraph* cell;
  const Tensor* encoder_output;  // null for encoder cells
  double sigma;
};

Tensor run_branch(const CellContext& ctx, const BranchGene& gene,
                  const std::vector<Tensor>& states, WeightSource& weights) {
  const Tensor& input = states[gene.input];
  if (gene.layer.type == LayerType::kDeadBranch || input.cols() == 0)
    return empty_like(input);

  Tensor x = input;
  if (gene.normalization == Normalization::kLayerNorm) {
    Eigen::VectorXd gain = weights.vector(static_cast<int>(x.cols()));
    Eigen::VectorXd bias = weights.vector(static_cast<int>(x.cols()));
    x = apply_layer_norm(x, gain, bias);
  }

  const int out_dim = gene.layer.type == LayerType::kIdentity ||
                              gene.layer.type == LayerType::kLightweightConv
                          ? static_cast<int>(x.cols())
                          : absolute_dim(gene.relative_dim, ctx.sigma);
  const int shift = causal_shift(*ctx.cell, gene);
  switch (gene.layer.type) {
    case LayerType::kStandardConv:
      x = standard_conv_forward(x, gene.layer.kernel_width, out_dim, shift, weights);
      break;
    case LayerType::kSeparableConv:
      x = separable_conv_forward(x, gene.layer.kernel_width, out_dim, shift, weights);
      break;
    case LayerType::kLightweightConv:
      x = lightweight_conv_forward(x, gene.layer.kernel_width, gene.layer.reduction,
                                   shift, weights);
      break;
    case LayerType::kAttention:
      x = attention_forward(x, x, gene.layer.heads, out_dim,
                            /*causal=*/ctx.cell->decoder, weights);
      break;
    case LayerType::kAttendToEncoder:
      if (ctx.encoder_output == nullptr)
        throw ShapeError("attend_to_encoder outside a decoder cell");
      x = attention_forward(x, *ctx.encoder_output, 8, out_dim, /*causal=*/false,
                            weights);
      break;
    case LayerType::kGatedLinearUnit:
      x = glu_forward(x, out_dim, weights);
      break;
    case LayerType::kIdentity:
      break;
    case LayerType::kDeadBranch:
      break;
  }
  return apply_activation(x, gene.activation);
}

Tensor run_cell(const CellContext& ctx, const Tensor& input, WeightSource& weights) {
  std::vector<Tensor> states;
  states.reserve(ctx.cell->blocks.size() + 1);
  states.push_back(input);
  for (const BlockGene& block : ctx.cell->blocks) {
    Tensor left = run_branch(ctx, block.left, states, weights);
    Tensor right = run_branch(ctx, block.right, states, weights);
    states.push_back(combine(left, right, block.combiner));
  }
  Tensor output = states.back();
  for (int s : ctx.cell->unused_states) output = add_padded(output, states[s]);
  return output;
}

}  // namespace

Tensor apply_layer_norm(const Tensor& x, const Eigen::VectorXd& gain,
                        const Eigen::VectorXd& bias) {
  Tensor out(x.rows(), x.cols());
  for (int r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).mean();
    const double var = (x.row(r).array() - mean).square().mean();
    out.row(r) = (((x.row(r).array() - mean) / std::sqrt(var + kLayerNormEpsilon)) *
                      gain.transpose().array() +
                  bias.transpose().array())
                     .matrix();
  }
  return out;
}

Tensor apply_activation(const Tensor& x, Activation activation) {
  switch (activation) {
    case Activation::kSwish:
      return x.unaryExpr([](double v) { return v * sigmoid(v); });
    case Activation::kRelu:
      return x.cwiseMax(0.0);
    case Activation::kLeakyRelu:
      return x.unaryExpr([](double v) { return v >= 0.0 ? v : 0.01 * v; });
    case Activation::kNone:
      return x;
  }
  return x;
}

Tensor combine(const Tensor& left, const Tensor& right, Combiner combiner) {
  if (left.cols() == 0) return right;
  if (right.cols() == 0) return left;
  if (left.rows() != right.rows())
    throw ShapeError("combiner operands have sequence lengths " +
                     std::to_string(left.rows()) + " and " +
                     std::to_string(right.rows()));
  const int width = combiner == Combiner::kConcatenation
                        ? static_cast<int>(left.cols() + right.cols())
                        : static_cast<int>(std::max(left.cols(), right.cols()));
  Tensor out(left.rows(), width);
  switch (combiner) {
    case Combiner::kConcatenation:
      out << left, right;
      break;
    case Combiner::kAddition: {
      out.setZero();
      out.leftCols(left.cols()) = left;
      out.leftCols(right.cols()) += right;
      break;
    }
    case Combiner::kMultiplication: {
      out.setOnes();
      out.leftCols(left.cols()) = left;
      out.leftCols(right.cols()).array() *= right.array();
      break;
    }
  }
  return out;
}

Tensor add_padded(const Tensor& a, const Tensor& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  return combine(a, b, Combiner::kAddition);
}

ForwardTrace forward_trace(const ScaledArchitecture& arch,
                           const std::vector<int>& encoder_ids,
                           const std::vector<int>& decoder_ids,
                           std::mt19937_64& rng) {
  const ModelConfig& config = arch.config;
  if (static_cast<int>(encoder_ids.size()) > config.sequence_length ||
      static_cast<int>(decoder_ids.size()) > config.sequence_length)
    throw ShapeError("token sequence exceeds configured sequence_length");
  WeightSource weights(rng);
  Eigen::MatrixXd embedding = weights.matrix(config.vocab_size, config.input_embedding_dim);

  auto embed = [&](const std::vector<int>& ids) {
    Tensor x(static_cast<int>(ids.size()), config.input_embedding_dim);
    for (int t = 0; t < static_cast<int>(ids.size()); ++t) {
      if (ids[t] < 0 || ids[t] >= config.vocab_size)
        throw ShapeError("token id outside the vocabulary");
      x.row(t) = embedding.row(ids[t]);
    }
    return x;
  };

  ForwardTrace trace;
  trace.encoder_input = embed(encoder_ids);
  trace.decoder_input = embed(decoder_ids);

  Tensor encoder_state = trace.encoder_input;
  for (int rep = 0; rep < arch.genome.encoder_cells; ++rep) {
    CellContext ctx{&arch.encoder, nullptr, arch.scale_factor};
    encoder_state = run_cell(ctx, encoder_state, weights);
  }
  trace.encoder_output = encoder_state;

  Tensor decoder_state = trace.decoder_input;
  for (int rep = 0; rep < arch.genome.decoder_cells; ++rep) {
    CellContext ctx{&arch.decoder, &trace.encoder_output, arch.scale_factor};
    decoder_state = run_cell(ctx, decoder_state, weights);
  }
  trace.decoder_output = decoder_state;
  return trace;
}

Tensor forward(const ScaledArchitecture& arch, const std::vector<int>& encoder_ids,
               const std::vector<int>& decoder_ids, std::mt19937_64& rng) {
  return forward_trace(arch, encoder_ids, decoder_ids, rng).decoder_output;
}

}  // namespace evonas
