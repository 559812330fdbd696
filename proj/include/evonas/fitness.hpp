#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evonas/genome.hpp"

namespace evonas {

/// Latent learning curve of one candidate:
///   fitness(steps) = asymptote - (asymptote - start) * exp(-rate * steps)
/// so fitness rises from `start` toward `asymptote`. With monotone set and
/// zero noise the curve is strictly increasing and bounded by the asymptote.
struct CurveParams {
  double asymptote = 0.0;
  double start = -1.0;
  double rate = 0.1;
  double noise_scale = 0.0;
  bool monotone = true;
};

struct OracleConfig {
  double base_asymptote = -2.2;
  double start_fitness = -3.6;
  double start_jitter = 0.5;  // initialization luck; washes out as training converges
  double asymptote_jitter = 0.015;  // +/- uniform, hash-derived per genome
  // rate = rate_base * exp(rate_spread * v) where v sums the weighted rate
  // features plus hash jitter, clamped to [-1.5, 1.5]. Making convergence
  // speed a heritable trait lets early-stopped evaluation mislead selection
  // toward fast-rising, low-asymptote architectures.
  double rate_base = 0.32;
  double rate_spread = 0.8;
  double rate_jitter = 0.12;
  double noise_scale = 0.0;
  bool monotone = true;  // when off, the latent curve carries a bounded ripple
  // Feature name -> weight. Configuration, not code: the extractors are
  // fixed, the tables are data.
  std::vector<std::pair<std::string, double>> feature_weights;
  std::vector<std::pair<std::string, double>> rate_feature_weights;
};

std::vector<std::pair<std::string, double>> default_feature_weights();
std::vector<std::pair<std::string, double>> default_rate_feature_weights();
OracleConfig default_oracle_config();

const std::vector<std::string>& known_feature_names();
double genome_feature(const Genome& genome, const std::string& name);

/// Deterministic map from (genome content, oracle seed) to curve parameters.
/// The asymptote is the configured base plus the weighted feature bonuses
/// plus a symmetric hash jitter; the rate carries independent jitter so
/// curves cross.
CurveParams curve_for(const Genome& genome, const OracleConfig& config,
                      std::uint64_t oracle_seed);

double latent_fitness(const CurveParams& curve, std::uint64_t steps);

/// Paper-style display conversions: fitness is negative log perplexity.
double fitness_from_perplexity(double perplexity);
double perplexity_from_fitness(double fitness);

// --- Evaluation sessions -----------------------------------------------------

struct EvaluationSession {
  std::uint64_t genome_id = 0;  // stable content hash
  std::uint64_t oracle_seed = 0;
  CurveParams curve;
  std::uint64_t steps_trained = 0;
  double fitness = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<std::uint64_t, double>> history;  // (steps, fitness)
};

EvaluationSession start_session(const Genome& genome, const OracleConfig& config,
                                std::uint64_t oracle_seed);

/// Advances the session by additional_steps (> 0) and appends an evaluation.
/// Pure in (session, curve, seed): identical inputs give identical histories.
/// Evaluation noise is drawn from the (genome, seed, steps, evaluation
/// ordinal) hash, so it never perturbs the latent curve.
EvaluationSession train_and_evaluate(EvaluationSession session,
                                     std::uint64_t additional_steps);

// --- Evaluator contract ------------------------------------------------------

class EvaluationError : public std::runtime_error {
 public:
  explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

/// The seam between search and training. Implementations must be
/// deterministic given their seed, and monotone in cumulative_steps when
/// configured monotone. eval_ordinal counts evaluations of one candidate so
/// noisy implementations can vary across re-evaluations without hidden state.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual double evaluate(const Genome& genome, std::uint64_t cumulative_steps,
                          int eval_ordinal) const = 0;
  virtual bool monotone() const { return true; }
};

class SimulatedOracle : public Evaluator {
 public:
  SimulatedOracle(OracleConfig config, std::uint64_t seed)
      : config_(std::move(config)), seed_(seed) {}

  double evaluate(const Genome& genome, std::uint64_t cumulative_steps,
                  int eval_ordinal) const override;
  bool monotone() const override { return config_.monotone && config_.noise_scale == 0.0; }

  CurveParams curve(const Genome& genome) const { return curve_for(genome, config_, seed_); }
  /// Latent long-run fitness; scores search quality without training.
  double true_asymptote(const Genome& genome) const { return curve(genome).asymptote; }

  const OracleConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }

 private:
  OracleConfig config_;
  std::uint64_t seed_;
};

/// Degenerate but valid implementation; handy in tests.
class ConstantEvaluator : public Evaluator {
 public:
  explicit ConstantEvaluator(double value) : value_(value) {}
  double evaluate(const Genome&, std::uint64_t, int) const override { return value_; }

 private:
  double value_;
};

}  // namespace evonas
