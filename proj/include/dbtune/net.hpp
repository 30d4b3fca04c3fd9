#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dbtune/monitor.hpp"

namespace dbtune {

struct NetConfig {
  int n_inputs = 3;    // table_rows, buffer_miss_ratio, active_users
  int n_hidden = 100;
  int n_outputs = 2;   // shared_pool_mb, buffer_cache_mb
  double learning_rate = 0.4;
  int epochs = 100;
  double init_half_range = 0.5;  // weights start uniform in +-this
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-dimension min/max used for min-max scaling into [0,1]. A dimension
/// whose observed span is zero is widened by +-0.5 around the constant so
/// scaling stays defined (the constant maps to 0.5 and back exactly).
struct Bounds {
  Eigen::ArrayXd min;
  Eigen::ArrayXd max;

  Eigen::Index size() const { return min.size(); }
};

/// One sigmoid hidden layer: h = sigma(W1 x + b1), y = sigma(W2 h + b2),
/// operating entirely in normalized [0,1] coordinates. Bounds are filled by
/// training; a model without bounds cannot estimate.
struct NeuralModel {
  Eigen::MatrixXd W1;  // n_hidden x n_inputs
  Eigen::VectorXd b1;  // n_hidden
  Eigen::MatrixXd W2;  // n_outputs x n_hidden
  Eigen::VectorXd b2;  // n_outputs
  Bounds feature_bounds;  // size n_inputs once trained
  Bounds target_bounds;   // size n_outputs once trained
  std::uint64_t seed = 0;

  bool trained() const {
    return feature_bounds.size() == W1.cols() &&
           target_bounds.size() == W2.rows();
  }
};

/// Rows of (features, targets): features are (table_rows, miss_ratio,
/// users), targets are (pool_mb, cache_mb), matching the training CSV
/// column order.
struct TrainingSet {
  Eigen::MatrixXd features;  // n_rows x n_inputs
  Eigen::MatrixXd targets;   // n_rows x n_outputs
};

/// Fresh model with weights drawn uniformly in +-init_half_range from
/// Rng(cfg.seed): W1 row by row, then b1, then W2 row by row, then b2.
NeuralModel make_model(const NetConfig& cfg);

/// Min/max of each column; zero-span columns widened by +-0.5.
Bounds column_bounds(const Eigen::MatrixXd& columns);

/// (x - min) / (max - min) per dimension, clamped into [0,1].
Eigen::VectorXd normalize(const Eigen::VectorXd& x, const Bounds& bounds);

/// Inverse of normalize (no clamping): min + y * (max - min).
Eigen::VectorXd denormalize(const Eigen::VectorXd& y, const Bounds& bounds);

/// Pure forward pass on an already-normalized input.
Eigen::VectorXd forward(const NeuralModel& model, const Eigen::VectorXd& x);

struct TrainResult {
  std::vector<double> mse_per_epoch;  // length = cfg.epochs
};

/// Per-sample stochastic backpropagation of 0.5*||y - t||^2 for exactly
/// cfg.epochs passes, visiting rows in a freshly shuffled order each epoch
/// (shuffle stream seeded from cfg.seed, separate from weight init).
/// Computes both bounds from the set before training and records the
/// normalized MSE (sum of squared errors / (rows * outputs)) after each
/// epoch. Rejects empty sets, row-count or dimension mismatches, and
/// non-finite values; constant columns are usable thanks to the bounds
/// widening.
TrainResult train(NeuralModel& model, const TrainingSet& set,
                  const NetConfig& cfg);

/// Max relative error between backprop gradients of 0.5*||y - t||^2 and
/// central finite differences (step 1e-5) over every weight and bias.
double gradient_check(const NeuralModel& model, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& t);

struct SizeEstimate {
  int pool_mb = 0;
  int cache_mb = 0;
};

/// Snapshot -> normalize -> forward -> denormalize -> quantize each size UP
/// to its ladder (clamping to the top rung). Rejects untrained models.
SizeEstimate estimate_sizes(const NeuralModel& model,
                            const MetricsSnapshot& snapshot,
                            std::span<const int> pool_ladder,
                            std::span<const int> cache_ladder);

/// JSON round-trip with fields {dims, W1, b1, W2, b2, feature_bounds,
/// target_bounds, seed}. Loading is strict: unknown or missing keys,
/// dimension mismatches, and non-finite values are errors; a file without
/// bounds is rejected as untrained. Forward outputs survive the round trip
/// bit-exactly.
void save_model(const NeuralModel& model, const std::filesystem::path& path);
NeuralModel load_model(const std::filesystem::path& path);

/// Strict reader for the training CSV (header
/// `table_rows,miss_ratio,users,pool_mb,cache_mb`); malformed rows are
/// reported with their line number.
TrainingSet load_training_csv(const std::filesystem::path& path);

}  // namespace dbtune
