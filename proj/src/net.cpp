#include "dbtune/net.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include <json.hpp>

#include "dbtune/csv.hpp"
#include "dbtune/errors.hpp"
#include "dbtune/ladder.hpp"
#include "dbtune/rng.hpp"

namespace dbtune {

namespace {

// Decorrelates the epoch-shuffle stream from the weight-init stream.
constexpr std::uint64_t kShuffleSeedSalt = 0x9e3779b97f4a7c15ULL;

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

// Forward pass that also exposes the hidden activations (needed by
// backprop and the gradient check).
void forward_layers(const NeuralModel& model, const Eigen::VectorXd& x,
                    Eigen::VectorXd& h, Eigen::VectorXd& y) {
  h = sigmoid(model.W1 * x + model.b1);
  y = sigmoid(model.W2 * h + model.b2);
}

struct Gradients {
  Eigen::MatrixXd W1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd W2;
  Eigen::VectorXd b2;
};

// Backprop of loss = 0.5 * ||y - t||^2 through both sigmoid layers.
Gradients backprop(const NeuralModel& model, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& t, const Eigen::VectorXd& h,
                   const Eigen::VectorXd& y) {
  const Eigen::VectorXd delta2 =
      (y - t).cwiseProduct(y).cwiseProduct(Eigen::VectorXd::Ones(y.size()) - y);
  const Eigen::VectorXd delta1 =
      (model.W2.transpose() * delta2)
          .cwiseProduct(h)
          .cwiseProduct(Eigen::VectorXd::Ones(h.size()) - h);
  Gradients g;
  g.W2 = delta2 * h.transpose();
  g.b2 = delta2;
  g.W1 = delta1 * x.transpose();
  g.b1 = delta1;
  return g;
}

double normalized_mse(const NeuralModel& model, const Eigen::MatrixXd& X,
                      const Eigen::MatrixXd& T) {
  double sum_sq = 0.0;
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    Eigen::VectorXd h, y;
    forward_layers(model, X.row(r).transpose(), h, y);
    sum_sq += (y - T.row(r).transpose()).squaredNorm();
  }
  return sum_sq / (static_cast<double>(X.rows()) *
                   static_cast<double>(T.cols()));
}

void require_finite(const Eigen::MatrixXd& m, const std::string& what) {
  if (!m.allFinite()) {
    throw ValidationError(what + " contains non-finite values");
  }
}

}  // namespace

void NetConfig::validate() const {
  if (n_inputs < 1 || n_hidden < 1 || n_outputs < 1) {
    throw ValidationError("net layer sizes must be >= 1");
  }
  if (epochs < 1) {
    throw ValidationError("net.epochs must be >= 1");
  }
  // 0 is allowed so a zero-step training pass stays observable; negative
  // rates would ascend the loss.
  if (!(learning_rate >= 0.0)) {
    throw ValidationError("net.learning_rate must be non-negative");
  }
  if (!(init_half_range > 0.0)) {
    throw ValidationError("net.init_half_range must be positive");
  }
}

NeuralModel make_model(const NetConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  auto draw = [&rng, &cfg]() {
    return (rng.next_double() * 2.0 - 1.0) * cfg.init_half_range;
  };
  NeuralModel model;
  model.seed = cfg.seed;
  model.W1.resize(cfg.n_hidden, cfg.n_inputs);
  for (Eigen::Index i = 0; i < model.W1.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.W1.cols(); ++j) model.W1(i, j) = draw();
  }
  model.b1.resize(cfg.n_hidden);
  for (Eigen::Index i = 0; i < model.b1.size(); ++i) model.b1(i) = draw();
  model.W2.resize(cfg.n_outputs, cfg.n_hidden);
  for (Eigen::Index i = 0; i < model.W2.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.W2.cols(); ++j) model.W2(i, j) = draw();
  }
  model.b2.resize(cfg.n_outputs);
  for (Eigen::Index i = 0; i < model.b2.size(); ++i) model.b2(i) = draw();
  return model;
}

Bounds column_bounds(const Eigen::MatrixXd& columns) {
  Bounds bounds;
  bounds.min = columns.colwise().minCoeff().array();
  bounds.max = columns.colwise().maxCoeff().array();
  for (Eigen::Index i = 0; i < bounds.size(); ++i) {
    if (bounds.min(i) == bounds.max(i)) {
      bounds.min(i) -= 0.5;
      bounds.max(i) += 0.5;
    }
  }
  return bounds;
}

Eigen::VectorXd normalize(const Eigen::VectorXd& x, const Bounds& bounds) {
  if (x.size() != bounds.size()) {
    throw ValidationError("normalize: dimension mismatch with bounds");
  }
  const Eigen::ArrayXd scaled =
      (x.array() - bounds.min) / (bounds.max - bounds.min);
  return scaled.max(0.0).min(1.0).matrix();
}

Eigen::VectorXd denormalize(const Eigen::VectorXd& y, const Bounds& bounds) {
  if (y.size() != bounds.size()) {
    throw ValidationError("denormalize: dimension mismatch with bounds");
  }
  return (bounds.min + y.array() * (bounds.max - bounds.min)).matrix();
}

Eigen::VectorXd forward(const NeuralModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.W1.cols()) {
    throw ValidationError("forward: input dimension mismatch");
  }
  Eigen::VectorXd h, y;
  forward_layers(model, x, h, y);
  return y;
}

TrainResult train(NeuralModel& model, const TrainingSet& set,
                  const NetConfig& cfg) {
  cfg.validate();
  const Eigen::Index n_rows = set.features.rows();
  if (n_rows == 0) {
    throw ValidationError("training set has no rows");
  }
  if (set.targets.rows() != n_rows) {
    throw ValidationError("training set feature/target row counts differ");
  }
  if (set.features.cols() != model.W1.cols() ||
      set.targets.cols() != model.W2.rows()) {
    throw ValidationError("training set dimensions do not match the model");
  }
  require_finite(set.features, "training features");
  require_finite(set.targets, "training targets");

  model.feature_bounds = column_bounds(set.features);
  model.target_bounds = column_bounds(set.targets);

  Eigen::MatrixXd X(n_rows, set.features.cols());
  Eigen::MatrixXd T(n_rows, set.targets.cols());
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    X.row(r) =
        normalize(set.features.row(r).transpose(), model.feature_bounds)
            .transpose();
    T.row(r) = normalize(set.targets.row(r).transpose(), model.target_bounds)
                   .transpose();
  }

  Rng shuffle_rng(cfg.seed ^ kShuffleSeedSalt);
  std::vector<std::size_t> order(static_cast<std::size_t>(n_rows));
  std::iota(order.begin(), order.end(), 0u);

  TrainResult result;
  result.mse_per_epoch.reserve(static_cast<std::size_t>(cfg.epochs));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (const std::size_t idx : order) {
      const Eigen::VectorXd x = X.row(static_cast<Eigen::Index>(idx)).transpose();
      const Eigen::VectorXd t = T.row(static_cast<Eigen::Index>(idx)).transpose();
      Eigen::VectorXd h, y;
      forward_layers(model, x, h, y);
      const Gradients g = backprop(model, x, t, h, y);
      model.W2 -= cfg.learning_rate * g.W2;
      model.b2 -= cfg.learning_rate * g.b2;
      model.W1 -= cfg.learning_rate * g.W1;
      model.b1 -= cfg.learning_rate * g.b1;
    }
    result.mse_per_epoch.push_back(normalized_mse(model, X, T));
  }
  if (!std::all_of(result.mse_per_epoch.begin(), result.mse_per_epoch.end(),
                   [](double m) { return std::isfinite(m); })) {
    throw ValidationError("training diverged to a non-finite MSE");
  }
  return result;
}

double gradient_check(const NeuralModel& model, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& t) {
  Eigen::VectorXd h, y;
  forward_layers(model, x, h, y);
  const Gradients analytic = backprop(model, x, t, h, y);

  NeuralModel probe = model;
  const auto loss = [&probe, &x, &t]() {
    Eigen::VectorXd hh, yy;
    forward_layers(probe, x, hh, yy);
    return 0.5 * (yy - t).squaredNorm();
  };
  const double step = 1e-5;
  double max_rel = 0.0;
  const auto check_one = [&](double& w, double analytic_g) {
    const double original = w;
    w = original + step;
    const double loss_plus = loss();
    w = original - step;
    const double loss_minus = loss();
    w = original;
    const double numeric_g = (loss_plus - loss_minus) / (2.0 * step);
    const double rel =
        std::abs(analytic_g - numeric_g) /
        std::max({std::abs(analytic_g), std::abs(numeric_g), 1e-6});
    max_rel = std::max(max_rel, rel);
  };

  for (Eigen::Index i = 0; i < probe.W1.rows(); ++i) {
    for (Eigen::Index j = 0; j < probe.W1.cols(); ++j) {
      check_one(probe.W1(i, j), analytic.W1(i, j));
    }
  }
  for (Eigen::Index i = 0; i < probe.b1.size(); ++i) {
    check_one(probe.b1(i), analytic.b1(i));
  }
  for (Eigen::Index i = 0; i < probe.W2.rows(); ++i) {
    for (Eigen::Index j = 0; j < probe.W2.cols(); ++j) {
      check_one(probe.W2(i, j), analytic.W2(i, j));
    }
  }
  for (Eigen::Index i = 0; i < probe.b2.size(); ++i) {
    check_one(probe.b2(i), analytic.b2(i));
  }
  return max_rel;
}

SizeEstimate estimate_sizes(const NeuralModel& model,
                            const MetricsSnapshot& snapshot,
                            std::span<const int> pool_ladder,
                            std::span<const int> cache_ladder) {
  if (!model.trained()) {
    throw ValidationError(
        "model is untrained (normalization bounds are missing)");
  }
  Eigen::VectorXd x(3);
  x << static_cast<double>(snapshot.table_rows), snapshot.buffer_miss_ratio,
      static_cast<double>(snapshot.active_users);
  if (x.size() != model.W1.cols()) {
    throw ValidationError("model does not take 3 inputs");
  }
  const Eigen::VectorXd y =
      denormalize(forward(model, normalize(x, model.feature_bounds)),
                  model.target_bounds);
  if (y.size() != 2) {
    throw ValidationError("model does not produce 2 outputs");
  }
  SizeEstimate estimate;
  estimate.pool_mb = ladder_quantize_up(pool_ladder, y(0));
  estimate.cache_mb = ladder_quantize_up(cache_ladder, y(1));
  return estimate;
}

namespace {

using json = nlohmann::ordered_json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json bounds_to_json(const Bounds& b) {
  return json{{"min", vector_to_json(b.min.matrix())},
              {"max", vector_to_json(b.max.matrix())}};
}

const json& require_field(const json& obj, const char* key,
                          const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(where + ": missing field \"" + key + "\"");
  }
  return *it;
}

double json_number(const json& v, const std::string& where) {
  if (!v.is_number()) {
    throw ValidationError(where + ": expected a number");
  }
  return v.get<double>();
}

Eigen::VectorXd json_to_vector(const json& arr, Eigen::Index expected,
                               const std::string& where) {
  if (!arr.is_array() ||
      static_cast<Eigen::Index>(arr.size()) != expected) {
    throw ValidationError(where + ": expected an array of length " +
                          std::to_string(expected));
  }
  Eigen::VectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) {
    v(i) = json_number(arr[static_cast<std::size_t>(i)],
                       where + "[" + std::to_string(i) + "]");
  }
  return v;
}

Eigen::MatrixXd json_to_matrix(const json& arr, Eigen::Index rows,
                               Eigen::Index cols, const std::string& where) {
  if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != rows) {
    throw ValidationError(where + ": expected " + std::to_string(rows) +
                          " rows");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    m.row(i) = json_to_vector(arr[static_cast<std::size_t>(i)], cols,
                              where + "[" + std::to_string(i) + "]")
                   .transpose();
  }
  return m;
}

Bounds json_to_bounds(const json& obj, Eigen::Index expected,
                      const std::string& where) {
  if (!obj.is_object()) {
    throw ValidationError(where + ": expected an object with min/max");
  }
  Bounds b;
  b.min = json_to_vector(require_field(obj, "min", where), expected,
                         where + ".min")
              .array();
  b.max = json_to_vector(require_field(obj, "max", where), expected,
                         where + ".max")
              .array();
  for (Eigen::Index i = 0; i < expected; ++i) {
    if (!(b.min(i) < b.max(i))) {
      throw ValidationError(where + ": min must be < max in every dimension");
    }
  }
  return b;
}

}  // namespace

void save_model(const NeuralModel& model, const std::filesystem::path& path) {
  if (!model.trained()) {
    throw ValidationError(
        "refusing to save an untrained model (no normalization bounds)");
  }
  json doc;
  doc["dims"] = {{"n_inputs", model.W1.cols()},
                 {"n_hidden", model.W1.rows()},
                 {"n_outputs", model.W2.rows()}};
  doc["W1"] = matrix_to_json(model.W1);
  doc["b1"] = vector_to_json(model.b1);
  doc["W2"] = matrix_to_json(model.W2);
  doc["b2"] = vector_to_json(model.b2);
  doc["feature_bounds"] = bounds_to_json(model.feature_bounds);
  doc["target_bounds"] = bounds_to_json(model.target_bounds);
  doc["seed"] = model.seed;
  write_file(path, doc.dump(2) + "\n");
}

NeuralModel load_model(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("model file " + path.string() + ": " + e.what());
  }
  const std::string where = "model file " + path.string();
  if (!doc.is_object()) {
    throw ValidationError(where + ": top level must be an object");
  }
  static const std::vector<std::string> known = {
      "dims", "W1", "b1", "W2", "b2", "feature_bounds", "target_bounds",
      "seed"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError(where + ": unexpected field \"" + key + "\"");
    }
  }
  if (!doc.contains("feature_bounds") || !doc.contains("target_bounds")) {
    throw ValidationError(
        where + ": missing bounds — the model was never trained");
  }

  const json& dims = require_field(doc, "dims", where);
  const auto dim = [&dims, &where](const char* key) {
    const json& v = require_field(dims, key, where + ".dims");
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      throw ValidationError(where + ".dims." + key +
                            ": expected a positive integer");
    }
    return static_cast<Eigen::Index>(v.get<long long>());
  };
  const Eigen::Index n_inputs = dim("n_inputs");
  const Eigen::Index n_hidden = dim("n_hidden");
  const Eigen::Index n_outputs = dim("n_outputs");

  NeuralModel model;
  model.W1 = json_to_matrix(require_field(doc, "W1", where), n_hidden,
                            n_inputs, where + ".W1");
  model.b1 = json_to_vector(require_field(doc, "b1", where), n_hidden,
                            where + ".b1");
  model.W2 = json_to_matrix(require_field(doc, "W2", where), n_outputs,
                            n_hidden, where + ".W2");
  model.b2 = json_to_vector(require_field(doc, "b2", where), n_outputs,
                            where + ".b2");
  model.feature_bounds =
      json_to_bounds(doc["feature_bounds"], n_inputs, where + ".feature_bounds");
  model.target_bounds =
      json_to_bounds(doc["target_bounds"], n_outputs, where + ".target_bounds");
  const json& seed = require_field(doc, "seed", where);
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw ValidationError(where + ".seed: expected an unsigned integer");
  }
  model.seed = seed.get<std::uint64_t>();

  require_finite(model.W1, where + ".W1");
  require_finite(model.b1, where + ".b1");
  require_finite(model.W2, where + ".W2");
  require_finite(model.b2, where + ".b2");
  return model;
}

TrainingSet load_training_csv(const std::filesystem::path& path) {
  static const std::string kHeader =
      "table_rows,miss_ratio,users,pool_mb,cache_mb";
  const std::string text = read_file(path);
  const std::string where = "training data " + path.string();

  std::vector<std::string> lines;
  std::string current;
  for (const char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) lines.push_back(current);
  for (std::string& line : lines) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }

  if (lines.empty() || lines[0] != kHeader) {
    throw ValidationError(where + " line 1: expected header \"" + kHeader +
                          "\"");
  }

  std::vector<std::array<double, 5>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;  // trailing blank line
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != 5) {
      throw ValidationError(where + " line " + std::to_string(i + 1) +
                            ": expected 5 fields, got " +
                            std::to_string(cells.size()));
    }
    std::array<double, 5> row{};
    for (std::size_t c = 0; c < 5; ++c) {
      const std::string& cell = cells[c];
      double value = 0.0;
      const auto res =
          std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
          !std::isfinite(value)) {
        throw ValidationError(where + " line " + std::to_string(i + 1) +
                              ": field " + std::to_string(c + 1) +
                              " is not a number: \"" + cell + "\"");
      }
      row[c] = value;
    }
    rows.push_back(row);
  }
  if (rows.empty()) {
    throw ValidationError(where + ": no data rows");
  }

  TrainingSet set;
  set.features.resize(static_cast<Eigen::Index>(rows.size()), 3);
  set.targets.resize(static_cast<Eigen::Index>(rows.size()), 2);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto idx = static_cast<Eigen::Index>(r);
    set.features(idx, 0) = rows[r][0];  // table_rows
    set.features(idx, 1) = rows[r][1];  // miss_ratio
    set.features(idx, 2) = rows[r][2];  // users
    set.targets(idx, 0) = rows[r][3];   // pool_mb
    set.targets(idx, 1) = rows[r][4];   // cache_mb
  }
  return set;
}

}  // namespace dbtune
