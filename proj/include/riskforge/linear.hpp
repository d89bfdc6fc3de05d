#pragma once

// Linear-margin classifiers over the linear encoding: L2-regularized logistic
// regression (full-batch gradient descent), the classic perceptron, and a
// hinge-loss linear SVM trained with Pegasos-style sub-gradient steps.

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "riskforge/config.hpp"
#include "riskforge/random.hpp"
#include "riskforge/tabular.hpp"
#include "riskforge/tree.hpp"

namespace riskforge {

enum class LinearKind { Logistic, Perceptron, Hinge };

inline std::string to_string(LinearKind k) {
  switch (k) {
    case LinearKind::Logistic: return "logistic";
    case LinearKind::Perceptron: return "perceptron";
    case LinearKind::Hinge: return "hinge";
  }
  return "logistic";
}

inline LinearKind linear_kind_from_string(const std::string& s) {
  if (s == "logistic") return LinearKind::Logistic;
  if (s == "perceptron") return LinearKind::Perceptron;
  if (s == "hinge") return LinearKind::Hinge;
  throw Error(ErrorCode::Format, "unknown linear kind '" + s + "'");
}

struct LinearModel {
  LinearKind kind = LinearKind::Logistic;
  LinearEncoder encoder;
  std::vector<double> weights;  // one per encoded column
  double bias = 0;
  bool converged = true;
  std::size_t epochs_run = 0;
  std::vector<double> objective_trace;  // per epoch (per pass for perceptron: mistakes)

  double margin_encoded(std::span<const double> encoded) const {
    double z = bias;
    for (std::size_t c = 0; c < weights.size(); ++c) z += weights[c] * encoded[c];
    return z;
  }

  double margin(std::span<const double> row) const { return margin_encoded(encoder.transform(row)); }

  // Logistic squashing of the margin for every kind; for perceptron/hinge
  // this is a ranking score, not a calibrated probability.
  double predict(std::span<const double> row) const { return sigmoid(margin(row)); }
};

// Mean log-loss + (l2/2)|w|^2 and its gradient; exposed for verification.
inline double logistic_objective(const EncodedMatrix& x, std::span<const double> w, double b, double l2) {
  double loss = 0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto r = x.row(i);
    double z = b;
    for (std::size_t c = 0; c < x.cols; ++c) z += w[c] * r[c];
    const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    loss += softplus - x.labels[i] * z;
  }
  double reg = 0;
  for (double v : w) reg += v * v;
  return loss / static_cast<double>(x.rows) + 0.5 * l2 * reg;
}

inline void logistic_gradient(const EncodedMatrix& x, std::span<const double> w, double b, double l2,
                              std::span<double> grad_w, double& grad_b) {
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  grad_b = 0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto r = x.row(i);
    double z = b;
    for (std::size_t c = 0; c < x.cols; ++c) z += w[c] * r[c];
    const double residual = sigmoid(z) - x.labels[i];
    for (std::size_t c = 0; c < x.cols; ++c) grad_w[c] += residual * r[c];
    grad_b += residual;
  }
  const double inv = 1.0 / static_cast<double>(x.rows);
  for (std::size_t c = 0; c < x.cols; ++c) grad_w[c] = grad_w[c] * inv + l2 * w[c];
  grad_b *= inv;
}

namespace detail {

inline void require_linear_input(const EncodedMatrix& train, const LinearEncoder& encoder) {
  if (train.rows == 0) throw Error(ErrorCode::TooFewRows, "no training rows");
  if (train.cols != encoder.width())
    throw Error(ErrorCode::SchemaMismatch, "encoded matrix width does not match its encoder");
}

}  // namespace detail

// Full-batch gradient descent with backtracking: each epoch starts from the
// configured learning rate and halves it until the objective does not rise.
// Stops when |grad| < tolerance, when no step makes progress, or at
// max_epochs; in the latter cases the best iterate is returned with
// converged = false.
inline LinearModel train_logistic_regression(const EncodedMatrix& train, const LinearEncoder& encoder,
                                             const TrainConfig& cfg = {}) {
  detail::require_linear_input(train, encoder);
  const auto& p = cfg.logistic;
  LinearModel m;
  m.kind = LinearKind::Logistic;
  m.encoder = encoder;
  std::vector<double> w(train.cols, 0.0), gw(train.cols), next_w(train.cols);
  double b = 0, gb = 0;
  double loss = logistic_objective(train, w, b, p.l2);
  m.converged = p.max_epochs == 0;
  std::size_t epoch = 0;
  for (; epoch < p.max_epochs; ++epoch) {
    logistic_gradient(train, w, b, p.l2, gw, gb);
    double norm = gb * gb;
    for (double g : gw) norm += g * g;
    if (std::sqrt(norm) < p.tolerance) {
      m.converged = true;
      break;
    }
    bool moved = false;
    for (double lr = p.learning_rate; lr > p.learning_rate * 1e-12; lr *= 0.5) {
      for (std::size_t c = 0; c < w.size(); ++c) next_w[c] = w[c] - lr * gw[c];
      const double next_b = b - lr * gb;
      const double next_loss = logistic_objective(train, next_w, next_b, p.l2);
      if (!std::isfinite(next_loss))
        throw Error(ErrorCode::NonFiniteLoss, "logistic loss diverged at epoch " + std::to_string(epoch));
      if (next_loss < loss) {
        std::swap(w, next_w);
        b = next_b;
        loss = next_loss;
        moved = true;
        break;
      }
    }
    m.objective_trace.push_back(loss);
    if (!moved) {
      ++epoch;
      break;
    }
  }
  m.epochs_run = epoch;
  m.weights = w;
  m.bias = b;
  return m;
}

// Mistake-driven updates on y in {-1, +1}, exactly `iterations` passes; pass
// e visits rows in the order given by the stream (seed, e).
inline LinearModel train_perceptron(const EncodedMatrix& train, const LinearEncoder& encoder,
                                    const TrainConfig& cfg = {}) {
  detail::require_linear_input(train, encoder);
  LinearModel m;
  m.kind = LinearKind::Perceptron;
  m.encoder = encoder;
  m.weights.assign(train.cols, 0.0);
  std::vector<std::size_t> order(train.rows);
  for (std::size_t epoch = 0; epoch < cfg.perceptron.iterations; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(cfg.seed, {0x9e7ce, epoch}));
    rng.shuffle(std::span<std::size_t>(order));
    std::size_t mistakes = 0;
    for (auto i : order) {
      const double y = train.labels[i] ? 1.0 : -1.0;
      auto r = train.row(i);
      if (y * m.margin_encoded(r) <= 0) {
        for (std::size_t c = 0; c < train.cols; ++c) m.weights[c] += y * r[c];
        m.bias += y;
        ++mistakes;
      }
    }
    m.objective_trace.push_back(static_cast<double>(mistakes));
  }
  m.epochs_run = cfg.perceptron.iterations;
  return m;
}

// lambda/2 (|w|^2 + b^2) + mean hinge loss. The bias is treated as the weight
// of a constant column and regularized with the rest.
inline double hinge_objective(const EncodedMatrix& x, std::span<const double> w, double b, double lambda) {
  double loss = 0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto r = x.row(i);
    double z = b;
    for (std::size_t c = 0; c < x.cols; ++c) z += w[c] * r[c];
    const double y = x.labels[i] ? 1.0 : -1.0;
    loss += std::max(0.0, 1.0 - y * z);
  }
  double reg = b * b;
  for (double v : w) reg += v * v;
  return loss / static_cast<double>(x.rows) + 0.5 * lambda * reg;
}

// Pegasos: step 1/(lambda t) on the regularized hinge loss, one row per
// step. The returned weights are the running average of all iterates;
// objective_trace holds the averaged iterate's objective after each epoch.
inline LinearModel train_linear_svm(const EncodedMatrix& train, const LinearEncoder& encoder,
                                    const TrainConfig& cfg = {}) {
  detail::require_linear_input(train, encoder);
  const double lambda = cfg.svm.lambda;
  if (!(lambda > 0)) throw Error(ErrorCode::InvalidArgument, "svm lambda must be positive");
  LinearModel m;
  m.kind = LinearKind::Hinge;
  m.encoder = encoder;
  std::vector<double> w(train.cols, 0.0), avg(train.cols, 0.0);
  double b = 0, avg_b = 0;
  std::vector<std::size_t> order(train.rows);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < cfg.svm.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(cfg.seed, {0x5f3, epoch}));
    rng.shuffle(std::span<std::size_t>(order));
    for (auto i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      auto r = train.row(i);
      const double y = train.labels[i] ? 1.0 : -1.0;
      double z = b;
      for (std::size_t c = 0; c < train.cols; ++c) z += w[c] * r[c];
      const double shrink = 1.0 - eta * lambda;
      for (auto& v : w) v *= shrink;
      b *= shrink;
      if (y * z < 1) {
        for (std::size_t c = 0; c < train.cols; ++c) w[c] += eta * y * r[c];
        b += eta * y;
      }
      const double frac = 1.0 / static_cast<double>(t);
      for (std::size_t c = 0; c < train.cols; ++c) avg[c] += (w[c] - avg[c]) * frac;
      avg_b += (b - avg_b) * frac;
    }
    const double obj = hinge_objective(train, avg, avg_b, lambda);
    if (!std::isfinite(obj))
      throw Error(ErrorCode::NonFiniteLoss, "hinge objective diverged at epoch " + std::to_string(epoch));
    m.objective_trace.push_back(obj);
  }
  m.epochs_run = cfg.svm.epochs;
  const auto& tr = m.objective_trace;
  m.converged = tr.size() < 2 || std::fabs(tr[tr.size() - 1] - tr[tr.size() - 2]) <=
                                     1e-3 * std::max(1.0, tr[tr.size() - 2]);
  m.weights = std::move(avg);
  m.bias = avg_b;
  return m;
}

}  // namespace riskforge
