#pragma once

// Cellular-automaton reservoir with a trained linear readout.
//
//   x_{n+1} = f(W x_n + B z_n)     f: I steps of the CA, W the CA update,
//                                  B overwrites mapped cells with input bits
//   y_n     = g(C_out [x_n; z_n])  g: sign
//
// x_n is the delay vector of the I snapshots taken after input n. Features
// enter the readout in bipolar form (bit b -> 2b - 1). There is no output
// feedback.

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sigcomp/ca.hpp"
#include "sigcomp/error.hpp"

namespace sigcomp::reservoir {

struct Config {
  std::uint64_t rule = 110;
  std::size_t neighborhood = 3;
  std::size_t width = 128;
  std::size_t iters = 4;
  std::uint64_t seed = 1;
  double lambda = 1e-6;
  std::size_t inputs = 1;  ///< input bits per step
  std::size_t inject = 0;  ///< lattice cells driven by each input bit; 0 means width / (2 * inputs)

  bool operator==(const Config&) const = default;
};

struct ReservoirState {
  Config config;
  ca::CaRule rule{110, 3};
  ca::Lattice lattice;
  std::vector<std::vector<std::size_t>> injection;  ///< B: cells per input bit
  std::vector<ca::Lattice> history;                 ///< all snapshots, I per input
  std::vector<std::vector<std::uint8_t>> input_history;
  Eigen::VectorXd readout;  ///< C_out; empty means all zeros
  int tie_class = 1;        ///< g(0)

  std::size_t feature_dim() const { return config.iters * config.width + config.inputs; }
};

/// Seeded initial lattice and a random injection map without repeated cells.
inline ReservoirState make_reservoir(const Config& cfg) {
  if (cfg.width < cfg.neighborhood) throw DimensionError("lattice narrower than the neighborhood");
  if (cfg.iters == 0 || cfg.inputs == 0) throw DimensionError("need at least one iteration and input");
  const std::size_t fan_out = cfg.inject ? cfg.inject : std::max<std::size_t>(1, cfg.width / (2 * cfg.inputs));
  if (cfg.inputs * fan_out > cfg.width) throw DimensionError("injection needs more cells than the lattice has");
  ReservoirState st;
  st.config = cfg;
  st.rule = ca::CaRule(cfg.rule, cfg.neighborhood);
  std::mt19937_64 rng(cfg.seed);
  st.lattice.resize(cfg.width);
  for (auto& c : st.lattice) c = static_cast<std::uint8_t>(rng() & 1U);
  std::vector<std::size_t> cells(cfg.width);
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  std::shuffle(cells.begin(), cells.end(), rng);
  st.injection.resize(cfg.inputs);
  for (std::size_t b = 0; b < cfg.inputs; ++b)
    st.injection[b].assign(cells.begin() + static_cast<std::ptrdiff_t>(b * fan_out),
                           cells.begin() + static_cast<std::ptrdiff_t>((b + 1) * fan_out));
  return st;
}

/// Bipolar [x_n; z_n] for the most recent input step.
inline Eigen::VectorXd features(const ReservoirState& st) {
  const auto& cfg = st.config;
  if (st.input_history.empty()) throw DimensionError("no input has been applied yet");
  Eigen::VectorXd f(st.feature_dim());
  const std::size_t first = st.history.size() - cfg.iters;
  Eigen::Index k = 0;
  for (std::size_t s = 0; s < cfg.iters; ++s)
    for (std::uint8_t bit : st.history[first + s]) f[k++] = bit ? 1.0 : -1.0;
  for (std::uint8_t bit : st.input_history.back()) f[k++] = bit ? 1.0 : -1.0;
  return f;
}

inline int apply_readout(const ReservoirState& st, const Eigen::VectorXd& f) {
  if (st.readout.size() == 0) return st.tie_class;
  if (st.readout.size() != f.size()) throw DimensionError("readout width does not match features");
  const double u = st.readout.dot(f);
  if (u > 0.0) return 1;
  if (u < 0.0) return -1;
  return st.tie_class;
}

/// Injects z, runs I CA steps, appends the snapshots and returns y_n.
inline int rc_update(ReservoirState& st, std::span<const std::uint8_t> z) {
  if (z.size() != st.injection.size())
    throw DimensionError("input width " + std::to_string(z.size()) + " does not match B (" +
                         std::to_string(st.injection.size()) + ")");
  for (std::size_t b = 0; b < z.size(); ++b)
    for (std::size_t cell : st.injection[b]) st.lattice[cell] = z[b] ? 1 : 0;
  for (std::size_t s = 0; s < st.config.iters; ++s) {
    st.lattice = ca::ca_step_conv(st.lattice, st.rule);
    st.history.push_back(st.lattice);
  }
  st.input_history.emplace_back(z.begin(), z.end());
  return apply_readout(st, features(st));
}

struct TrainResult {
  Eigen::VectorXd weights;
  double train_mse = 0.0;
  double objective = 0.0;  ///< ||t - X w||^2 + λ||w||^2
  Eigen::Index rank = 0;
  bool rank_deficient = false;
};

inline double ridge_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                              const Eigen::VectorXd& w, double lambda) {
  return (t - x * w).squaredNorm() + lambda * w.squaredNorm();
}

/// Ridge regression: w = (XᵀX + λI)⁻¹ Xᵀt. Rows of `x` are samples.
inline TrainResult train_readout(const Eigen::MatrixXd& x, const Eigen::VectorXd& targets,
                                 double lambda) {
  if (x.rows() == 0) throw DimensionError("need at least one training sample");
  if (x.rows() != targets.size()) throw DimensionError("sample and target counts differ");
  if (!(lambda > 0.0)) throw RangeError("ridge parameter must be positive");
  const Eigen::MatrixXd gram = x.transpose() * x;
  Eigen::MatrixXd reg = gram;
  reg.diagonal().array() += lambda;
  TrainResult r;
  r.weights = reg.ldlt().solve(x.transpose() * targets);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
  qr.setThreshold(1e-10);
  r.rank = qr.rank();
  r.rank_deficient = r.rank < x.cols();
  r.train_mse = (targets - x * r.weights).squaredNorm() / static_cast<double>(x.rows());
  r.objective = ridge_objective(x, targets, r.weights, lambda);
  return r;
}

enum class TaskKind { Parity, Memory };

/// parity(lag): XOR of the last `lag` inputs. memory(delay): the input
/// `delay` steps back.
struct Task {
  TaskKind kind = TaskKind::Parity;
  std::size_t param = 2;

  static Task parity(std::size_t lag) { return {TaskKind::Parity, lag}; }
  static Task memory(std::size_t delay) { return {TaskKind::Memory, delay}; }

  int target(const std::vector<std::uint8_t>& z, std::size_t n) const {
    auto at = [&](std::size_t back) -> unsigned { return back <= n ? z[n - back] : 0U; };
    unsigned bit = 0;
    if (kind == TaskKind::Parity) {
      for (std::size_t b = 0; b < param; ++b) bit ^= at(b);
    } else {
      bit = at(param);
    }
    return bit ? 1 : -1;
  }
};

struct TaskReport {
  double accuracy = 0.0;
  double baseline = 0.0;  ///< always predicting the training majority class
  double margin = 0.0;
  std::size_t train = 0;
  std::size_t test = 0;
  bool rank_deficient = false;
};

struct TaskData {
  Eigen::MatrixXd features;  ///< one row per input step
  Eigen::VectorXd targets;
  std::vector<std::uint8_t> inputs;
};

/// Drives a fresh reservoir with seeded random bits (single input channel).
inline TaskData collect(const Config& cfg, const Task& task, std::uint64_t seed,
                        std::size_t steps) {
  if (cfg.inputs != 1) throw DimensionError("tasks use a single input channel");
  ReservoirState st = make_reservoir(cfg);
  std::mt19937_64 rng(seed);
  TaskData d;
  d.inputs.resize(steps);
  for (auto& b : d.inputs) b = static_cast<std::uint8_t>(rng() & 1U);
  d.features.resize(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(st.feature_dim()));
  d.targets.resize(static_cast<Eigen::Index>(steps));
  for (std::size_t n = 0; n < steps; ++n) {
    const std::uint8_t z = d.inputs[n];
    rc_update(st, std::span<const std::uint8_t>(&z, 1));
    d.features.row(static_cast<Eigen::Index>(n)) = features(st).transpose();
    d.targets[static_cast<Eigen::Index>(n)] = task.target(d.inputs, n);
  }
  return d;
}

/// Trains on the first `train` steps and scores the following `test` steps.
inline TaskReport evaluate_task(const Config& cfg, const Task& task, std::uint64_t seed,
                                std::size_t train, std::size_t test, bool trained = true) {
  if (train == 0 || test == 0) throw DimensionError("need non-empty train and test splits");
  const TaskData d = collect(cfg, task, seed, train + test);
  const auto ntr = static_cast<Eigen::Index>(train);
  const auto nte = static_cast<Eigen::Index>(test);
  const Eigen::MatrixXd xtr = d.features.topRows(ntr);
  const Eigen::VectorXd ttr = d.targets.head(ntr);

  ReservoirState scorer;
  scorer.config = cfg;
  const Eigen::Index positives = (ttr.array() > 0.0).count();
  scorer.tie_class = 2 * positives >= ntr ? 1 : -1;

  TaskReport rep;
  rep.train = train;
  rep.test = test;
  if (trained) {
    const TrainResult tr = train_readout(xtr, ttr, cfg.lambda);
    scorer.readout = tr.weights;
    rep.rank_deficient = tr.rank_deficient;
  }
  std::size_t hits = 0, base_hits = 0;
  for (Eigen::Index n = ntr; n < ntr + nte; ++n) {
    const int y = apply_readout(scorer, d.features.row(n).transpose());
    const int t = static_cast<int>(d.targets[n]);
    hits += y == t;
    base_hits += scorer.tie_class == t;
  }
  rep.accuracy = static_cast<double>(hits) / static_cast<double>(test);
  rep.baseline = static_cast<double>(base_hits) / static_cast<double>(test);
  rep.margin = rep.accuracy - rep.baseline;
  return rep;
}

}  // namespace sigcomp::reservoir
