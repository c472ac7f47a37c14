#pragma once

// Soft-margin RBF support vector machines trained with SMO, combined
// one-versus-one into a multiclass classifier decided by an elimination walk
// over the pairwise machines.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hpod/error.hpp"
#include "hpod/feature_vector.hpp"

namespace hpod {

/// k(x, y) = exp(-||x - y||^2 / width^2), soft-margin penalty `penalty`.
struct KernelConfig {
  double width = 10.0;
  double penalty = 1024.0;
};

/// Tuned kernel widths per feature kind; the penalty is 1024 throughout.
constexpr KernelConfig default_kernel(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::DFT:
    case FeatureKind::DCT:
      return {28.0, 1024.0};
    case FeatureKind::DWT:
      return {20.0, 1024.0};
    default:
      return {10.0, 1024.0};
  }
}

inline double rbf_kernel(std::span<const double> x, std::span<const double> y,
                         const KernelConfig& k) {
  if (x.size() != y.size()) {
    throw DimensionError("kernel arguments have dimensions " + std::to_string(x.size()) +
                         " and " + std::to_string(y.size()));
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sq += d * d;
  }
  return std::exp(-sq / (k.width * k.width));
}

struct TrainOptions {
  double tol = 1e-3;     // KKT tolerance on y*f(x)
  int max_passes = 200;  // iteration cap, in units of the training-set size
};

/// A two-class machine in dual form. Positive decisions mean `classes.first`.
struct BinarySvm {
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> alphas_signed;  // alpha_k * y_k
  double bias = 0.0;
  std::pair<int, int> classes{1, 2};
  bool converged = false;
  std::size_t iterations = 0;
};

inline double binary_decision(const BinarySvm& m, std::span<const double> x,
                              const KernelConfig& k) {
  double f = m.bias;
  for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
    f += m.alphas_signed[i] * rbf_kernel(m.support_vectors[i], x, k);
  }
  return f;
}

namespace detail {

struct DualSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

// SMO over the dual  min 1/2 a'Qa - e'a,  y'a = 0,  0 <= a <= C,  with
// Q_ij = y_i y_j K_ij. The working pair is the maximal violating index i plus
// the second-order choice of j; iteration stops once the largest KKT
// violation falls under `eps`. Deterministic: no random pair selection.
//
// `kernel(i, j)` returns K_ij for training indices i, j.
template <typename KernelFn>
DualSolution solve_dual(std::span<const int> y, KernelFn kernel, double c, double eps,
                        std::size_t max_iterations) {
  const std::size_t n = y.size();
  constexpr double kTau = 1e-12;
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      q[i][j] = q[j][i] = static_cast<double>(y[i] * y[j]) * kernel(i, j);
    }
  }

  DualSolution sol;
  sol.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);
  auto& a = sol.alpha;
  auto in_up = [&](std::size_t t) { return (y[t] > 0 && a[t] < c) || (y[t] < 0 && a[t] > 0.0); };
  auto in_low = [&](std::size_t t) { return (y[t] > 0 && a[t] > 0.0) || (y[t] < 0 && a[t] < c); };

  while (true) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * grad[t] > gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
    }
    double gmin = std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[t] * grad[t];
      gmin = std::min(gmin, v);
      if (i < n && v < gmax) {
        const double b = gmax - v;
        double quad = q[i][i] + q[t][t] - 2.0 * y[i] * y[t] * q[i][t];
        if (quad <= 0.0) quad = kTau;
        const double obj = -(b * b) / quad;
        if (obj < best) {
          best = obj;
          j = t;
        }
      }
    }
    if (i == n || j == n || gmax - gmin < eps) {
      sol.converged = true;
      break;
    }
    if (sol.iterations >= max_iterations) break;
    ++sol.iterations;

    const double old_ai = a[i];
    const double old_aj = a[j];
    if (y[i] != y[j]) {
      double quad = q[i][i] + q[j][j] + 2.0 * q[i][j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0.0) {
        if (a[j] < 0.0) { a[j] = 0.0; a[i] = diff; }
      } else {
        if (a[i] < 0.0) { a[i] = 0.0; a[j] = -diff; }
      }
      if (diff > 0.0) {
        if (a[i] > c) { a[i] = c; a[j] = c - diff; }
      } else {
        if (a[j] > c) { a[j] = c; a[i] = c + diff; }
      }
    } else {
      double quad = q[i][i] + q[j][j] - 2.0 * q[i][j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > c) {
        if (a[i] > c) { a[i] = c; a[j] = sum - c; }
      } else {
        if (a[j] < 0.0) { a[j] = 0.0; a[i] = sum; }
      }
      if (sum > c) {
        if (a[j] > c) { a[j] = c; a[i] = sum - c; }
      } else {
        if (a[i] < 0.0) { a[i] = 0.0; a[j] = sum; }
      }
    }
    const double dai = a[i] - old_ai;
    const double daj = a[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += q[i][t] * dai + q[j][t] * daj;
  }

  // Bias from the free vectors, or the middle of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (a[t] >= c) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (a[t] <= 0.0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  sol.bias = -rho;
  return sol;
}

}  // namespace detail

/// Trains a machine separating `pos` (decision > 0) from `neg`. The result is
/// flagged unconverged if the iteration cap is hit first.
inline BinarySvm smo_train(std::span<const std::vector<double>> pos,
                           std::span<const std::vector<double>> neg, const KernelConfig& k,
                           const TrainOptions& opt = {}) {
  if (pos.empty() || neg.empty()) throw TrainingError("smo_train: both classes need samples");
  if (!(k.width > 0.0) || !(k.penalty > 0.0)) {
    throw DomainError("kernel width and penalty must be positive");
  }
  std::vector<const std::vector<double>*> xs;
  std::vector<int> y;
  for (const auto& v : pos) { xs.push_back(&v); y.push_back(1); }
  for (const auto& v : neg) { xs.push_back(&v); y.push_back(-1); }
  const std::size_t dim = xs.front()->size();
  for (const auto* v : xs) {
    if (v->size() != dim) throw DimensionError("smo_train: inconsistent sample dimensions");
  }

  const auto sol = detail::solve_dual(
      y, [&](std::size_t i, std::size_t j) { return rbf_kernel(*xs[i], *xs[j], k); },
      k.penalty, opt.tol / 2.0,
      static_cast<std::size_t>(opt.max_passes) * std::max<std::size_t>(xs.size(), 1));

  BinarySvm m;
  m.bias = sol.bias;
  m.converged = sol.converged;
  m.iterations = sol.iterations;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    if (sol.alpha[t] > 0.0) {
      m.support_vectors.push_back(*xs[t]);
      m.alphas_signed.push_back(sol.alpha[t] * y[t]);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Multiclass

/// One pairwise machine inside an SvmModel. Support vectors are indices into
/// the model's shared vector pool, since a training sample is a support
/// vector of many pairs.
struct PairwiseMachine {
  int first = 1;   // lower class id, chosen on a positive decision
  int second = 2;
  std::vector<std::uint32_t> support;
  std::vector<double> coef;  // alpha * y per support vector
  double bias = 0.0;
  bool converged = true;

  friend bool operator==(const PairwiseMachine&, const PairwiseMachine&) = default;
};

struct SvmModel {
  FeatureKind kind = FeatureKind::HPOD;
  KernelConfig kernel;
  std::vector<std::string> labels;  // class id k has display name labels[k - 1]
  std::vector<std::vector<double>> vectors;
  std::vector<PairwiseMachine> machines;  // ordered (1,2), (1,3), ..., (N-1,N)

  int n_classes() const { return static_cast<int>(labels.size()); }

  std::size_t dim() const { return expected_dim(kind); }

  /// Machine for class ids i < j.
  const PairwiseMachine& machine(int i, int j) const {
    const int n = n_classes();
    if (i < 1 || j <= i || j > n) throw IntegrityError("no machine for an invalid class pair");
    const auto idx = static_cast<std::size_t>((i - 1) * (2 * n - i) / 2 + (j - i - 1));
    if (idx >= machines.size() || machines[idx].first != i || machines[idx].second != j) {
      throw IntegrityError("model is missing the machine for classes " + std::to_string(i) +
                           " and " + std::to_string(j));
    }
    return machines[idx];
  }

  std::optional<int> class_id(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) return std::nullopt;
    return static_cast<int>(it - labels.begin()) + 1;
  }

  friend bool operator==(const SvmModel& a, const SvmModel& b) {
    return a.kind == b.kind && a.kernel.width == b.kernel.width &&
           a.kernel.penalty == b.kernel.penalty && a.labels == b.labels &&
           a.vectors == b.vectors && a.machines == b.machines;
  }
};

/// Checks a query vector against the model and memoizes its kernel values
/// against the shared pool.
class DecisionContext {
 public:
  DecisionContext(const SvmModel& model, const FeatureVector& x) : model_(model), x_(x) {
    if (x.kind != model.kind) {
      throw UsageError("model expects " + std::string(to_string(model.kind)) +
                       " features, got " + std::string(to_string(x.kind)));
    }
    if (x.dim() != model.dim()) {
      throw UsageError("model expects dimension " + std::to_string(model.dim()) + ", got " +
                       std::to_string(x.dim()));
    }
    cache_.assign(model.vectors.size(), std::numeric_limits<double>::quiet_NaN());
  }

  double decision(const PairwiseMachine& m) {
    ++evaluations_;
    double f = m.bias;
    for (std::size_t k = 0; k < m.support.size(); ++k) {
      double& kv = cache_[m.support[k]];
      if (std::isnan(kv)) kv = rbf_kernel(model_.vectors[m.support[k]], x_.values, model_.kernel);
      f += m.coef[k] * kv;
    }
    return f;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const SvmModel& model_;
  const FeatureVector& x_;
  std::vector<double> cache_;
  std::size_t evaluations_ = 0;
};

/// Elimination walk: start with (k, j) = (1, 2); a positive decision keeps k,
/// otherwise k becomes j; then j = max(k, j) + 1 until j passes the last
/// class. Exactly n_classes - 1 machine evaluations. Returns the class id.
inline int ddag_predict(const SvmModel& model, const FeatureVector& x,
                        std::size_t* evaluations = nullptr) {
  const int n = model.n_classes();
  if (n < 2) throw IntegrityError("model has fewer than two classes");
  DecisionContext ctx(model, x);
  int k = 1;
  for (int j = 2; j <= n; ++j) {
    if (!(ctx.decision(model.machine(k, j)) > 0.0)) k = j;
  }
  if (evaluations) *evaluations = ctx.evaluations();
  return k;
}

struct ClassVotes {
  int class_id = 0;
  int votes = 0;
};

/// Every pairwise machine votes for one of its two classes; classes sorted by
/// votes, ties broken by lower class id.
inline std::vector<ClassVotes> rank_by_votes(const SvmModel& model, const FeatureVector& x) {
  DecisionContext ctx(model, x);
  std::vector<ClassVotes> out;
  for (int c = 1; c <= model.n_classes(); ++c) out.push_back({c, 0});
  for (const auto& m : model.machines) {
    ++out[static_cast<std::size_t>((ctx.decision(m) > 0.0 ? m.first : m.second) - 1)].votes;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ClassVotes& a, const ClassVotes& b) { return a.votes > b.votes; });
  return out;
}

namespace detail {

inline std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace detail

/// One SMO problem per unordered class pair, each on that pair's samples only.
/// `class_names` fixes the class ids (id k is class_names[k - 1]).
inline SvmModel train_multiclass(std::span<const FeatureVector> samples,
                                 std::span<const std::string> sample_labels,
                                 std::vector<std::string> class_names, const KernelConfig& k,
                                 const TrainOptions& opt = {}) {
  if (samples.size() != sample_labels.size()) {
    throw DimensionError("train_multiclass: sample and label counts differ");
  }
  if (class_names.size() < 2) throw TrainingError("training needs at least two classes");
  if (samples.empty()) throw TrainingError("training set is empty");
  const FeatureKind kind = samples.front().kind;
  for (const auto& s : samples) {
    if (s.kind != kind) throw UsageError("training set mixes feature kinds");
    check_dim(s);
  }

  std::map<std::string, int> id_of;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    id_of.emplace(class_names[c], static_cast<int>(c) + 1);
  }
  std::vector<std::vector<std::size_t>> members(class_names.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto it = id_of.find(sample_labels[s]);
    if (it == id_of.end()) throw TrainingError("sample label '" + sample_labels[s] + "' is not a known class");
    members[static_cast<std::size_t>(it->second - 1)].push_back(s);
  }
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].empty()) throw TrainingError("class '" + class_names[c] + "' has no training samples");
  }

  // Each sample takes part in n_classes - 1 pairwise problems, so kernel
  // values are shared through one Gram matrix when it fits comfortably.
  constexpr std::size_t kMaxSharedGram = 4096;
  const std::size_t n = samples.size();
  std::vector<double> gram;
  if (n <= kMaxSharedGram) {
    gram.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        gram[i * n + j] = gram[j * n + i] = rbf_kernel(samples[i].values, samples[j].values, k);
      }
    }
  }
  auto kernel_at = [&](std::size_t a, std::size_t b) {
    return gram.empty() ? rbf_kernel(samples[a].values, samples[b].values, k) : gram[a * n + b];
  };

  SvmModel model;
  model.kind = kind;
  model.kernel = k;
  model.labels = std::move(class_names);
  std::vector<std::int64_t> pool_slot(n, -1);
  const int nc = model.n_classes();
  for (int ci = 1; ci <= nc; ++ci) {
    for (int cj = ci + 1; cj <= nc; ++cj) {
      std::vector<std::size_t> idx = members[static_cast<std::size_t>(ci - 1)];
      const auto& b = members[static_cast<std::size_t>(cj - 1)];
      std::vector<int> y(idx.size(), 1);
      idx.insert(idx.end(), b.begin(), b.end());
      y.resize(idx.size(), -1);
      const auto sol = detail::solve_dual(
          y, [&](std::size_t i, std::size_t j) { return kernel_at(idx[i], idx[j]); }, k.penalty,
          opt.tol / 2.0, static_cast<std::size_t>(opt.max_passes) * idx.size());

      PairwiseMachine m;
      m.first = ci;
      m.second = cj;
      m.bias = sol.bias;
      m.converged = sol.converged;
      for (std::size_t t = 0; t < idx.size(); ++t) {
        if (!(sol.alpha[t] > 0.0)) continue;
        auto& slot = pool_slot[idx[t]];
        if (slot < 0) {
          slot = static_cast<std::int64_t>(model.vectors.size());
          model.vectors.push_back(samples[idx[t]].values);
        }
        m.support.push_back(static_cast<std::uint32_t>(slot));
        m.coef.push_back(sol.alpha[t] * y[t]);
      }
      model.machines.push_back(std::move(m));
    }
  }
  return model;
}

/// Class ids are assigned in sorted label order.
inline SvmModel train_multiclass(std::span<const FeatureVector> samples,
                                 std::span<const std::string> sample_labels,
                                 const KernelConfig& k, const TrainOptions& opt = {}) {
  return train_multiclass(samples, sample_labels,
                          detail::sorted_unique({sample_labels.begin(), sample_labels.end()}), k,
                          opt);
}

struct EvaluationReport {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  // confusion[true_id - 1][predicted_id - 1]
  std::vector<std::vector<std::size_t>> confusion;
};

inline EvaluationReport evaluate_accuracy(const SvmModel& model,
                                          std::span<const FeatureVector> samples,
                                          std::span<const std::string> labels) {
  if (samples.empty()) throw UsageError("evaluation set is empty");
  if (samples.size() != labels.size()) {
    throw DimensionError("evaluate_accuracy: sample and label counts differ");
  }
  const auto nc = static_cast<std::size_t>(model.n_classes());
  EvaluationReport r;
  r.total = samples.size();
  r.confusion.assign(nc, std::vector<std::size_t>(nc, 0));
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto truth = model.class_id(labels[s]);
    if (!truth) throw UsageError("test label '" + labels[s] + "' is unknown to the model");
    const int pred = ddag_predict(model, samples[s]);
    ++r.confusion[static_cast<std::size_t>(*truth - 1)][static_cast<std::size_t>(pred - 1)];
    if (pred == *truth) ++r.correct;
  }
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.total);
  return r;
}

}  // namespace hpod
