// Copyright 2026 The ovrkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ovrkit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ovrkit/error.hpp"
#include "ovrkit/text.hpp"

namespace ovrkit {

BinaryProblem::BinaryProblem(const SparseDataset& data, LabelId label) : data_(&data), label_(label) {
  rows_.resize(data.n_instances());
  std::iota(rows_.begin(), rows_.end(), 0);
  y_.resize(rows_.size());
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    y_[k] = data.has_label(k, label) ? 1 : -1;
    n_positive_ += y_[k] > 0;
  }
}

BinaryProblem::BinaryProblem(const SparseDataset& data, LabelId label, std::vector<std::size_t> rows)
    : data_(&data), label_(label), rows_(std::move(rows)) {
  y_.resize(rows_.size());
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    require(rows_[k] < data.n_instances(), "problem row out of range");
    y_[k] = data.has_label(rows_[k], label) ? 1 : -1;
    n_positive_ += y_[k] > 0;
  }
}

BinaryProblem::BinaryProblem(const SparseDataset& data, std::vector<std::size_t> rows, std::vector<std::int8_t> y)
    : data_(&data), rows_(std::move(rows)), y_(std::move(y)) {
  require(rows_.size() == y_.size(), "rows and signs differ in length");
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    require(rows_[k] < data.n_instances(), "problem row out of range");
    require(y_[k] == 1 || y_[k] == -1, "signs must be +1 or -1");
    n_positive_ += y_[k] > 0;
  }
}

double BinaryModel::decision_value(std::span<const Feature> x) const {
  if (always_negative) return kNegativeSentinel;
  double z = bias + delta;
  for (const auto& f : x) {
    if (f.index >= w.size())
      fail(ErrorCode::kDimension, "feature index " + std::to_string(f.index) + " beyond model dimension " +
                                      std::to_string(w.size()));
    z += w[f.index] * f.value;
  }
  return z;
}

double logistic_loss(double z) {
  if (z >= 0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

namespace {

// 1 / (1 + e^{-z}) without overflow.
double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// Objective over the augmented parameter theta = (w, b). When the bias is
// off, theta = w.
class LogisticObjective {
 public:
  LogisticObjective(const BinaryProblem& problem, LossWeights weights, bool use_bias)
      : problem_(problem), use_bias_(use_bias), n_features_(problem.n_features()) {
    cost_.resize(problem.size());
    for (std::size_t k = 0; k < problem.size(); ++k) cost_[k] = problem.y(k) > 0 ? weights.c_pos : weights.c_neg;
    z_.resize(problem.size());
    curvature_.resize(problem.size());
  }

  std::size_t dim() const { return n_features_ + (use_bias_ ? 1 : 0); }

  double bias_of(std::span<const double> theta) const { return use_bias_ ? theta[n_features_] : 0.0; }

  // Evaluates f and caches margins for grad() / hessian_vector().
  double value(std::span<const double> theta) {
    double f = 0.5 * dot(theta, theta);
    const double b = bias_of(theta);
    for (std::size_t k = 0; k < problem_.size(); ++k) {
      double z = b;
      for (const auto& ft : problem_.x(k)) z += theta[ft.index] * ft.value;
      z_[k] = z;
      f += cost_[k] * logistic_loss(problem_.y(k) * z);
    }
    return f;
  }

  void grad(std::span<const double> theta, std::span<double> g) {
    std::copy(theta.begin(), theta.end(), g.begin());
    for (std::size_t k = 0; k < problem_.size(); ++k) {
      const double yk = problem_.y(k);
      const double s = sigmoid(yk * z_[k]);
      curvature_[k] = cost_[k] * s * (1.0 - s);
      const double coef = cost_[k] * (s - 1.0) * yk;
      for (const auto& ft : problem_.x(k)) g[ft.index] += coef * ft.value;
      if (use_bias_) g[n_features_] += coef;
    }
  }

  // H v = v + X^T D X v, using the curvature from the last grad() call.
  void hessian_vector(std::span<const double> v, std::span<double> out) const {
    std::copy(v.begin(), v.end(), out.begin());
    const double vb = bias_of(v);
    for (std::size_t k = 0; k < problem_.size(); ++k) {
      double xv = vb;
      for (const auto& ft : problem_.x(k)) xv += v[ft.index] * ft.value;
      const double coef = curvature_[k] * xv;
      for (const auto& ft : problem_.x(k)) out[ft.index] += coef * ft.value;
      if (use_bias_) out[n_features_] += coef;
    }
  }

 private:
  const BinaryProblem& problem_;
  bool use_bias_;
  std::size_t n_features_;
  std::vector<double> cost_;
  std::vector<double> z_;
  std::vector<double> curvature_;
};

// Truncated conjugate gradient for H s = -g inside ||s|| <= radius. Returns
// the residual r = -g - H s through `r`.
void trust_region_cg(const LogisticObjective& obj, double radius, std::span<const double> g,
                     std::span<double> s, std::span<double> r) {
  const std::size_t n = g.size();
  std::vector<double> d(n), hd(n);
  std::fill(s.begin(), s.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) r[i] = -g[i];
  std::copy(r.begin(), r.end(), d.begin());
  const double cg_tol = 0.1 * norm(g);
  double rtr = dot(r, r);
  for (std::size_t it = 0; it < 10 * n + 10; ++it) {
    if (std::sqrt(rtr) <= cg_tol) break;
    obj.hessian_vector(d, hd);
    double alpha = rtr / dot(d, hd);
    axpy(alpha, d, s);
    if (norm(s) > radius) {
      // Step back and move to the trust-region boundary along d.
      axpy(-alpha, d, s);
      const double std_ = dot(s, d);
      const double sts = dot(s, s);
      const double dtd = dot(d, d);
      const double dsq = radius * radius;
      const double rad = std::sqrt(std_ * std_ + dtd * (dsq - sts));
      alpha = std_ >= 0 ? (dsq - sts) / (std_ + rad) : (rad - std_) / dtd;
      axpy(alpha, d, s);
      axpy(-alpha, hd, r);
      break;
    }
    axpy(-alpha, hd, r);
    const double rnew = dot(r, r);
    const double beta = rnew / rtr;
    for (std::size_t i = 0; i < n; ++i) d[i] = r[i] + beta * d[i];
    rtr = rnew;
  }
}

void validate(const BinaryProblem& problem, double C, double t, const SolverOptions& options) {
  require(C > 0 && std::isfinite(C), "C must be positive and finite");
  require(t > 0 && t <= 1, "t must lie in (0, 1]");
  require(options.tolerance > 0, "tolerance must be positive");
  require(options.max_iterations > 0, "max_iterations must be positive");
  if (problem.size() == 0) fail(ErrorCode::kInvalidArgument, "binary problem has no instances");
  for (std::size_t k = 0; k < problem.size(); ++k)
    for (const auto& f : problem.x(k))
      if (!std::isfinite(f.value))
        fail(ErrorCode::kInvalidArgument, "non-finite feature value at feature " + std::to_string(f.index));
}

}  // namespace

ObjectiveValue objective_and_gradient(const BinaryProblem& problem, std::span<const double> w, double bias,
                                      LossWeights weights, bool use_bias) {
  require(w.size() == problem.n_features(), "weight vector length differs from n_features");
  LogisticObjective obj(problem, weights, use_bias);
  std::vector<double> theta(w.begin(), w.end());
  if (use_bias) theta.push_back(bias);
  std::vector<double> g(theta.size());
  ObjectiveValue out;
  out.value = obj.value(theta);
  obj.grad(theta, g);
  out.grad_bias = use_bias ? g.back() : 0.0;
  if (use_bias) g.pop_back();
  out.grad_w = std::move(g);
  return out;
}

BinaryModel train_binary(const BinaryProblem& problem, double C, double t, const SolverOptions& options,
                         const BinaryModel* warm_start) {
  return train_binary_weighted(problem, LossWeights::from_ct(C, t), C, t, options, warm_start);
}

BinaryModel train_binary_weighted(const BinaryProblem& problem, LossWeights weights, double C, double t,
                                  const SolverOptions& options, const BinaryModel* warm_start) {
  validate(problem, C, t, options);
  require(weights.c_pos > 0 && weights.c_neg > 0, "class weights must be positive");

  BinaryModel model;
  model.C = C;
  model.t = t;
  model.w.assign(problem.n_features(), 0.0);
  if (problem.n_positive() == 0) {
    model.always_negative = true;
    return model;
  }

  LogisticObjective obj(problem, weights, options.use_bias);
  const std::size_t n = obj.dim();
  std::vector<double> theta(n, 0.0), g(n), s(n), r(n), theta_new(n);

  // |grad f(0)| anchors the relative stopping rule whatever the start point.
  obj.value(theta);
  obj.grad(theta, g);
  const double gnorm0 = norm(g);
  const double target = options.tolerance * std::max(1.0, gnorm0);
  model.diagnostics.initial_gradient_norm = gnorm0;

  if (warm_start && !warm_start->always_negative && warm_start->w.size() == problem.n_features()) {
    std::copy(warm_start->w.begin(), warm_start->w.end(), theta.begin());
    if (options.use_bias) theta[problem.n_features()] = warm_start->bias;
  }

  constexpr double eta0 = 1e-4, eta1 = 0.25, eta2 = 0.75;
  constexpr double sigma1 = 0.25, sigma2 = 0.5, sigma3 = 4.0;

  double f = obj.value(theta);
  obj.grad(theta, g);
  double gnorm = norm(g);
  double radius = gnorm;
  int iter = 0;
  while (gnorm > target && iter < options.max_iterations) {
    trust_region_cg(obj, radius, g, s, r);
    for (std::size_t i = 0; i < n; ++i) theta_new[i] = theta[i] + s[i];
    const double gs = dot(g, s);
    const double prered = -0.5 * (gs - dot(s, r));
    const double fnew = obj.value(theta_new);
    const double actred = f - fnew;
    const double snorm = norm(s);
    if (iter == 0) radius = std::min(radius, snorm);

    const double curv = fnew - f - gs;
    const double alpha = curv <= 0 ? sigma3 : std::max(sigma1, -0.5 * (gs / curv));
    if (actred < eta0 * prered)
      radius = std::min(std::max(alpha, sigma1) * snorm, sigma2 * radius);
    else if (actred < eta1 * prered)
      radius = std::max(sigma1 * radius, std::min(alpha * snorm, sigma2 * radius));
    else if (actred < eta2 * prered)
      radius = std::max(sigma1 * radius, std::min(alpha * snorm, sigma3 * radius));
    else
      radius = std::max(radius, std::min(alpha * snorm, sigma3 * radius));

    ++iter;
    // Close to the optimum the reduction in f drowns in rounding error while
    // the gradient is still accurate; judge such steps by |grad| instead.
    const double noise = 1e-14 * std::max(1.0, std::abs(f));
    if (std::abs(actred) <= noise && std::abs(prered) <= noise) {
      obj.value(theta_new);
      obj.grad(theta_new, r);
      const double rnorm = norm(r);
      if (!(rnorm < gnorm)) {
        // Restore the curvature cache for theta before giving up.
        obj.value(theta);
        obj.grad(theta, g);
        break;
      }
      theta.swap(theta_new);
      f = fnew;
      g.swap(r);
      gnorm = rnorm;
      continue;
    }
    if (actred > eta0 * prered) {
      theta.swap(theta_new);
      f = fnew;
      obj.grad(theta, g);
      gnorm = norm(g);
    }
    // On rejection the curvature cached by the last grad() still belongs to theta.
    if (prered <= 0 && actred <= 0) break;
  }

  model.diagnostics.iterations = iter;
  model.diagnostics.gradient_norm = gnorm;
  if (!(gnorm <= target))
    fail(ErrorCode::kSolver, "solver did not reach |grad| <= " + text::format_double(target) + " after " +
                                 std::to_string(iter) + " iterations (|grad| = " + text::format_double(gnorm) + ")");
  std::copy(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(problem.n_features()), model.w.begin());
  model.bias = obj.bias_of(theta);
  return model;
}

}  // namespace ovrkit
