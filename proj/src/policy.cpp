// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "mapo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "mapo/errors.hpp"

namespace mapo {

Action action_from_index(long long id) {
  if (id < 0 || id >= static_cast<long long>(kNumActions)) {
    throw DomainError("action id " + std::to_string(id) + " out of range");
  }
  return static_cast<Action>(id);
}

const char* action_name(Action a) {
  switch (a) {
    case Action::Cognitive: return "cognitive";
    case Action::Affective: return "affective";
    case Action::Proactive: return "proactive";
    case Action::Probe: return "probe";
  }
  return "unknown";
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw ShapeError("matrix shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

PolicyParams::PolicyParams(Matrix weights, double temperature)
    : weights_(std::move(weights)), temperature_(temperature) {
  if (!(temperature_ > 0.0) || !std::isfinite(temperature_)) {
    throw PolicyError("temperature must be positive and finite");
  }
  if (!weights_.all_finite()) throw PolicyError("policy weights must be finite");
  if (weights_.rows() == 0 || weights_.cols() == 0) throw PolicyError("empty weight matrix");
}

ActionDistribution::ActionDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw PolicyError("empty action distribution");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw PolicyError("probability outside [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw PolicyError("probabilities do not sum to 1");
}

FeatureVector featurize(const HistorySummary& h, const EnvParams& params) {
  FeatureVector f{};
  const double scale = params.init_max;
  f[0] = h.state.x() / scale;
  f[1] = h.state.y() / scale;
  f[2] = h.state.z() / scale;
  f[3] = potential(h.state) / (std::sqrt(3.0) * scale);
  if (h.last_action) f[4 + action_index(*h.last_action)] = 1.0;
  f[8] = static_cast<double>(h.regression_streak) / params.fail_streak;
  f[9] = static_cast<double>(h.turn_index) / params.max_turns;
  f[10] = static_cast<double>(h.repeat_count) / params.max_turns;
  f[11] = 1.0;
  return f;
}

std::vector<double> softmax(std::span<const double> logits, double temperature) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  for (double l : logits) {
    if (!std::isfinite(l)) throw PolicyError("non-finite logit");
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - top) / temperature);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

namespace {

std::vector<double> logits_of(const PolicyParams& theta, std::span<const double> f) {
  const Matrix& w = theta.weights();
  if (f.size() != w.cols()) throw PolicyError("feature dimension does not match policy");
  std::vector<double> logits(w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const auto row = w.row(r);
    logits[r] = std::inner_product(row.begin(), row.end(), f.begin(), 0.0);
  }
  return logits;
}

}  // namespace

ActionDistribution action_probs(const PolicyParams& theta, std::span<const double> features) {
  return ActionDistribution(softmax(logits_of(theta, features), theta.temperature()));
}

std::size_t sample_action(const ActionDistribution& dist, RandomStream& rng) {
  const double u = rng.uniform();
  double cdf = 0.0;
  for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
    cdf += dist[i];
    if (u < cdf) return i;
  }
  return dist.size() - 1;
}

std::size_t greedy_action(const ActionDistribution& dist) {
  const auto& p = dist.probs();
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

Matrix log_prob_grad(const PolicyParams& theta, std::span<const double> features,
                     std::size_t action) {
  const auto dist = action_probs(theta, features);
  if (action >= dist.size()) throw PolicyError("action index out of range");
  Matrix g(theta.num_actions(), theta.feature_dim());
  for (std::size_t b = 0; b < g.rows(); ++b) {
    const double coeff = ((b == action ? 1.0 : 0.0) - dist[b]) / theta.temperature();
    for (std::size_t c = 0; c < g.cols(); ++c) g(b, c) = coeff * features[c];
  }
  return g;
}

void save_policy(std::ostream& out, const PolicyParams& policy) {
  const Matrix& w = policy.weights();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", policy.temperature());
  out << "mapo-policy v1 " << w.rows() << ' ' << w.cols() << ' ' << buf << '\n';
  for (std::size_t r = 0; r < w.rows(); ++r) {
    for (std::size_t c = 0; c < w.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", w(r, c));
      out << (c ? " " : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed to write policy checkpoint");
}

PolicyParams load_policy(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing policy header");
  std::istringstream header(line);
  std::string magic, version;
  long long rows = 0, cols = 0;
  double temperature = 0.0;
  if (!(header >> magic >> version >> rows >> cols >> temperature) || magic != "mapo-policy" ||
      version != "v1" || rows <= 0 || cols <= 0) {
    throw ParseError(1, "expected `mapo-policy v1 <rows> <cols> <temperature>`");
  }
  std::string rest;
  if (header >> rest) throw ParseError(1, "trailing tokens in header");

  Matrix w(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const std::size_t lineno = r + 2;
    if (!std::getline(in, line)) throw ParseError(lineno, "missing weight row");
    std::istringstream row(line);
    for (std::size_t c = 0; c < w.cols(); ++c) {
      if (!(row >> w(r, c))) throw ParseError(lineno, "expected " + std::to_string(cols) + " reals");
    }
    if (row >> rest) throw ParseError(lineno, "too many values in weight row");
  }
  try {
    return PolicyParams(std::move(w), temperature);
  } catch (const PolicyError& e) {
    throw ParseError(1, e.what());
  }
}

}  // namespace mapo
