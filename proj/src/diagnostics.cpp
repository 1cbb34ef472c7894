#include "identlink/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace identlink {

namespace {

double sample_mean(const Vector& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Biased autocovariance at the given lag (1/n normalization).
double autocov(const Vector& x, double mean, std::size_t lag) {
  double s = 0.0;
  for (std::size_t t = 0; t + lag < x.size(); ++t) s += (x[t] - mean) * (x[t + lag] - mean);
  return s / static_cast<double>(x.size());
}

}  // namespace

double effective_sample_size(const Vector& draws, bool* constant_warning) {
  const std::size_t n = draws.size();
  if (n < 10) throw std::invalid_argument("effective_sample_size: need at least 10 draws");
  if (constant_warning) *constant_warning = false;
  auto [lo, hi] = std::minmax_element(draws.begin(), draws.end());
  if (*lo == *hi) {
    if (constant_warning) *constant_warning = true;
    return static_cast<double>(n);
  }
  double mean = sample_mean(draws);
  double gamma0 = autocov(draws, mean, 0);
  // Sum the initial monotone positive sequence of paired
  // autocovariances Gamma_m = gamma_{2m} + gamma_{2m+1}.
  double sigma2 = -gamma0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    double pair = autocov(draws, mean, 2 * m) + autocov(draws, mean, 2 * m + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    sigma2 += 2.0 * pair;
  }
  sigma2 = std::max(sigma2, gamma0 / static_cast<double>(n));
  double ess = static_cast<double>(n) * gamma0 / sigma2;
  return std::min(ess, static_cast<double>(n));
}

double geweke_z(const Vector& draws) {
  const std::size_t n = draws.size();
  if (n < 20) throw std::invalid_argument("geweke_z: need at least 20 draws");
  std::size_t na = std::max<std::size_t>(10, n / 10);
  std::size_t nb = n / 2;
  Vector a(draws.begin(), draws.begin() + na);
  Vector b(draws.end() - nb, draws.end());
  double ma = sample_mean(a), mb = sample_mean(b);
  double va = autocov(a, ma, 0), vb = autocov(b, mb, 0);
  double se2 = va / effective_sample_size(a) + vb / effective_sample_size(b);
  if (se2 == 0.0) return ma == mb ? 0.0 : std::copysign(INFINITY, ma - mb);
  return (ma - mb) / std::sqrt(se2);
}

double quantile(Vector x, double prob) {
  if (x.empty()) throw std::invalid_argument("quantile: empty sample");
  prob = std::clamp(prob, 0.0, 1.0);
  std::sort(x.begin(), x.end());
  double h = prob * static_cast<double>(x.size() - 1);
  std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= x.size()) return x.back();
  double frac = h - static_cast<double>(lo);
  return x[lo] + frac * (x[lo + 1] - x[lo]);
}

ChainSummary summarize(const DrawMatrix& draws) {
  if (draws.rows() == 0) throw std::invalid_argument("summarize: empty draw matrix");
  ChainSummary s;
  s.n_draws = draws.rows();
  s.n_chains = draws.n_chains;
  for (std::size_t j = 0; j < draws.n_params; ++j) {
    CoordinateSummary c;
    c.name = j < draws.param_names.size() ? draws.param_names[j] : "param_" + std::to_string(j);
    Vector pooled = draws.column(j);
    c.mean = sample_mean(pooled);
    c.sd = std::sqrt(autocov(pooled, c.mean, 0));
    c.q025 = quantile(pooled, 0.025);
    c.q50 = quantile(pooled, 0.50);
    c.q975 = quantile(pooled, 0.975);
    double ess_total = 0.0;
    double worst_z = 0.0;
    for (std::uint32_t ch = 0; ch < draws.n_chains; ++ch) {
      Vector series = draws.chain_column(ch, j);
      bool warn = false;
      ess_total += effective_sample_size(series, &warn);
      c.ess_warning = c.ess_warning || warn;
      double z = warn ? 0.0 : geweke_z(series);
      if (std::abs(z) > std::abs(worst_z)) worst_z = z;
    }
    c.ess = ess_total;
    c.mcse = c.sd / std::sqrt(ess_total);
    c.geweke = worst_z;
    s.coords.push_back(std::move(c));
  }
  return s;
}

double ks_statistic(Vector draws, const std::function<double(double)>& cdf) {
  if (draws.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    double f = cdf(draws[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

double two_sample_ks(Vector a, Vector b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("two_sample_ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    double fa = static_cast<double>(i) / static_cast<double>(a.size());
    double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

double ks_critical_value(double alpha, std::size_t n) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

double two_sample_ks_critical_value(double alpha, std::size_t n, std::size_t m) {
  double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(n + m) /
                       (static_cast<double>(n) * static_cast<double>(m)));
}

double gamma_count_cdf(std::int64_t k, double x) {
  if (k < 1) throw std::domain_error("gamma_count_cdf: shape must be a positive integer");
  if (x <= 0.0) return 0.0;
  // 1 - exp(-x) sum_{j<k} x^j / j!, terms in log space
  double logx = std::log(x);
  double tail = 0.0;
  for (std::int64_t j = 0; j < k; ++j)
    tail += std::exp(-x + static_cast<double>(j) * logx - std::lgamma(static_cast<double>(j) + 1.0));
  return std::max(0.0, 1.0 - tail);
}

double GirReport::max_abs_z() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, std::abs(r.z));
  return m;
}

bool GirReport::all_within(double z_max) const {
  for (const auto& r : rows)
    if (!(std::abs(r.z) <= z_max)) return false;
  return true;
}

}  // namespace identlink
