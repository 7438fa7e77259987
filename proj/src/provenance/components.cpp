#include "scorelens/provenance/components.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scorelens/error.hpp"

namespace scorelens::provenance {

SymmetricEigen symmetric_eigen(const std::vector<double>& matrix, std::size_t n) {
  if (matrix.size() != n * n) throw InvalidArgument("matrix is not n x n");
  std::vector<double> a = matrix;
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
    return s;
  };
  double scale = 0.0;
  for (const double x : a) scale += x * x;

  for (int sweep = 0; sweep < 100 && off_norm() > 1e-30 * std::max(scale, 1e-300); ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x * n + x] > a[y * n + y]; });
  SymmetricEigen out;
  for (const auto i : order) {
    out.values.push_back(a[i * n + i]);
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k * n + i];
    out.vectors.push_back(std::move(col));
  }
  return out;
}

namespace {

double sample_sd(const std::vector<double>& x, double mean) {
  double s = 0.0;
  for (const double v : x) s += (v - mean) * (v - mean);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double mean_of(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); }

}  // namespace

ComponentScores derive_component_scores(const std::vector<Rubric>& rubric) {
  constexpr std::size_t m = kRubricCriteria;
  const std::size_t n = rubric.size();
  if (n < 3) throw InvalidArgument("component derivation needs at least 3 rubric rows");

  Rubric means{};
  for (const auto& row : rubric)
    for (std::size_t j = 0; j < m; ++j) means[j] += row[j];
  for (auto& mu : means) mu /= static_cast<double>(n);

  std::vector<double> centered(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) centered[i * m + j] = rubric[i][j] - means[j];

  std::vector<double> cov(m * m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) cov[a * m + b] += centered[i * m + a] * centered[i * m + b];
  for (auto& c : cov) c /= static_cast<double>(n - 1);
  for (std::size_t j = 0; j < m; ++j) {
    if (!(cov[j * m + j] > 1e-12)) {
      throw InvalidArgument("degenerate rubric criterion: " + std::string(kRubricNames[j]) + " has zero variance");
    }
  }

  const auto eig = symmetric_eigen(cov, m);

  std::vector<double> row_mean(n);
  for (std::size_t i = 0; i < n; ++i) {
    row_mean[i] = std::accumulate(rubric[i].begin(), rubric[i].end(), 0.0) / static_cast<double>(m);
  }
  const double row_mean_mean = mean_of(row_mean);

  struct Kept {
    Rubric loading{};
    std::vector<double> z;
    double variance = 0.0;
  };
  std::array<Kept, 2> kept;
  for (std::size_t c = 0; c < 2; ++c) {
    auto& k = kept[c];
    k.variance = eig.values[c];
    for (std::size_t j = 0; j < m; ++j) k.loading[j] = eig.vectors[c][j];
    std::vector<double> proj(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) proj[i] += centered[i * m + j] * k.loading[j];
    const double pm = mean_of(proj);
    double cov_with_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) cov_with_mean += (proj[i] - pm) * (row_mean[i] - row_mean_mean);
    if (cov_with_mean < 0) {
      for (auto& x : proj) x = -x;
      for (auto& l : k.loading) l = -l;
    }
    const double mu = mean_of(proj);
    const double sd = sample_sd(proj, mu);
    if (!(sd > 0)) throw InvalidArgument("degenerate rubric criterion: component has zero variance");
    k.z.resize(n);
    for (std::size_t i = 0; i < n; ++i) k.z[i] = (proj[i] - mu) / sd;
  }

  auto content_mass = [](const Rubric& l) {
    return std::fabs(l[0]) + std::fabs(l[1]) + std::fabs(l[2]) + std::fabs(l[3]);
  };
  const std::size_t ci = content_mass(kept[1].loading) > content_mass(kept[0].loading) ? 1 : 0;
  const std::size_t wi = 1 - ci;

  ComponentScores out;
  out.content = std::move(kept[ci].z);
  out.wording = std::move(kept[wi].z);
  out.content_loading = kept[ci].loading;
  out.wording_loading = kept[wi].loading;
  out.explained_variance = {kept[ci].variance, kept[wi].variance};
  return out;
}

}  // namespace scorelens::provenance
