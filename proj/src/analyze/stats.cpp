#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "lobbylink/analyze.hpp"
#include "lobbylink/error.hpp"
#include "lobbylink/hashing.hpp"

namespace lobbylink::analyze {
namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t nearest(const std::vector<double>& p, const std::vector<std::vector<double>>& centroids, double* dist) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = sq_dist(p, centroids[c]);
    if (d < bd) {  // strict: lowest index wins ties
      bd = d;
      best = c;
    }
  }
  if (dist) *dist = bd;
  return best;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k, std::uint64_t seed,
                    int max_iterations, double tolerance) {
  const std::size_t n = points.size();
  if (k == 0) throw Error(ErrorKind::invalid_argument, "k must be positive");
  if (n < k)
    throw Error(ErrorKind::precondition,
                "k-means needs at least k points (n = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
  const std::size_t d = points.front().size();
  for (const auto& p : points)
    if (p.size() != d) throw Error(ErrorKind::invalid_argument, "points differ in dimension");

  std::mt19937_64 rng(seed);
  KMeansResult r;
  std::vector<char> chosen(n, 0);
  std::size_t first = static_cast<std::size_t>(unit_interval(rng()) * static_cast<double>(n));
  r.centroids.push_back(points[first]);
  chosen[first] = 1;
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(points[i], points[first]);
  while (r.centroids.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = n;
    if (total > 0) {
      const double target = unit_interval(rng()) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (d2[i] > 0 && acc > target) {
          pick = i;
          break;
        }
      }
      if (pick == n)  // rounding at the upper end
        for (std::size_t i = n; i-- > 0;)
          if (d2[i] > 0) {
            pick = i;
            break;
          }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) {
          pick = i;
          break;
        }
    }
    chosen[pick] = 1;
    r.centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(points[i], points[pick]));
  }

  r.assignment.assign(n, 0);
  for (r.iterations = 0; r.iterations < max_iterations;) {
    for (std::size_t i = 0; i < n; ++i) r.assignment[i] = nearest(points[i], r.centroids, nullptr);
    std::vector<std::vector<double>> next(k, std::vector<double>(d, 0.0));
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++count[r.assignment[i]];
      for (std::size_t j = 0; j < d; ++j) next[r.assignment[i]][j] += points[i][j];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] == 0) {
        next[c] = r.centroids[c];  // empty cluster keeps its centroid
      } else {
        for (double& x : next[c]) x /= static_cast<double>(count[c]);
      }
      shift = std::max(shift, std::sqrt(sq_dist(next[c], r.centroids[c])));
    }
    r.centroids = std::move(next);
    ++r.iterations;
    if (shift < tolerance) break;
  }
  r.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dist = 0;
    r.assignment[i] = nearest(points[i], r.centroids, &dist);
    r.inertia += dist;
  }
  return r;
}

ClusterAssignment cluster_lobbies(const std::vector<std::string>& lobby_ids,
                                  const std::vector<std::vector<double>>& vectors, std::size_t k,
                                  std::uint64_t seed, const std::map<std::string, std::string>& labels) {
  if (lobby_ids.size() != vectors.size())
    throw Error(ErrorKind::invalid_argument, "one vector per lobby expected");
  const auto km = kmeans(vectors, k, seed);
  ClusterAssignment out;
  for (std::size_t c = 0; c < k; ++c) {
    char id[32];
    std::snprintf(id, sizeof id, "cluster-%03zu", c);
    auto it = labels.find(id);
    out.label[id] = it != labels.end() ? it->second : id;
  }
  for (std::size_t i = 0; i < lobby_ids.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "cluster-%03zu", km.assignment[i]);
    out.cluster_of[lobby_ids[i]] = id;
  }
  return out;
}

PcaResult pca(const std::vector<std::vector<double>>& rows, std::size_t n_components) {
  if (rows.size() < 2) throw Error(ErrorKind::precondition, "PCA needs at least two rows");
  const std::size_t n = rows.size(), d = rows.front().size();
  if (d == 0) throw Error(ErrorKind::invalid_argument, "PCA rows are empty");
  if (n_components == 0 || n_components > d)
    throw Error(ErrorKind::invalid_argument, "component count must lie in [1, " + std::to_string(d) + "]");
  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != d) throw Error(ErrorKind::invalid_argument, "PCA rows differ in length");
    for (std::size_t j = 0; j < d; ++j) x(i, j) = rows[i][j];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::degenerate, "eigendecomposition failed");

  PcaResult r;
  r.mean.assign(mean.data(), mean.data() + d);
  r.total_variance = cov.trace();
  for (std::size_t c = 0; c < n_components; ++c) {
    const Eigen::Index col = static_cast<Eigen::Index>(d - 1 - c);  // eigenvalues ascend
    Eigen::VectorXd v = es.eigenvectors().col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    r.components.emplace_back(v.data(), v.data() + d);
    r.explained_variance.push_back(es.eigenvalues()(col));
  }
  r.projections.assign(n, std::vector<double>(n_components));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < n_components; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += x(i, j) * r.components[c][j];
      r.projections[i][c] = s;
    }
  return r;
}

std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t k = i;
    while (k < idx.size() && x[idx[k]] == x[idx[i]]) ++k;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(k)) / 2.0;
    for (std::size_t t = i; t < k; ++t) r[idx[t]] = avg;
    i = k;
  }
  return r;
}

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y, std::uint64_t seed) {
  if (x.size() != y.size()) throw Error(ErrorKind::invalid_argument, "spearman inputs differ in length");
  if (x.size() < 3) throw Error(ErrorKind::precondition, "spearman needs at least 3 points");
  auto constant = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double t) { return t == v.front(); });
  };
  if (constant(x) || constant(y)) throw Error(ErrorKind::degenerate, "spearman is undefined for constant input");

  const auto rx = average_ranks(x), ry = average_ranks(y);
  SpearmanResult r;
  r.rho = std::clamp(pearson(rx, ry), -1.0, 1.0);
  const std::size_t n = x.size();
  // Permutation p-values compare |rho| with a small slack for rounding.
  const double observed = std::abs(r.rho) - 1e-12;

  if (n >= 20) {
    r.p_method = "t-approximation";
    if (std::abs(r.rho) >= 1.0) {
      r.p_value = 0.0;
    } else {
      const double df = static_cast<double>(n - 2);
      const double t = r.rho * std::sqrt(df / (1.0 - r.rho * r.rho));
      boost::math::students_t dist(df);
      r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    }
  } else if (n <= 8) {
    r.p_method = "exact-permutation";
    std::vector<double> perm = ry;
    std::sort(perm.begin(), perm.end());
    std::size_t hits = 0, total = 0;
    do {
      ++total;
      hits += std::abs(pearson(rx, perm)) >= observed;
    } while (std::next_permutation(perm.begin(), perm.end()));
    // next_permutation skips duplicate arrangements; every distinct
    // arrangement of tied ranks is equally likely, so the ratio is exact.
    r.p_value = static_cast<double>(hits) / static_cast<double>(total);
  } else {
    r.p_method = "monte-carlo-permutation";
    constexpr std::size_t kSamples = 100000;
    std::mt19937_64 rng(seed);
    std::vector<double> perm = ry;
    std::size_t hits = 0;
    for (std::size_t s = 0; s < kSamples; ++s) {
      for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(unit_interval(rng()) * static_cast<double>(i + 1));
        std::swap(perm[i], perm[j]);
      }
      hits += std::abs(pearson(rx, perm)) >= observed;
    }
    r.p_value = static_cast<double>(hits + 1) / static_cast<double>(kSamples + 1);
  }
  return r;
}

std::vector<CorrelationRow> correlation_table(const FocusMatrix& focus, const PcaResult& pca,
                                              const std::vector<corpus::PoliticalGroup>& groups,
                                              std::uint64_t seed) {
  if (pca.projections.size() != focus.rows.size())
    throw Error(ErrorKind::invalid_argument, "PCA rows do not match focus rows");
  std::vector<CorrelationRow> out;
  const std::size_t n_comp = pca.components.size();
  for (auto dim : {corpus::IdeologyDimension::ideo, corpus::IdeologyDimension::econ, corpus::IdeologyDimension::soc,
                   corpus::IdeologyDimension::eu}) {
    const auto scores = group_scores(focus.columns, groups, dim);
    std::vector<double> ideology;
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < focus.rows.size(); ++i) {
      const auto& row = focus.normalized[i];
      if (std::accumulate(row.begin(), row.end(), 0.0) > 0) {
        ideology.push_back(weighted_ideology(row, scores));
        kept.push_back(i);
      }
    }
    for (std::size_t c = 0; c < n_comp; ++c) {
      std::vector<double> coord;
      for (auto i : kept) coord.push_back(pca.projections[i][c]);
      CorrelationRow row;
      row.component = c;
      row.dimension = dim;
      row.result = spearman(coord, ideology, seed);
      row.significant = row.result.p_value < 1e-4;
      out.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace lobbylink::analyze
