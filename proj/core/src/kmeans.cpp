#include "tomita/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "tomita/common.hpp"
#include "tomita/rng.hpp"

namespace tomita {
namespace {

struct Lloyd {
  std::vector<std::size_t> assignment;
  Eigen::MatrixXd centroids;
  double wcss = 0.0;
};

// Nearest centroid (lowest index on ties) and squared distance.
std::pair<std::size_t, double> nearest(const Eigen::MatrixXd& centroids, const auto& point) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.cols(); ++c) {
    const double d = (centroids.col(c) - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(c);
    }
  }
  return {best, best_d};
}

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& points, std::size_t k, Rng& rng) {
  const auto n = points.cols();
  Eigen::MatrixXd centers(points.rows(), static_cast<Eigen::Index>(k));
  centers.col(0) = points.col(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (points.col(i) - centers.col(0)).squaredNorm();
  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        r -= d2[static_cast<std::size_t>(i)];
        if (r < 0.0 && d2[static_cast<std::size_t>(i)] > 0.0) {
          pick = i;
          break;
        }
      }
      while (d2[static_cast<std::size_t>(pick)] == 0.0 && pick > 0) --pick;
    }
    centers.col(static_cast<Eigen::Index>(c)) = points.col(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& d = d2[static_cast<std::size_t>(i)];
      d = std::min(d, (points.col(i) - centers.col(static_cast<Eigen::Index>(c))).squaredNorm());
    }
  }
  return centers;
}

Lloyd run_lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centroids, std::size_t max_iters) {
  const auto n = static_cast<std::size_t>(points.cols());
  const auto k = static_cast<std::size_t>(centroids.cols());
  Lloyd out;
  out.assignment.assign(n, std::numeric_limits<std::size_t>::max());
  std::vector<double> dist(n);
  for (std::size_t iter = 0; iter < std::max<std::size_t>(max_iters, 1); ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto [c, d] = nearest(centroids, points.col(static_cast<Eigen::Index>(i)));
      dist[i] = d;
      if (out.assignment[i] != c) {
        out.assignment[i] = c;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(points.rows(), static_cast<Eigen::Index>(k));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.col(static_cast<Eigen::Index>(out.assignment[i])) += points.col(static_cast<Eigen::Index>(i));
      ++sizes[out.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) {
        centroids.col(static_cast<Eigen::Index>(c)) = sums.col(static_cast<Eigen::Index>(c)) / static_cast<double>(sizes[c]);
        continue;
      }
      // Empty cluster: move it onto the point farthest from its centroid.
      const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
      centroids.col(static_cast<Eigen::Index>(c)) = points.col(static_cast<Eigen::Index>(far));
      dist[far] = 0.0;
      out.assignment[far] = c;
    }
  }
  out.wcss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.wcss += (points.col(static_cast<Eigen::Index>(i)) -
                 centroids.col(static_cast<Eigen::Index>(out.assignment[i])))
                    .squaredNorm();
  }
  out.centroids = std::move(centroids);
  return out;
}

}  // namespace

std::size_t count_distinct(const Eigen::MatrixXd& points) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(points.cols()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
      if (points(r, a) != points(r, b)) return points(r, a) < points(r, b);
    }
    return false;
  };
  std::sort(idx.begin(), idx.end(), less);
  std::size_t distinct = idx.empty() ? 0 : 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    if (less(idx[i - 1], idx[i])) ++distinct;
  }
  return distinct;
}

KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters, std::size_t restarts) {
  if (points.cols() == 0) throw InputError("k-means needs at least one point");
  if (k == 0) throw InputError("k-means needs k >= 1");
  if (restarts == 0) throw InputError("k-means needs at least one restart");
  const std::size_t effective = std::min(k, count_distinct(points));

  KMeansResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, {r}));
    Lloyd run = run_lloyd(points, seed_plus_plus(points, effective, rng), max_iters);
    if (run.wcss < best.wcss) {
      best.k = effective;
      best.assignment = std::move(run.assignment);
      best.centroids = std::move(run.centroids);
      best.wcss = run.wcss;
      best.restart = r;
    }
  }
  return best;
}

}  // namespace tomita
