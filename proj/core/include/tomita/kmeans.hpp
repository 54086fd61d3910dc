#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace tomita {

struct KMeansResult {
  std::size_t k = 0;                   ///< clusters actually used
  std::vector<std::size_t> assignment;  ///< cluster of every point
  Eigen::MatrixXd centroids;            ///< dim × k
  double wcss = 0.0;                    ///< within-cluster sum of squares
  std::size_t restart = 0;              ///< index of the winning restart
};

/// Number of pairwise distinct columns.
std::size_t count_distinct(const Eigen::MatrixXd& points);

/// Lloyd's algorithm on the columns of `points` with k-means++ seeding and
/// Euclidean distance. Each restart draws its own seeding; the restart with
/// the lowest WCSS wins (ties to the lower index). A cluster that empties
/// during an iteration is re-seeded with the point farthest from its
/// centroid. When fewer than k distinct points exist, k is reduced to the
/// distinct count. Deterministic in `seed`.
KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters, std::size_t restarts);

}  // namespace tomita
