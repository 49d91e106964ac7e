#pragma once

#include <string>

#include <Eigen/Dense>

namespace advr::fusion {

// Feature matrix file layout: the ASCII header line "featmat 1\n", two
// little-endian uint64 values (rows, cols), then rows*cols little-endian
// float64 entries in row-major order.
void save_feature_matrix(const std::string& path, const Eigen::MatrixXd& matrix);

// Throws ConfigError on a bad header, truncation, or non-finite entries.
Eigen::MatrixXd load_feature_matrix(const std::string& path);

}  // namespace advr::fusion
