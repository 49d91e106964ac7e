#include "advr/fusion_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "advr/errors.hpp"

namespace advr::fusion {

namespace {

constexpr char kMagic[] = "featmat 1\n";
constexpr std::size_t kMagicLen = sizeof(kMagic) - 1;

}  // namespace

void save_feature_matrix(const std::string& path, const Eigen::MatrixXd& matrix) {
  if (!matrix.allFinite()) throw ConfigError(path, "entries must be finite");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path, "cannot open for writing");
  out.write(kMagic, static_cast<std::streamsize>(kMagicLen));
  std::uint64_t dims[2] = {static_cast<std::uint64_t>(matrix.rows()),
                           static_cast<std::uint64_t>(matrix.cols())};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  // Row-major on disk regardless of Eigen's in-memory layout.
  std::vector<double> row(static_cast<std::size_t>(matrix.cols()));
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) row[static_cast<std::size_t>(j)] = matrix(i, j);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!out) throw ConfigError(path, "write failed");
}

Eigen::MatrixXd load_feature_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open for reading");
  char magic[kMagicLen];
  in.read(magic, static_cast<std::streamsize>(kMagicLen));
  if (!in || std::memcmp(magic, kMagic, kMagicLen) != 0) {
    throw ConfigError(path, "not a feature matrix file");
  }
  std::uint64_t dims[2];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in) throw ConfigError(path, "truncated header");
  constexpr std::uint64_t kMaxDim = 1u << 24;
  if (dims[0] > kMaxDim || dims[1] > kMaxDim) throw ConfigError(path, "implausible dimensions");
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(dims[0]), static_cast<Eigen::Index>(dims[1]));
  std::vector<double> row(static_cast<std::size_t>(dims[1]));
  for (std::uint64_t i = 0; i < dims[0]; ++i) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!in) throw ConfigError(path, "truncated data");
    for (std::uint64_t j = 0; j < dims[1]; ++j) {
      matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          row[static_cast<std::size_t>(j)];
    }
  }
  if (!matrix.allFinite()) throw ConfigError(path, "entries must be finite");
  return matrix;
}

}  // namespace advr::fusion
