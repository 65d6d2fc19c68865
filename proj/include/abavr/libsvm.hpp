#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "abavr/nonconvex_logreg.hpp"

namespace abavr {

/// Malformed input; line() is 1-based (0 when not tied to a line).
class LibsvmError : public std::runtime_error {
 public:
  LibsvmError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct LibsvmData {
  SparseMatrix features;
  /// In {-1, +1}.
  std::vector<double> labels;
};

struct LibsvmOptions {
  /// Min-max scale every feature column to [-1, 1] (implicit zeros included).
  bool scale = false;
  /// Lower bound on the inferred dimension (max index otherwise).
  std::size_t min_dim = 0;
};

/// Lines `<label> <idx>:<val> ...` with 1-based strictly ascending indices.
/// Blank lines and '#' comments are skipped. With exactly two distinct raw
/// labels the larger maps to +1 and the smaller to -1 (so 0/1 and -1/+1 both
/// work); otherwise a label maps to +1 iff it is positive.
LibsvmData parse_libsvm(std::istream& in, const LibsvmOptions& opts = {});
LibsvmData load_libsvm(const std::string& path, const LibsvmOptions& opts = {});

}  // namespace abavr
