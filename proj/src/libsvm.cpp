#include "abavr/libsvm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <string_view>

namespace abavr {

LibsvmError::LibsvmError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view tok, std::size_t line, const char* what) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw LibsvmError(line, std::string("invalid ") + what + " '" + std::string(tok) + "'");
  }
  return v;
}

std::size_t to_index(std::string_view tok, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw LibsvmError(line, "invalid feature index '" + std::string(tok) + "'");
  }
  if (v == 0) throw LibsvmError(line, "feature indices are 1-based; got 0");
  return v;
}

}  // namespace

LibsvmData parse_libsvm(std::istream& in, const LibsvmOptions& opts) {
  std::vector<Eigen::Triplet<double>> entries;
  std::vector<double> raw_labels;
  std::size_t dim = opts.min_dim;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    std::string_view line = text;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t row = raw_labels.size();
    std::size_t pos = line.find_first_of(" \t");
    raw_labels.push_back(to_double(line.substr(0, pos), line_no, "label"));
    std::size_t last = 0;
    while (pos != std::string_view::npos) {
      const std::size_t start = line.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      pos = line.find_first_of(" \t", start);
      const std::string_view tok = line.substr(start, pos == std::string_view::npos ? pos : pos - start);
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw LibsvmError(line_no, "expected <index>:<value>, got '" + std::string(tok) + "'");
      }
      const std::size_t idx = to_index(tok.substr(0, colon), line_no);
      if (idx <= last) {
        throw LibsvmError(line_no, "feature indices must be strictly ascending (" +
                                       std::to_string(idx) + " after " + std::to_string(last) + ")");
      }
      last = idx;
      const double value = to_double(tok.substr(colon + 1), line_no, "feature value");
      entries.emplace_back(static_cast<int>(row), static_cast<int>(idx - 1), value);
      dim = std::max(dim, idx);
    }
  }
  if (raw_labels.empty()) throw LibsvmError(0, "no samples in input");
  if (dim == 0) throw LibsvmError(0, "no features in input");

  LibsvmData data;
  const std::set<double> distinct(raw_labels.begin(), raw_labels.end());
  data.labels.reserve(raw_labels.size());
  for (double y : raw_labels) {
    const bool positive = distinct.size() == 2 ? y == *distinct.rbegin() : y > 0.0;
    data.labels.push_back(positive ? 1.0 : -1.0);
  }

  const auto n = static_cast<Eigen::Index>(raw_labels.size());
  const auto d = static_cast<Eigen::Index>(dim);
  if (!opts.scale) {
    data.features.resize(n, d);
    data.features.setFromTriplets(entries.begin(), entries.end());
    return data;
  }

  // Column ranges include the implicit zeros of rows that omit a feature.
  std::vector<double> lo(dim, 0.0), hi(dim, 0.0);
  std::vector<std::size_t> present(dim, 0);
  std::vector<bool> seen(dim, false);
  for (const auto& t : entries) {
    const auto j = static_cast<std::size_t>(t.col());
    if (!seen[j]) {
      lo[j] = hi[j] = t.value();
      seen[j] = true;
    } else {
      lo[j] = std::min(lo[j], t.value());
      hi[j] = std::max(hi[j], t.value());
    }
    ++present[j];
  }
  for (std::size_t j = 0; j < dim; ++j) {
    if (present[j] < raw_labels.size()) {
      lo[j] = std::min(lo[j], 0.0);
      hi[j] = std::max(hi[j], 0.0);
    }
  }
  auto scaled = [&](std::size_t j, double v) {
    return hi[j] > lo[j] ? -1.0 + 2.0 * (v - lo[j]) / (hi[j] - lo[j]) : 0.0;
  };
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, d);
  for (std::size_t j = 0; j < dim; ++j) dense.col(static_cast<Eigen::Index>(j)).setConstant(scaled(j, 0.0));
  for (const auto& t : entries) dense(t.row(), t.col()) = scaled(static_cast<std::size_t>(t.col()), t.value());
  data.features = dense.sparseView(0.0, 0.0);
  return data;
}

LibsvmData load_libsvm(const std::string& path, const LibsvmOptions& opts) {
  std::ifstream in(path);
  if (!in) throw LibsvmError(0, "cannot open '" + path + "'");
  return parse_libsvm(in, opts);
}

}  // namespace abavr
