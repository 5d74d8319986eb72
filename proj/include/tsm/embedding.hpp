#pragma once

// Word-vector tables and the [0,1]-normalized cosine similarity between
// word vectors.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tsm/error.hpp"
#include "tsm/format.hpp"

namespace tsm {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Immutable word -> vector mapping. Vectors are stored contiguously in load
// order; every vector has dimension() finite components and is non-zero.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dimension) : dim_(dimension) {}

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::vector<std::string>& words() const { return words_; }

  // Entries skipped while loading because every component was zero.
  std::size_t rejected_zero_vectors() const { return rejected_zero_; }

  bool contains(std::string_view word) const {
    return index_.contains(std::string(word));
  }

  std::optional<std::span<const double>> find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return row(it->second);
  }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  // Returns false (and stores nothing) for duplicates and zero vectors.
  // Throws DomainError on a dimension mismatch or a non-finite component.
  bool add(std::string word, std::span<const double> vec) {
    if (dim_ == 0) dim_ = vec.size();
    if (vec.size() != dim_ || dim_ == 0) {
      throw DomainError("vector for '" + word + "' has " +
                        std::to_string(vec.size()) + " components, expected " +
                        std::to_string(dim_));
    }
    for (double v : vec) {
      if (!std::isfinite(v)) {
        throw DomainError("non-finite component in vector for '" + word + "'");
      }
    }
    if (std::all_of(vec.begin(), vec.end(), [](double v) { return v == 0.0; })) {
      ++rejected_zero_;
      return false;
    }
    if (index_.contains(word)) return false;
    index_.emplace(word, words_.size());
    words_.push_back(std::move(word));
    data_.insert(data_.end(), vec.begin(), vec.end());
    return true;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t rejected_zero_ = 0;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool parse_count(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  out = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    out = out * 10 + static_cast<std::size_t>(c - '0');
  }
  return true;
}

}  // namespace detail

// Reads the text vector format: an optional `V f` header line followed by
// `word c_1 ... c_f` lines. Without a header the dimension comes from the
// first entry. Duplicate words keep their first vector.
inline EmbeddingTable parse_embeddings(std::istream& in,
                                       const std::string& source = "<stream>") {
  EmbeddingTable table;
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> declared_count;
  std::size_t entries = 0;
  std::vector<double> vec;

  auto fail = [&](const std::string& msg) {
    throw ParseError(source + ":" + std::to_string(lineno) + ": " + msg, lineno);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = detail::split_ws(line);
    if (fields.empty()) continue;

    if (lineno == 1 && fields.size() == 2) {
      std::size_t v = 0;
      std::size_t f = 0;
      if (detail::parse_count(fields[0], v) && detail::parse_count(fields[1], f)) {
        if (f == 0) fail("header declares zero dimensions");
        table = EmbeddingTable(f);
        declared_count = v;
        continue;
      }
    }

    if (fields.size() < 2) fail("entry has no vector components");
    const std::size_t ncomp = fields.size() - 1;
    if (table.dimension() != 0 && ncomp != table.dimension()) {
      fail("expected " + std::to_string(table.dimension()) +
           " components, found " + std::to_string(ncomp));
    }
    vec.resize(ncomp);
    for (std::size_t k = 0; k < ncomp; ++k) {
      if (!parse_double(fields[k + 1], vec[k]) || !std::isfinite(vec[k])) {
        fail("bad component '" + std::string(fields[k + 1]) + "'");
      }
    }
    table.add(std::string(fields[0]), vec);
    ++entries;
  }
  if (declared_count && *declared_count != entries) {
    throw ParseError(source + ": header declares " +
                     std::to_string(*declared_count) + " entries, found " +
                     std::to_string(entries));
  }
  return table;
}

inline EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open embeddings file: " + path.string());
  return parse_embeddings(in, path.string());
}

// Writes the headered format with round-trip exact numbers.
inline void write_embeddings(const EmbeddingTable& table, std::ostream& out) {
  out << table.size() << ' ' << table.dimension() << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.words()[i];
    for (double v : table.row(i)) out << ' ' << format_double(v);
    out << '\n';
  }
}

inline void save_embeddings(const EmbeddingTable& table,
                            const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write embeddings file: " + path.string());
  write_embeddings(table, out);
}

inline double cosine_similarity(std::span<const double> x,
                                std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DomainError("cosine similarity of vectors with different lengths");
  }
  double dot = 0.0;
  double xx = 0.0;
  double yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  if (xx == 0.0 || yy == 0.0) {
    throw DomainError("cosine similarity of a zero vector");
  }
  return std::clamp(dot / (std::sqrt(xx) * std::sqrt(yy)), -1.0, 1.0);
}

// Maps a cosine in [-1,1] onto [0,1].
inline double rescale_cosine(double cosine) { return (cosine + 1.0) / 2.0; }

inline double normalized_similarity(std::span<const double> x,
                                    std::span<const double> y) {
  return rescale_cosine(cosine_similarity(x, y));
}

// In-vocabulary words as unit-length rows, plus the words that had no
// vector.
struct WordVectorSet {
  std::vector<std::string> words;
  RowMatrix matrix;
  std::vector<std::string> oov;

  std::size_t size() const { return words.size(); }
  bool empty() const { return words.empty(); }
};

inline WordVectorSet embed_set(std::span<const std::string> words,
                               const EmbeddingTable& table) {
  WordVectorSet out;
  std::vector<std::span<const double>> rows;
  for (const auto& w : words) {
    if (auto v = table.find(w)) {
      out.words.push_back(w);
      rows.push_back(*v);
    } else {
      out.oov.push_back(w);
    }
  }
  out.matrix.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(table.dimension()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Eigen::Map<const Eigen::RowVectorXd> v(rows[i].data(),
                                           static_cast<Eigen::Index>(rows[i].size()));
    out.matrix.row(static_cast<Eigen::Index>(i)) = v / v.norm();
  }
  return out;
}

}  // namespace tsm
