#pragma once

// Plain-text corpus ingestion. A corpus directory holds `.txt` files and,
// optionally, one level of subdirectories whose names are category labels.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tsm/error.hpp"
#include "tsm/textprep.hpp"

namespace tsm {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline RawDocument load_document(const std::filesystem::path& path,
                                 std::string category = {}) {
  return RawDocument{path.stem().string(), read_text_file(path),
                     std::move(category)};
}

namespace detail {

inline std::vector<std::filesystem::path> sorted_txt_files(
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace detail

// Loads every `.txt` in `dir` (category = "") and in its immediate
// subdirectories (category = subdirectory name). Documents come back sorted
// by (category, filename). Duplicate ids are an input error.
inline std::vector<RawDocument> load_corpus(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw InputError("not a directory: " + dir.string());
  }
  std::vector<RawDocument> docs;
  for (const auto& f : detail::sorted_txt_files(dir)) {
    docs.push_back(load_document(f));
  }
  std::vector<std::filesystem::path> subdirs;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_directory()) subdirs.push_back(entry.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& sub : subdirs) {
    const std::string category = sub.filename().string();
    for (const auto& f : detail::sorted_txt_files(sub)) {
      docs.push_back(load_document(f, category));
    }
  }

  std::set<std::string> ids;
  for (const auto& d : docs) {
    if (d.id.empty()) throw InputError("document with empty id in " + dir.string());
    if (!ids.insert(d.id).second) {
      throw InputError("duplicate document id '" + d.id + "' in " + dir.string());
    }
  }
  return docs;
}

// Groups documents by category, preserving input order inside each group.
inline std::map<std::string, std::vector<RawDocument>> group_by_category(
    const std::vector<RawDocument>& docs) {
  std::map<std::string, std::vector<RawDocument>> groups;
  for (const auto& d : docs) groups[d.category].push_back(d);
  return groups;
}

}  // namespace tsm
