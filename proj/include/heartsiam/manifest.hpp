#pragma once

// Dataset manifest: UTF-8 CSV with header `record_id,path,domain,label`,
// label -1 = normal / 1 = abnormal, paths relative to the manifest directory.
// No quoting; fields must not contain commas.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "heartsiam/common.hpp"

namespace heartsiam {

struct RecordDescriptor {
  std::string record_id;
  std::string path;  // resolved against the manifest directory
  char domain = 'a';
  Label label = Label::Unknown;
};

struct DatasetIndex {
  std::vector<RecordDescriptor> records;
  std::map<std::pair<char, Label>, std::size_t> counts;
  std::string base_dir;

  std::size_t count(char domain, Label label) const {
    auto it = counts.find({domain, label});
    return it == counts.end() ? 0 : it->second;
  }
};

inline constexpr const char* kManifestHeader = "record_id,path,domain,label";

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}
}  // namespace detail

inline DatasetIndex load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_manifest: cannot open " + path);

  DatasetIndex index;
  index.base_dir = std::filesystem::path(path).parent_path().string();

  std::string line;
  if (!std::getline(in, line)) throw DataError("load_manifest: empty file " + path);
  if (detail::strip_cr(line) != kManifestHeader)
    throw DataError("load_manifest: bad header in " + path + " (expected '" +
                    std::string(kManifestHeader) + "')");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 4)
      throw DataError("load_manifest: line " + std::to_string(line_no) + ": expected 4 columns, got " +
                      std::to_string(fields.size()));
    RecordDescriptor rec;
    rec.record_id = fields[0];
    if (fields[2].size() != 1 || !valid_domain(fields[2][0]))
      throw DataError("load_manifest: line " + std::to_string(line_no) + ": unknown domain '" +
                      fields[2] + "' (expected a single letter a-f)");
    rec.domain = fields[2][0];
    if (fields[3] == "-1") {
      rec.label = Label::Normal;
    } else if (fields[3] == "1") {
      rec.label = Label::Abnormal;
    } else {
      throw DataError("load_manifest: line " + std::to_string(line_no) + ": label '" + fields[3] +
                      "' outside {-1, 1}");
    }
    rec.path = (std::filesystem::path(index.base_dir) / fields[1]).string();
    index.counts[{rec.domain, rec.label}]++;
    index.records.push_back(std::move(rec));
  }
  return index;
}

inline void write_manifest(const std::string& path, const std::vector<RecordDescriptor>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("write_manifest: cannot open " + path);
  out << kManifestHeader << "\n";
  const auto base = std::filesystem::path(path).parent_path();
  for (const auto& rec : records) {
    const auto rel = std::filesystem::relative(rec.path, base);
    out << rec.record_id << "," << rel.string() << "," << rec.domain << ","
        << (rec.label == Label::Normal ? "-1" : "1") << "\n";
  }
}

}  // namespace heartsiam
