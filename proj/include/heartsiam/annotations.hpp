#pragma once

// Ground-truth state annotations: CSV `record_id,tick,state` with state in
// {S1, Sys, S2, Dia}. Ticks for each record must cover 0..T-1.

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "heartsiam/common.hpp"
#include "heartsiam/hsmm.hpp"
#include "heartsiam/manifest.hpp"

namespace heartsiam {

inline constexpr const char* kAnnotationHeader = "record_id,tick,state";

using AnnotationMap = std::map<std::string, std::vector<int>>;

inline AnnotationMap load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_annotations: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || detail::strip_cr(line) != kAnnotationHeader)
    throw DataError("load_annotations: bad header in " + path);

  std::map<std::string, std::vector<std::pair<long, int>>> raw;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 3)
      throw DataError("load_annotations: line " + std::to_string(line_no) +
                      ": expected 3 columns");
    long tick = 0;
    try {
      tick = std::stol(fields[1]);
    } catch (const std::exception&) {
      throw DataError("load_annotations: line " + std::to_string(line_no) + ": bad tick '" +
                      fields[1] + "'");
    }
    raw[fields[0]].emplace_back(tick, static_cast<int>(heart_state_from_name(fields[2])));
  }

  AnnotationMap out;
  for (auto& [id, ticks] : raw) {
    std::sort(ticks.begin(), ticks.end());
    std::vector<int> states(ticks.size(), -1);
    for (std::size_t i = 0; i < ticks.size(); ++i) {
      if (ticks[i].first != static_cast<long>(i))
        throw DataError("load_annotations: record " + id + ": ticks are not contiguous from 0");
      states[i] = ticks[i].second;
    }
    out.emplace(id, std::move(states));
  }
  return out;
}

inline void append_annotations(std::ofstream& out, const std::string& record_id,
                               const std::vector<int>& states) {
  for (std::size_t t = 0; t < states.size(); ++t)
    out << record_id << "," << t << ","
        << heart_state_name(static_cast<HeartState>(states[t])) << "\n";
}

}  // namespace heartsiam
