#pragma once

// Triplet training-set construction. A block pairs one normal and one
// abnormal anchor from the anchor domain; each anchor is matched against one
// same-class (positive) and one opposite-class (negative) segment from every
// partner domain. All draws go through a counter RNG keyed by
// (seed, anchor domain, block id) so any block can be rebuilt independently.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "heartsiam/common.hpp"
#include "heartsiam/cycles.hpp"
#include "heartsiam/rng.hpp"

namespace heartsiam {

struct SegmentPool {
  std::vector<CycleSegment> segments;
  std::map<std::pair<char, Label>, std::vector<std::size_t>> by_cell;

  void add(CycleSegment seg) {
    by_cell[{seg.domain, seg.label}].push_back(segments.size());
    segments.push_back(std::move(seg));
  }

  const std::vector<std::size_t>& cell(char domain, Label label) const {
    static const std::vector<std::size_t> empty;
    auto it = by_cell.find({domain, label});
    return it == by_cell.end() ? empty : it->second;
  }
};

struct Triplet {
  std::size_t anchor = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
};

struct TripletBlock {
  char anchor_domain = 'a';
  std::vector<Triplet> triplets;  // 2 anchors x |partner domains|
};

struct SamplerConfig {
  char anchor_domain = 'a';
  std::vector<char> partner_domains = {'a', 'b', 'c', 'd', 'e', 'f'};
  std::size_t n_blocks = 10000;
  std::uint64_t seed = 0;
};

namespace detail {
inline std::size_t draw_from_cell(const SegmentPool& pool, char domain, Label label,
                                  rng::Counter& rng) {
  const auto& cell = pool.cell(domain, label);
  if (cell.empty())
    throw DataError(std::string("sampler: no segments for (") + domain + ", " +
                    label_name(label) + ")");
  return cell[rng.next_index(cell.size())];
}
}  // namespace detail

inline TripletBlock build_block(const SegmentPool& pool, const SamplerConfig& cfg,
                                std::uint64_t block_id) {
  if (cfg.partner_domains.empty()) throw ConfigError("sampler: empty partner domain list");
  rng::Counter rng(
      rng::chain(rng::chain(rng::chain(cfg.seed, "block"),
                            static_cast<std::uint64_t>(cfg.anchor_domain)),
                 block_id));

  TripletBlock block;
  block.anchor_domain = cfg.anchor_domain;
  const std::size_t anchor_normal =
      detail::draw_from_cell(pool, cfg.anchor_domain, Label::Normal, rng);
  const std::size_t anchor_abnormal =
      detail::draw_from_cell(pool, cfg.anchor_domain, Label::Abnormal, rng);

  for (const auto& [anchor, label] :
       {std::pair{anchor_normal, Label::Normal}, std::pair{anchor_abnormal, Label::Abnormal}}) {
    for (char partner : cfg.partner_domains) {
      Triplet t;
      t.anchor = anchor;
      t.positive = detail::draw_from_cell(pool, partner, label, rng);
      t.negative = detail::draw_from_cell(pool, partner, opposite(label), rng);
      block.triplets.push_back(t);
    }
  }
  return block;
}

inline std::vector<Triplet> build_training_set(const SegmentPool& pool, const SamplerConfig& cfg) {
  std::vector<Triplet> out;
  out.reserve(cfg.n_blocks * cfg.partner_domains.size() * 2);
  for (std::uint64_t b = 0; b < cfg.n_blocks; ++b) {
    TripletBlock block = build_block(pool, cfg, b);
    out.insert(out.end(), block.triplets.begin(), block.triplets.end());
  }
  return out;
}

// per_class segments of each class, drawn without replacement uniformly over
// the pooled domains.
inline std::vector<std::size_t> balanced_subset(const SegmentPool& pool, std::size_t per_class,
                                                std::uint64_t seed) {
  std::vector<std::size_t> out;
  for (Label label : {Label::Normal, Label::Abnormal}) {
    std::vector<std::size_t> candidates;
    for (const auto& [cell, indices] : pool.by_cell)
      if (cell.second == label) candidates.insert(candidates.end(), indices.begin(), indices.end());
    if (candidates.size() < per_class)
      throw DataError(std::string("balanced_subset: class ") + label_name(label) + " has " +
                      std::to_string(candidates.size()) + " segments, need " +
                      std::to_string(per_class));
    rng::Counter rng(rng::chain(rng::chain(seed, "balanced"),
                                static_cast<std::uint64_t>(label == Label::Normal ? 0 : 1)));
    rng::shuffle(candidates, rng);
    out.insert(out.end(), candidates.begin(),
               candidates.begin() + static_cast<std::ptrdiff_t>(per_class));
  }
  return out;
}

}  // namespace heartsiam
