#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lonas {

/// Bounds of the feedforward architecture space: up to `max_depth` hidden
/// layers, each with 1..`max_width` neurons.
class SpaceConfig {
 public:
  /// Throws InputError unless both bounds are >= 1 and the space fits in memory.
  SpaceConfig(int max_depth, int max_width);

  int max_depth() const noexcept { return max_depth_; }
  int max_width() const noexcept { return max_width_; }

  /// Σ_{l=1..d} w^l.
  std::size_t size() const noexcept { return size_; }

  friend bool operator==(const SpaceConfig&, const SpaceConfig&) = default;

 private:
  int max_depth_;
  int max_width_;
  std::size_t size_;
};

/// Hidden-layer widths of one candidate network, input side first.
class ArchSpec {
 public:
  ArchSpec() = default;
  explicit ArchSpec(std::vector<int> widths) : widths_(std::move(widths)) {}
  ArchSpec(std::initializer_list<int> widths) : widths_(widths) {}

  std::span<const int> widths() const noexcept { return widths_; }
  std::size_t depth() const noexcept { return widths_.size(); }
  int operator[](std::size_t i) const { return widths_[i]; }

  bool valid_in(const SpaceConfig& cfg) const noexcept;

  /// Dash-joined widths, e.g. "4-3".
  std::string encode() const;
  /// Inverse of encode(). Throws FormatError on malformed text; range checks
  /// against a SpaceConfig are the caller's job (see valid_in).
  static ArchSpec decode(std::string_view text);

  /// Canonical order: shallower first, then lexicographic widths.
  friend std::strong_ordering operator<=>(const ArchSpec& a, const ArchSpec& b) {
    if (a.depth() != b.depth()) return a.depth() <=> b.depth();
    return a.widths_ <=> b.widths_;
  }
  friend bool operator==(const ArchSpec&, const ArchSpec&) = default;

 private:
  std::vector<int> widths_;
};

std::ostream& operator<<(std::ostream& os, const ArchSpec& spec);

/// Every valid spec exactly once, in canonical order.
std::vector<ArchSpec> enumerate_space(const SpaceConfig& cfg);

/// Position of `spec` in enumerate_space(cfg). Precondition: spec.valid_in(cfg).
std::size_t canonical_index(const ArchSpec& spec, const SpaceConfig& cfg);

/// Inverse of canonical_index.
ArchSpec spec_at(std::size_t index, const SpaceConfig& cfg);

// Neighbourhood operators. Results are deduplicated and sorted canonically.

/// Specs differing from `s` by ±1 neurons in exactly one layer.
std::vector<ArchSpec> width_offsets(const ArchSpec& s, const SpaceConfig& cfg);
/// Specs obtained by cloning one layer next to itself (depth < d) or pruning
/// one layer (depth > 1).
std::vector<ArchSpec> depth_offsets(const ArchSpec& s, const SpaceConfig& cfg);
/// width_offsets ∪ depth_offsets; never contains `s`.
std::vector<ArchSpec> neighborhood(const ArchSpec& s, const SpaceConfig& cfg);

struct AdjacencyCounts {
  std::vector<std::pair<ArchSpec, ArchSpec>> pairs;  // unordered, first < second
  std::size_t directed_relations = 0;                // |{(s,t) : t ∈ N(s)}|

  double mean_degree(std::size_t space_size) const {
    return 2.0 * static_cast<double>(pairs.size()) / static_cast<double>(space_size);
  }
};

/// Symmetrised landscape edges: {s,t} with t ∈ N(s) or s ∈ N(t).
AdjacencyCounts adjacency_pairs(const SpaceConfig& cfg);

/// The enumerated space with its directed neighbourhood precomputed as
/// canonical indices. Immutable after construction.
class ArchSpace {
 public:
  explicit ArchSpace(SpaceConfig cfg);

  const SpaceConfig& config() const noexcept { return cfg_; }
  std::size_t size() const noexcept { return specs_.size(); }
  const std::vector<ArchSpec>& specs() const noexcept { return specs_; }
  const ArchSpec& spec(std::size_t index) const { return specs_[index]; }
  std::size_t index_of(const ArchSpec& spec) const { return canonical_index(spec, cfg_); }

  /// Directed neighbours of `index`, ascending.
  std::span<const std::uint32_t> neighbors(std::size_t index) const {
    return {neighbor_ids_.data() + offsets_[index], offsets_[index + 1] - offsets_[index]};
  }

 private:
  SpaceConfig cfg_;
  std::vector<ArchSpec> specs_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> neighbor_ids_;
};

/// CSV with header `architecture`, one spec per row in canonical order.
std::string space_to_csv(const SpaceConfig& cfg);

}  // namespace lonas
