#include "lonas/arch_space.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <ostream>
#include <set>

#include "lonas/errors.hpp"

namespace lonas {

namespace {

// Largest space we are willing to enumerate; neighbour ids are 32-bit.
constexpr std::size_t kMaxSpaceSize = std::size_t{1} << 28;

std::size_t depth_offset(int depth, int width) {
  // Number of specs with fewer than `depth` layers.
  std::size_t total = 0;
  std::size_t level = 1;
  for (int l = 1; l < depth; ++l) {
    level *= static_cast<std::size_t>(width);
    total += level;
  }
  return total;
}

void sort_unique(std::vector<ArchSpec>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

SpaceConfig::SpaceConfig(int max_depth, int max_width)
    : max_depth_(max_depth), max_width_(max_width), size_(0) {
  if (max_depth < 1 || max_width < 1) {
    throw InputError("space bounds must be >= 1 (got depth=" + std::to_string(max_depth) +
                     ", width=" + std::to_string(max_width) + ")");
  }
  std::size_t level = 1;
  for (int l = 1; l <= max_depth; ++l) {
    if (level > kMaxSpaceSize / static_cast<std::size_t>(max_width)) {
      throw InputError("architecture space too large to enumerate");
    }
    level *= static_cast<std::size_t>(max_width);
    size_ += level;
    if (size_ > kMaxSpaceSize) throw InputError("architecture space too large to enumerate");
  }
}

bool ArchSpec::valid_in(const SpaceConfig& cfg) const noexcept {
  if (widths_.empty() || widths_.size() > static_cast<std::size_t>(cfg.max_depth())) return false;
  return std::all_of(widths_.begin(), widths_.end(),
                     [&](int w) { return w >= 1 && w <= cfg.max_width(); });
}

std::string ArchSpec::encode() const {
  std::string out;
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    if (i) out.push_back('-');
    out += std::to_string(widths_[i]);
  }
  return out;
}

ArchSpec ArchSpec::decode(std::string_view text) {
  std::vector<int> widths;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dash = text.find('-', pos);
    const std::string_view part =
        text.substr(pos, dash == std::string_view::npos ? std::string_view::npos : dash - pos);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size() || value < 1) {
      throw FormatError("malformed architecture '" + std::string(text) + "'");
    }
    widths.push_back(value);
    if (dash == std::string_view::npos) break;
    pos = dash + 1;
  }
  return ArchSpec(std::move(widths));
}

std::ostream& operator<<(std::ostream& os, const ArchSpec& spec) {
  return os << '(' << spec.encode() << ')';
}

std::size_t canonical_index(const ArchSpec& spec, const SpaceConfig& cfg) {
  const int w = cfg.max_width();
  std::size_t rank = 0;
  for (int x : spec.widths()) rank = rank * static_cast<std::size_t>(w) + static_cast<std::size_t>(x - 1);
  return depth_offset(static_cast<int>(spec.depth()), w) + rank;
}

ArchSpec spec_at(std::size_t index, const SpaceConfig& cfg) {
  const auto w = static_cast<std::size_t>(cfg.max_width());
  std::size_t level = 1;
  for (int depth = 1; depth <= cfg.max_depth(); ++depth) {
    level *= w;
    if (index < level) {
      std::vector<int> widths(static_cast<std::size_t>(depth));
      for (auto it = widths.rbegin(); it != widths.rend(); ++it) {
        *it = static_cast<int>(index % w) + 1;
        index /= w;
      }
      return ArchSpec(std::move(widths));
    }
    index -= level;
  }
  throw InputError("canonical index out of range");
}

std::vector<ArchSpec> enumerate_space(const SpaceConfig& cfg) {
  std::vector<ArchSpec> out;
  out.reserve(cfg.size());
  for (int depth = 1; depth <= cfg.max_depth(); ++depth) {
    std::vector<int> widths(static_cast<std::size_t>(depth), 1);
    while (true) {
      out.emplace_back(widths);
      // Odometer increment, last position fastest.
      int pos = depth - 1;
      while (pos >= 0 && widths[static_cast<std::size_t>(pos)] == cfg.max_width()) {
        widths[static_cast<std::size_t>(pos)] = 1;
        --pos;
      }
      if (pos < 0) break;
      ++widths[static_cast<std::size_t>(pos)];
    }
  }
  return out;
}

std::vector<ArchSpec> width_offsets(const ArchSpec& s, const SpaceConfig& cfg) {
  std::vector<ArchSpec> out;
  const auto widths = s.widths();
  for (std::size_t i = 0; i < widths.size(); ++i) {
    for (int delta : {-1, +1}) {
      const int v = widths[i] + delta;
      if (v < 1 || v > cfg.max_width()) continue;
      std::vector<int> t(widths.begin(), widths.end());
      t[i] = v;
      out.emplace_back(std::move(t));
    }
  }
  sort_unique(out);
  return out;
}

std::vector<ArchSpec> depth_offsets(const ArchSpec& s, const SpaceConfig& cfg) {
  std::vector<ArchSpec> out;
  const auto widths = s.widths();
  const std::size_t n = widths.size();
  if (n < static_cast<std::size_t>(cfg.max_depth())) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<int> t(widths.begin(), widths.end());
      t.insert(t.begin() + static_cast<std::ptrdiff_t>(i), widths[i]);
      out.emplace_back(std::move(t));
    }
  }
  if (n > 1) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<int> t(widths.begin(), widths.end());
      t.erase(t.begin() + static_cast<std::ptrdiff_t>(i));
      out.emplace_back(std::move(t));
    }
  }
  sort_unique(out);
  return out;
}

std::vector<ArchSpec> neighborhood(const ArchSpec& s, const SpaceConfig& cfg) {
  auto out = width_offsets(s, cfg);
  auto depth = depth_offsets(s, cfg);
  out.insert(out.end(), std::make_move_iterator(depth.begin()), std::make_move_iterator(depth.end()));
  sort_unique(out);
  // Width and depth moves always change the tuple, so `s` cannot appear.
  return out;
}

AdjacencyCounts adjacency_pairs(const SpaceConfig& cfg) {
  const ArchSpace space(cfg);
  AdjacencyCounts counts;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (std::size_t s = 0; s < space.size(); ++s) {
    for (std::uint32_t t : space.neighbors(s)) {
      ++counts.directed_relations;
      const auto a = static_cast<std::uint32_t>(s);
      seen.emplace(std::min(a, t), std::max(a, t));
    }
  }
  counts.pairs.reserve(seen.size());
  for (const auto& [a, b] : seen) counts.pairs.emplace_back(space.spec(a), space.spec(b));
  return counts;
}

ArchSpace::ArchSpace(SpaceConfig cfg) : cfg_(cfg), specs_(enumerate_space(cfg_)) {
  offsets_.reserve(specs_.size() + 1);
  offsets_.push_back(0);
  for (const auto& s : specs_) {
    for (const auto& t : neighborhood(s, cfg_)) {
      neighbor_ids_.push_back(static_cast<std::uint32_t>(canonical_index(t, cfg_)));
    }
    offsets_.push_back(neighbor_ids_.size());
  }
}

std::string space_to_csv(const SpaceConfig& cfg) {
  std::string out = "architecture\n";
  for (const auto& s : enumerate_space(cfg)) {
    out += s.encode();
    out.push_back('\n');
  }
  return out;
}

}  // namespace lonas
