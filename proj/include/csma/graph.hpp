#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace csma {

/// Set of links encoded as a bitmask; link l is bit l.
using LinkMask = std::uint32_t;

inline constexpr unsigned kDefaultEnumerationCap = 20;

/// A link activation profile. Feasibility is relative to a ConflictGraph.
struct Schedule {
  LinkMask active = 0;

  bool contains(unsigned link) const { return (active >> link) & 1u; }
  unsigned count() const { return __builtin_popcount(active); }
};

/// Interference structure over L links: symmetric boolean relation with an
/// empty diagonal. Immutable after construction, safe to share across threads.
class ConflictGraph {
 public:
  ConflictGraph(unsigned links,
                std::span<const std::pair<unsigned, unsigned>> conflicts);

  /// Parses {"links": L, "conflicts": [[i, j], ...]} with 0-based indices.
  /// The symmetric closure of the pair list is applied.
  static ConflictGraph from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  unsigned links() const { return links_; }
  bool interferes(unsigned a, unsigned b) const {
    return (nbr_[a] >> b) & 1u;
  }
  LinkMask neighbors(unsigned link) const { return nbr_[link]; }
  LinkMask all_links_mask() const {
    return links_ == 32 ? ~LinkMask{0} : ((LinkMask{1} << links_) - 1);
  }

 private:
  unsigned links_;
  std::vector<LinkMask> nbr_;
};

/// True iff no two active links interfere. Throws if the schedule mentions
/// links outside the graph.
bool is_feasible(Schedule m, const ConflictGraph& g);

/// Links that can be activated on top of m without breaking feasibility.
/// Throws if m itself is infeasible.
LinkMask addable_links(Schedule m, const ConflictGraph& g);

/// All independent sets of a conflict graph in canonical order (ascending
/// integer encoding of the activation mask, link 0 = least significant bit).
class ScheduleSet {
 public:
  static ScheduleSet enumerate(const ConflictGraph& g,
                               unsigned cap = kDefaultEnumerationCap);

  std::size_t size() const { return masks_.size(); }
  unsigned links() const { return links_; }
  Schedule at(std::size_t i) const { return Schedule{masks_[i]}; }
  const std::vector<LinkMask>& masks() const { return masks_; }

  /// Position of a schedule in canonical order; throws if absent.
  std::size_t index_of(LinkMask m) const;

 private:
  unsigned links_ = 0;
  std::vector<LinkMask> masks_;
};

/// Human-readable rendering, e.g. "{1,3}" (1-based links) or "{}".
std::string to_string(Schedule m, unsigned links);

}  // namespace csma
