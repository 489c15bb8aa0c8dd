#include "csma/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace csma {

ConflictGraph::ConflictGraph(
    unsigned links, std::span<const std::pair<unsigned, unsigned>> conflicts)
    : links_(links), nbr_(links, 0) {
  if (links == 0) throw std::invalid_argument("conflict graph needs L >= 1");
  if (links > 32)
    throw std::invalid_argument("conflict graph supports at most 32 links");
  for (auto [a, b] : conflicts) {
    if (a >= links || b >= links)
      throw std::invalid_argument("conflict pair refers to unknown link");
    if (a == b)
      throw std::invalid_argument("a link cannot conflict with itself");
    nbr_[a] |= LinkMask{1} << b;
    nbr_[b] |= LinkMask{1} << a;
  }
}

ConflictGraph ConflictGraph::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("links"))
    throw std::invalid_argument("graph json must be {\"links\": L, \"conflicts\": [[i,j],...]}");
  unsigned links = j.at("links").get<unsigned>();
  std::vector<std::pair<unsigned, unsigned>> pairs;
  if (j.contains("conflicts")) {
    for (const auto& e : j.at("conflicts")) {
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("each conflict must be a pair [i, j]");
      pairs.emplace_back(e.at(0).get<unsigned>(), e.at(1).get<unsigned>());
    }
  }
  return ConflictGraph(links, pairs);
}

nlohmann::json ConflictGraph::to_json() const {
  nlohmann::json pairs = nlohmann::json::array();
  for (unsigned a = 0; a < links_; ++a)
    for (unsigned b = a + 1; b < links_; ++b)
      if (interferes(a, b)) pairs.push_back({a, b});
  return {{"links", links_}, {"conflicts", pairs}};
}

bool is_feasible(Schedule m, const ConflictGraph& g) {
  if (m.active & ~g.all_links_mask())
    throw std::invalid_argument("schedule refers to links outside the graph");
  LinkMask rest = m.active;
  while (rest) {
    unsigned l = static_cast<unsigned>(__builtin_ctz(rest));
    rest &= rest - 1;
    if (g.neighbors(l) & m.active) return false;
  }
  return true;
}

LinkMask addable_links(Schedule m, const ConflictGraph& g) {
  if (!is_feasible(m, g))
    throw std::invalid_argument("addable_links requires a feasible schedule");
  LinkMask out = 0;
  for (unsigned l = 0; l < g.links(); ++l) {
    if (m.contains(l)) continue;
    if ((g.neighbors(l) & m.active) == 0) out |= LinkMask{1} << l;
  }
  return out;
}

ScheduleSet ScheduleSet::enumerate(const ConflictGraph& g, unsigned cap) {
  if (g.links() > cap)
    throw std::invalid_argument(
        "graph too large for exhaustive enumeration (links > cap)");
  ScheduleSet s;
  s.links_ = g.links();
  const LinkMask end = g.all_links_mask();
  // Ascending mask order is the canonical order by construction.
  for (LinkMask m = 0;; ++m) {
    if (is_feasible(Schedule{m}, g)) s.masks_.push_back(m);
    if (m == end) break;
  }
  return s;
}

std::size_t ScheduleSet::index_of(LinkMask m) const {
  auto it = std::lower_bound(masks_.begin(), masks_.end(), m);
  if (it == masks_.end() || *it != m)
    throw std::invalid_argument("schedule not in set");
  return static_cast<std::size_t>(it - masks_.begin());
}

std::string to_string(Schedule m, unsigned links) {
  std::string out = "{";
  bool first = true;
  for (unsigned l = 0; l < links; ++l) {
    if (!m.contains(l)) continue;
    if (!first) out += ",";
    out += std::to_string(l + 1);
    first = false;
  }
  out += "}";
  return out;
}

}  // namespace csma
