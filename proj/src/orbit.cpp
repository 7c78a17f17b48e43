#include "ttkit/orbit.hpp"

#include <algorithm>
#include <map>

namespace ttkit {

namespace {

struct Relabeling {
  std::map<int, int> vertex;            // old switch id -> canonical id
  std::map<int, std::pair<int, bool>> edge;  // old branch -> (id, flipped)
};

// Deterministic rooted traversal. Every vertex has exactly one half-edge of
// each color, so the labeling is forced once the root is chosen.
Relabeling rooted_labels(const TrainTrack& t, int root_id) {
  Relabeling lab;
  std::vector<int> order{root_id};
  lab.vertex[root_id] = 0;
  int next_edge = 0;
  for (size_t i = 0; i < order.size(); ++i) {
    const SwitchRecord& sw = t.switch_by_id(order[i]);
    for (const HalfBranch* h : {&sw.large, &sw.small_left, &sw.small_right}) {
      if (!lab.edge.count(h->branch))
        lab.edge[h->branch] = {next_edge++, h->end != 0};
      auto [other, slot] = t.locate({h->branch, 1 - h->end});
      (void)slot;
      if (!lab.vertex.count(other->id)) {
        lab.vertex[other->id] = (int)order.size();
        order.push_back(other->id);
      }
    }
  }
  return lab;
}

TrainTrack apply_relabeling(const TrainTrack& t, const Relabeling& lab) {
  TrainTrack out;
  auto map_half = [&](HalfBranch h) {
    auto [id, flipped] = lab.edge.at(h.branch);
    return HalfBranch{id, flipped ? 1 - h.end : h.end};
  };
  for (const auto& sw : t.switches)
    out.switches.push_back(SwitchRecord{lab.vertex.at(sw.id),
                                        map_half(sw.large),
                                        map_half(sw.small_left),
                                        map_half(sw.small_right)});
  out.sort_switches();
  for (const auto& key : t.punctured_regions) {
    RegionSide s = parse_region_key(key);
    auto [id, flipped] = lab.edge.at(s.branch);
    if (flipped) {
      s.end = 1 - s.end;
      s.left_side = !s.left_side;
    }
    s.branch = id;
    out.punctured_regions.insert(to_string(s));  // fixed up below
  }
  // Re-express each mark as its region's minimal side.
  std::set<std::string> marks;
  auto regions = trace_regions(out);
  for (const auto& mark : out.punctured_regions) {
    RegionSide s = parse_region_key(mark);
    bool found = false;
    for (const auto& r : regions) {
      if (std::find(r.sides.begin(), r.sides.end(), s) != r.sides.end()) {
        marks.insert(r.key);
        found = true;
        break;
      }
    }
    if (!found) fail(ErrorCode::Internal, "puncture mark lost in relabeling");
  }
  out.punctured_regions = std::move(marks);
  return out;
}

std::string encode(const TrainTrack& t) {
  std::string s;
  for (const auto& sw : t.switches) {
    s += std::to_string(sw.id);
    for (const HalfBranch* h : {&sw.large, &sw.small_left, &sw.small_right}) {
      s += ' ';
      s += to_string(*h);
    }
    s += '\n';
  }
  for (const auto& key : t.punctured_regions) {
    s += key;
    s += '\n';
  }
  return s;
}

}  // namespace

ColoredGraph colored_graph(const TrainTrack& track) {
  validate(track);  // throws on malformed slots
  return ColoredGraph{track};
}

TrainTrack canonical_relabel(const TrainTrack& track) {
  std::optional<TrainTrack> best;
  std::string best_enc;
  for (const auto& sw : track.switches) {
    TrainTrack cand = apply_relabeling(track, rooted_labels(track, sw.id));
    std::string enc = encode(cand);
    if (!best || enc < best_enc) {
      best = std::move(cand);
      best_enc = std::move(enc);
    }
  }
  if (!best) fail(ErrorCode::Internal, "empty track");
  return *std::move(best);
}

std::string canonical_form(const ColoredGraph& g) {
  return encode(canonical_relabel(g.structure));
}

std::string hex_encode(const std::string& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out += digits[c >> 4];
    out += digits[c & 15];
  }
  return out;
}

bool same_orbit(const TrainTrack& a, const TrainTrack& b) {
  if (surface_signature(a) != surface_signature(b))
    fail(ErrorCode::SignatureMismatch,
         "tracks live on different surfaces");
  return canonical_form(colored_graph(a)) == canonical_form(colored_graph(b));
}

std::vector<RegionBoundary> regions_from_colors(const ColoredGraph& g) {
  // red-in => continue along yellow, green-in => continue along red,
  // yellow-in => cusp then green: exactly the trace_regions rule under the
  // L/A/B <-> red/yellow/green dictionary.
  return trace_regions(g.structure);
}

}  // namespace ttkit
