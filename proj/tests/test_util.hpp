#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "ttkit/carrying.hpp"
#include "ttkit/track.hpp"

namespace ttkit {

// Rational nullspace basis of the switch-condition system; spans the space
// of (signed) transverse measures.
inline std::vector<std::map<int, Rational>> measure_space(
    const TrainTrack& t) {
  std::vector<int> ids = t.branch_ids();
  std::map<int, int> col;
  for (size_t i = 0; i < ids.size(); ++i) col[ids[i]] = (int)i;
  int n = (int)ids.size();
  std::vector<std::vector<Rational>> rows;
  for (const SwitchRecord& sw : t.switches) {
    std::vector<Rational> r(n, 0);
    r[col[sw.large.branch]] += 1;
    r[col[sw.small_left.branch]] -= 1;
    r[col[sw.small_right.branch]] -= 1;
    rows.push_back(r);
  }
  int rank = 0;
  std::vector<int> pivot_col;
  for (int c = 0; c < n && rank < (int)rows.size(); ++c) {
    int p = -1;
    for (int r = rank; r < (int)rows.size(); ++r)
      if (rows[r][c] != 0) {
        p = r;
        break;
      }
    if (p < 0) continue;
    std::swap(rows[rank], rows[p]);
    Rational pv = rows[rank][c];
    for (auto& x : rows[rank]) x /= pv;
    for (int r = 0; r < (int)rows.size(); ++r)
      if (r != rank && rows[r][c] != 0) {
        Rational f = rows[r][c];
        for (int k = 0; k < n; ++k) rows[r][k] -= f * rows[rank][k];
      }
    pivot_col.push_back(c);
    ++rank;
  }
  std::set<int> piv(pivot_col.begin(), pivot_col.end());
  std::vector<std::map<int, Rational>> basis;
  for (int c = 0; c < n; ++c) {
    if (piv.count(c)) continue;
    std::map<int, Rational> v;
    v[ids[c]] = 1;
    for (int r = 0; r < rank; ++r) v[ids[pivot_col[r]]] = -rows[r][c];
    basis.push_back(v);
  }
  return basis;
}

// A random strictly positive measure with generic (tie-avoiding) weights:
// a large multiple of the recurrence witness plus a random integer
// combination of nullspace basis vectors, rejection-sampled for positivity.
inline std::optional<TransverseMeasure> random_measure(const TrainTrack& t,
                                                       std::mt19937& rng) {
  auto mu0 = is_recurrent(t);
  if (!mu0) return std::nullopt;
  auto basis = measure_space(t);
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int tries = 0; tries < 50; ++tries) {
    TransverseMeasure mu;
    for (auto& [b, q] : mu0->weights) mu.weights[b] = q * 1024;
    for (auto& v : basis) {
      int r = coef(rng);
      for (auto& [b, q] : v) mu.weights[b] += q * r;
    }
    bool pos = true;
    for (auto& [b, q] : mu.weights) pos = pos && q > 0;
    if (!pos) continue;
    if (!check_measure(t, mu).empty()) continue;
    return mu;
  }
  return std::nullopt;
}

// A random carried position over the given base: a word of carried splits
// and (optionally) carried shifts of the given length.
inline CarriedPosition random_position(const CarriedPosition& id, int len,
                                       bool with_shifts, std::mt19937& rng) {
  CarriedPosition ps = id;
  for (int i = 0; i < len; ++i) {
    bool do_shift =
        with_shifts && std::uniform_int_distribution<int>(0, 2)(rng) == 0;
    if (do_shift) {
      auto mx = mixed_branches(ps.carried);
      if (mx.empty()) continue;
      int b = mx[std::uniform_int_distribution<size_t>(0, mx.size() - 1)(rng)];
      ps = shift_carried(ps, b);
    } else {
      auto lg = large_branches(ps.carried);
      if (lg.empty()) continue;
      int at = lg[std::uniform_int_distribution<size_t>(0, lg.size() - 1)(rng)];
      Direction d = std::uniform_int_distribution<int>(0, 1)(rng)
                        ? Direction::Right
                        : Direction::Left;
      ps = split_carried(ps, at, d);
    }
  }
  return ps;
}

// A structure-preserving random renaming: permutes branch ids, switch ids
// and branch orientations, and transports the puncture marks.
inline TrainTrack relabel_random(const TrainTrack& t, std::mt19937& rng) {
  auto branches = t.branch_ids();
  std::vector<int> newb(branches.size());
  std::iota(newb.begin(), newb.end(), 100);
  std::shuffle(newb.begin(), newb.end(), rng);
  std::map<int, int> bm;
  std::map<int, bool> flip;
  for (size_t i = 0; i < branches.size(); ++i) {
    bm[branches[i]] = newb[i];
    flip[branches[i]] = rng() & 1;
  }
  TrainTrack out;
  auto mh = [&](HalfBranch h) {
    return HalfBranch{bm[h.branch], flip[h.branch] ? 1 - h.end : h.end};
  };
  std::vector<int> sids;
  for (auto& sw : t.switches) sids.push_back(sw.id);
  std::shuffle(sids.begin(), sids.end(), rng);
  for (size_t i = 0; i < t.switches.size(); ++i)
    out.switches.push_back({sids[i] + 50, mh(t.switches[i].large),
                            mh(t.switches[i].small_left),
                            mh(t.switches[i].small_right)});
  out.sort_switches();
  for (auto& key : t.punctured_regions) {
    RegionSide s = parse_region_key(key);
    if (flip[s.branch]) {
      s.end = 1 - s.end;
      s.left_side = !s.left_side;
    }
    s.branch = bm[s.branch];
    for (auto& r : trace_regions(out))
      if (std::find(r.sides.begin(), r.sides.end(), s) != r.sides.end())
        out.punctured_regions.insert(r.key);
  }
  return out;
}

}  // namespace ttkit
