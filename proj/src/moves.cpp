#include "ttkit/moves.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace ttkit {

Direction carried_split_direction(const CarriedPosition& pos, int at);

namespace {

struct MonogonInfo {
  std::string key;
  std::vector<RegionSide> sides;
};

// Re-attach puncture marks after a local rewrite. Regions are matched by
// boundary-side overlap: sides away from the rewritten quad keep their
// (branch, end, side) code, so untouched monogons match themselves exactly
// and at most the monogons at the move site need the branch-set fallback.
std::set<std::string> remap_punctures(const TrainTrack& before,
                                      const TrainTrack& after_bare) {
  if (before.punctured_regions.empty()) return {};
  std::vector<MonogonInfo> olds, news;
  for (const auto& r : trace_regions(before))
    if (r.punctured) olds.push_back({r.key, r.sides});
  for (const auto& r : trace_regions(after_bare))
    if (r.cusps == 1) news.push_back({r.key, r.sides});
  if (olds.size() > news.size())
    fail(ErrorCode::Internal, "monogon count dropped across a move");

  auto score = [](const MonogonInfo& a, const MonogonInfo& b) {
    std::set<RegionSide> sa(a.sides.begin(), a.sides.end());
    int exact = 0;
    for (const auto& s : b.sides) exact += sa.count(s);
    std::multiset<int> ba, bb;
    for (const auto& s : a.sides) ba.insert(s.branch);
    for (const auto& s : b.sides) bb.insert(s.branch);
    std::vector<int> common;
    std::set_intersection(ba.begin(), ba.end(), bb.begin(), bb.end(),
                          std::back_inserter(common));
    return std::pair<int, int>(exact, (int)common.size());
  };

  std::set<std::string> marks;
  std::vector<bool> old_done(olds.size(), false), new_done(news.size(), false);
  for (size_t round = 0; round < olds.size(); ++round) {
    std::pair<int, int> best{-1, -1};
    size_t bi = 0, bj = 0;
    bool tie = false;
    for (size_t i = 0; i < olds.size(); ++i) {
      if (old_done[i]) continue;
      for (size_t j = 0; j < news.size(); ++j) {
        if (new_done[j]) continue;
        auto s = score(olds[i], news[j]);
        if (s > best) {
          best = s;
          bi = i;
          bj = j;
          tie = false;
        } else if (s == best && (i != bi && j != bj)) {
          // equal score on a disjoint pair is fine, it gets its own round
        } else if (s == best) {
          tie = true;
        }
      }
    }
    if (tie && best.first == 0)
      fail(ErrorCode::Internal,
           "ambiguous puncture-region correspondence across a move");
    old_done[bi] = true;
    new_done[bj] = true;
    marks.insert(news[bj].key);
  }
  return marks;
}

void replace_switch(TrainTrack& t, const SwitchRecord& sw) {
  for (auto& s : t.switches)
    if (s.id == sw.id) {
      s = sw;
      return;
    }
  fail(ErrorCode::Internal, "switch id vanished");
}

std::map<int, int> identity_correspondence(const TrainTrack& t) {
  std::map<int, int> corr;
  for (int b : t.branch_ids()) corr[b] = b;
  return corr;
}

void debug_check_move(const TrainTrack& before, const TrainTrack& after) {
#ifndef NDEBUG
  ValidationReport rep = validate(after);
  assert(rep.ok());
  assert(before.num_switches() == after.num_switches());
  assert(before.num_branches() == after.num_branches());
  assert(surface_signature(before) == surface_signature(after));
#else
  (void)before;
  (void)after;
#endif
}

}  // namespace

MoveOutcome split(const TrainTrack& track, const SplitMove& move) {
  int e = move.at;
  if (classify_branch(track, e) != BranchClass::Large)
    fail(ErrorCode::NotLargeBranch,
         "branch " + std::to_string(e) + " is not large");
  auto [vp, vslot] = track.locate({e, 0});
  auto [wp, wslot] = track.locate({e, 1});
  (void)vslot;
  (void)wslot;
  const SwitchRecord v = *vp, w = *wp;
  HalfBranch p = v.small_left, q = v.small_right;
  HalfBranch r = w.small_left, s = w.small_right;

  SwitchRecord nv, nw;
  if (move.direction == Direction::Right) {
    // winners q, s; diagonal lands in the small_right slots
    nv = SwitchRecord{v.id, q, r, {e, 0}};
    nw = SwitchRecord{w.id, s, p, {e, 1}};
  } else {
    // winners p, r; diagonal lands in the small_left slots
    nv = SwitchRecord{v.id, r, {e, 0}, q};
    nw = SwitchRecord{w.id, p, {e, 1}, s};
  }
  TrainTrack out = track;
  out.punctured_regions.clear();
  replace_switch(out, nv);
  replace_switch(out, nw);
  out.punctured_regions = remap_punctures(track, out);
  debug_check_move(track, out);
  return MoveOutcome{std::move(out), identity_correspondence(track)};
}

MoveOutcome shift(const TrainTrack& track, int branch) {
  if (classify_branch(track, branch) != BranchClass::Mixed)
    fail(ErrorCode::NotMixedBranch,
         "branch " + std::to_string(branch) + " is not mixed");
  auto [e0sw, e0slot] = track.locate({branch, 0});
  auto [e1sw, e1slot] = track.locate({branch, 1});
  const SwitchRecord& V = e0slot == Slot::Large ? *e1sw : *e0sw;  // small end
  const SwitchRecord& W = e0slot == Slot::Large ? *e0sw : *e1sw;  // large end
  HalfBranch bV = e0slot == Slot::Large ? HalfBranch{branch, 1}
                                        : HalfBranch{branch, 0};
  HalfBranch bW{branch, 1 - bV.end};
  HalfBranch f = V.large, cu = W.small_left, cd = W.small_right;

  SwitchRecord nV, nW;
  if (V.small_left == bV) {
    HalfBranch g = V.small_right;
    nV = SwitchRecord{V.id, f, cu, bV};
    nW = SwitchRecord{W.id, bW, cd, g};
  } else {
    HalfBranch g = V.small_left;
    nV = SwitchRecord{V.id, f, bV, cd};
    nW = SwitchRecord{W.id, bW, g, cu};
  }
  TrainTrack out = track;
  out.punctured_regions.clear();
  replace_switch(out, nV);
  replace_switch(out, nW);
  out.punctured_regions = remap_punctures(track, out);
  debug_check_move(track, out);
  return MoveOutcome{std::move(out), identity_correspondence(track)};
}

MoveOutcome collapse(const TrainTrack& track, int at, Direction direction) {
  auto [tp, tslot] = track.locate({at, 0});
  auto [up, uslot] = track.locate({at, 1});
  Slot want = direction == Direction::Right ? Slot::SmallRight
                                            : Slot::SmallLeft;
  if (tslot != want || uslot != want || tp->id == up->id)
    fail(ErrorCode::NotCollapsible,
         "branch " + std::to_string(at) +
             " is not the diagonal of a " +
             (direction == Direction::Right ? "right" : "left") + " split");
  const SwitchRecord t = *tp, u = *up;
  SwitchRecord nv, nw;
  if (direction == Direction::Right) {
    nv = SwitchRecord{t.id, {at, 0}, u.small_left, t.large};
    nw = SwitchRecord{u.id, {at, 1}, t.small_left, u.large};
  } else {
    nv = SwitchRecord{t.id, {at, 0}, u.large, t.small_right};
    nw = SwitchRecord{u.id, {at, 1}, t.large, u.small_right};
  }
  TrainTrack out = track;
  out.punctured_regions.clear();
  replace_switch(out, nv);
  replace_switch(out, nw);
  // Guard against false positives of the slot pattern: the result must be a
  // legal maximal track with the same monogon count.
  int monogons = 0;
  for (const auto& r : trace_regions(out)) {
    if (r.cusps == 1)
      ++monogons;
    else if (r.cusps != 3)
      fail(ErrorCode::NotCollapsible,
           "collapsing branch " + std::to_string(at) +
               " would break maximality");
  }
  if (monogons != (int)track.punctured_regions.size())
    fail(ErrorCode::NotCollapsible,
         "collapsing branch " + std::to_string(at) + " would change regions");
  out.punctured_regions = remap_punctures(track, out);
  debug_check_move(track, out);
  return MoveOutcome{std::move(out), identity_correspondence(track)};
}

MoveOutcome apply_move(const TrainTrack& track, const Move& move) {
  switch (move.kind) {
    case MoveKind::Split:
      return split(track, SplitMove{move.at, move.direction});
    case MoveKind::Shift:
      return shift(track, move.at);
    case MoveKind::Collapse:
      return collapse(track, move.at, move.direction);
  }
  fail(ErrorCode::Internal, "bad move kind");
}

MoveOutcome apply_sequence(const TrainTrack& track,
                           const std::vector<Move>& word) {
  MoveOutcome out{track, identity_correspondence(track)};
  for (size_t i = 0; i < word.size(); ++i) {
    Move m = word[i];
    m.at = out.correspondence.count(m.at) ? out.correspondence[m.at] : m.at;
    MoveOutcome step;
    try {
      step = apply_move(out.track, m);
    } catch (const Error& e) {
      fail(e.code(), "move #" + std::to_string(i) + ": " + e.what());
    }
    std::map<int, int> composed;
    for (auto [a, b] : out.correspondence) composed[a] = step.correspondence[b];
    out.track = std::move(step.track);
    out.correspondence = std::move(composed);
  }
  return out;
}

TransverseMeasure measure_after_split(
    const TransverseMeasure& mu, const TrainTrack& track, const SplitMove& move,
    const std::map<int, int>& correspondence) {
  int e = move.at;
  if (classify_branch(track, e) != BranchClass::Large)
    fail(ErrorCode::NotLargeBranch,
         "branch " + std::to_string(e) + " is not large");
  auto [vp, d0] = track.locate({e, 0});
  auto [wp, d1] = track.locate({e, 1});
  (void)d0;
  (void)d1;
  Rational diag;
  if (move.direction == Direction::Right)
    diag = mu.at(vp->small_right.branch) - mu.at(wp->small_left.branch);
  else
    diag = mu.at(vp->small_left.branch) - mu.at(wp->small_right.branch);
  if (diag == 0)
    fail(ErrorCode::TieCollision,
         "split at branch " + std::to_string(e) + " hits a weight tie");
  if (diag < 0)
    fail(ErrorCode::MeasureNotCarried,
         "measure is not carried by this split direction at branch " +
             std::to_string(e));
  TransverseMeasure out;
  for (const auto& [b, w] : mu.weights)
    out.weights[correspondence.at(b)] = w;
  out.weights[correspondence.at(e)] = diag;
  return out;
}

LaminationProxy measure_proxy(TransverseMeasure mu) {
  LaminationProxy p;
  p.kind = LaminationProxy::Kind::Measure;
  p.measure = std::move(mu);
  return p;
}

Direction lambda_split_direction(const TrainTrack& track, int at,
                                 const TransverseMeasure& mu) {
  if (classify_branch(track, at) != BranchClass::Large)
    fail(ErrorCode::NotLargeBranch,
         "branch " + std::to_string(at) + " is not large");
  auto [vp, d0] = track.locate({at, 0});
  auto [wp, d1] = track.locate({at, 1});
  (void)d0;
  (void)d1;
  Rational right = mu.at(vp->small_right.branch) - mu.at(wp->small_left.branch);
  if (right == 0)
    fail(ErrorCode::TieCollision,
         "lambda-split at branch " + std::to_string(at) + " hits a tie");
  return right > 0 ? Direction::Right : Direction::Left;
}

LambdaSplitResult lambda_split(const TrainTrack& track, int at,
                               const LaminationProxy& lambda) {
  Direction dir;
  switch (lambda.kind) {
    case LaminationProxy::Kind::Measure: {
      if (!check_measure(track, lambda.measure).empty())
        fail(ErrorCode::NotCarried, "measure fails the switch conditions");
      dir = lambda_split_direction(track, at, lambda.measure);
      break;
    }
    case LaminationProxy::Kind::Word: {
      bool found = false;
      dir = Direction::Right;
      for (const Move& m : lambda.word) {
        if (m.kind == MoveKind::Split && m.at == at) {
          dir = m.direction;
          found = true;
          break;
        }
      }
      if (!found)
        fail(ErrorCode::NotCarried,
             "recorded word does not split at branch " + std::to_string(at));
      break;
    }
    case LaminationProxy::Kind::Carried: {
      if (!lambda.carried)
        fail(ErrorCode::NotCarried, "carried proxy is empty");
      dir = carried_split_direction(*lambda.carried, at);
      break;
    }
    default:
      fail(ErrorCode::Internal, "bad proxy kind");
  }
  return LambdaSplitResult{split(track, SplitMove{at, dir}), dir};
}

MoveOutcome full_lambda_split(const TrainTrack& track,
                              const LaminationProxy& lambda) {
  std::vector<int> larges = large_branches(track);
  MoveOutcome out{track, identity_correspondence(track)};
  LaminationProxy current = lambda;
  for (int e : larges) {
    int cur = out.correspondence.at(e);
    LambdaSplitResult step = lambda_split(out.track, cur, current);
    if (current.kind == LaminationProxy::Kind::Measure)
      current.measure = measure_after_split(
          current.measure, out.track, SplitMove{cur, step.direction},
          step.outcome.correspondence);
    std::map<int, int> composed;
    for (auto [a, b] : out.correspondence)
      composed[a] = step.outcome.correspondence[b];
    out.track = std::move(step.outcome.track);
    out.correspondence = std::move(composed);
  }
  return out;
}

}  // namespace ttkit
