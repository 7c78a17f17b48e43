#include "ttkit/generators.hpp"

#include <algorithm>

#include "ttkit/io.hpp"

namespace ttkit {

namespace {

// Local slot conventions for the standard-form assembly. The geometric
// picture (spiraling leaves collapsed onto a loop per curve, one stem per
// pants boundary) fixes the graph; the A/B orientation of a few slots is a
// chirality choice resolved by trying the finitely many uniform conventions
// in a fixed order and keeping the first complete result.
struct Convention {
  bool s_in_A;       // loop small branch in the small_left slot
  bool c_next_in_A;  // 3-curve piece: forward connector in small_left
  bool m0_in_A;      // puncture loop end 0 in small_left (2-curve piece)
  int d_large;       // 2-curve piece inner switch: large slot = t/a_x/a_y
  bool d_swap;       // ... and the order of the remaining two
  bool z0_in_A;      // puncture loop end 0 in small_left (1-curve piece)
};

void check_gluing(const PantsData& data) {
  std::vector<std::vector<int>> spirals(data.curves.size());
  for (const auto& piece : data.pieces) {
    if (piece.boundaries.size() != 3)
      fail(ErrorCode::InvalidGluing, "a pair of pants has three boundaries");
    int ncurves = 0;
    std::set<int> seen;
    for (const auto& b : piece.boundaries) {
      if (!b.is_curve) continue;
      ++ncurves;
      if (b.curve < 0 || b.curve >= (int)data.curves.size())
        fail(ErrorCode::InvalidGluing,
             "boundary names curve index " + std::to_string(b.curve));
      if (!seen.insert(b.curve).second)
        fail(ErrorCode::InvalidGluing,
             "self-glued pants piece (curve on two of its own boundaries) "
             "is not supported");
      if (b.spiral != 1 && b.spiral != -1)
        fail(ErrorCode::InvalidGluing, "spiral orientation must be +1 or -1");
      spirals[b.curve].push_back(b.spiral);
    }
    if (ncurves == 0)
      fail(ErrorCode::InvalidGluing,
           "a pants piece without pants-curve boundaries cannot be glued");
  }
  for (size_t i = 0; i < spirals.size(); ++i) {
    if (spirals[i].size() != 2)
      fail(ErrorCode::InvalidGluing,
           "curve index " + std::to_string(i) + " must bound exactly two "
           "pants sides");
    if (spirals[i][0] == spirals[i][1])
      fail(ErrorCode::InvalidGluing,
           "the leaves spiraling about curve index " + std::to_string(i) +
               " must define opposite orientations on its two sides");
  }
}

std::optional<PantsTrack> assemble(const PantsData& data,
                                   const Convention& cv) {
  int nb = 0, ns = 0;
  size_t d = data.curves.size();
  std::vector<int> e(d), s(d), u(d), w(d);
  for (size_t i = 0; i < d; ++i) {
    e[i] = nb++;
    s[i] = nb++;
    u[i] = ns++;
    w[i] = ns++;
  }
  // attach[i][0] / attach[i][1]: the stem half-branch landing at u/w.
  std::vector<std::array<std::optional<HalfBranch>, 2>> attach(d);
  auto claim = [&](const PantsBoundary& b, HalfBranch stem) {
    int side = b.spiral == 1 ? 0 : 1;
    if (attach[b.curve][side])
      fail(ErrorCode::InvalidGluing, "curve side attached twice");
    attach[b.curve][side] = stem;
  };

  TrainTrack track;
  for (const auto& piece : data.pieces) {
    std::vector<const PantsBoundary*> curves_here;
    for (const auto& b : piece.boundaries)
      if (b.is_curve) curves_here.push_back(&b);
    if (curves_here.size() == 3) {
      int y0 = ns++, y1 = ns++, y2 = ns++;
      int c0 = nb++, c1 = nb++, c2 = nb++;  // c_j joins y_j to y_{j+1}
      int a0 = nb++, a1 = nb++, a2 = nb++;
      int ys[3] = {y0, y1, y2};
      int cs[3] = {c0, c1, c2};
      int as[3] = {a0, a1, a2};
      for (int j = 0; j < 3; ++j) {
        HalfBranch next{cs[j], 0}, prev{cs[(j + 2) % 3], 1};
        SwitchRecord sw{ys[j], {as[j], 0}, next, prev};
        if (!cv.c_next_in_A) std::swap(sw.small_left, sw.small_right);
        track.switches.push_back(sw);
        claim(*curves_here[j], {as[j], 1});
      }
    } else if (curves_here.size() == 2) {
      int C = ns++, D = ns++;
      int m = nb++, t = nb++, ax = nb++, ay = nb++;
      SwitchRecord swc{C, {t, 0}, {m, 0}, {m, 1}};
      if (!cv.m0_in_A) std::swap(swc.small_left, swc.small_right);
      track.switches.push_back(swc);
      std::vector<HalfBranch> halves{{t, 1}, {ax, 0}, {ay, 0}};
      HalfBranch large = halves[cv.d_large];
      halves.erase(halves.begin() + cv.d_large);
      if (cv.d_swap) std::swap(halves[0], halves[1]);
      track.switches.push_back(SwitchRecord{D, large, halves[0], halves[1]});
      claim(*curves_here[0], {ax, 1});
      claim(*curves_here[1], {ay, 1});
    } else {
      int Y = ns++;
      int a = nb++, z = nb++;
      SwitchRecord sw{Y, {a, 0}, {z, 0}, {z, 1}};
      if (!cv.z0_in_A) std::swap(sw.small_left, sw.small_right);
      track.switches.push_back(sw);
      claim(*curves_here[0], {a, 1});
    }
  }
  int total_punctures = 0;
  for (const auto& piece : data.pieces)
    for (const auto& b : piece.boundaries)
      if (!b.is_curve) ++total_punctures;

  for (size_t i = 0; i < d; ++i) {
    if (!attach[i][0] || !attach[i][1])
      fail(ErrorCode::InvalidGluing, "curve side left unattached");
    SwitchRecord su{u[i], {e[i], 0}, {s[i], 0}, *attach[i][0]};
    SwitchRecord sw{w[i], {e[i], 1}, {s[i], 1}, *attach[i][1]};
    if (!cv.s_in_A) {
      std::swap(su.small_left, su.small_right);
      std::swap(sw.small_left, sw.small_right);
    }
    track.switches.push_back(su);
    track.switches.push_back(sw);
  }
  track.sort_switches();

  try {
    int monogons = 0;
    for (const auto& r : trace_regions(track)) {
      if (r.cusps == 1) {
        ++monogons;
        track.punctured_regions.insert(r.key);
      } else if (r.cusps != 3) {
        return std::nullopt;
      }
    }
    if (monogons != total_punctures) return std::nullopt;
    if (!validate(track).ok()) return std::nullopt;
    if (!is_recurrent(track)) return std::nullopt;
    std::vector<int> expect_large(e.begin(), e.end());
    std::sort(expect_large.begin(), expect_large.end());
    if (large_branches(track) != expect_large) return std::nullopt;
  } catch (const Error&) {
    return std::nullopt;
  }

  PantsTrack out;
  out.track = std::move(track);
  for (size_t i = 0; i < d; ++i)
    out.curve_paths[data.curves[i]] = CurvePath{e[i], s[i]};
  return out;
}

}  // namespace

PantsTrack pants_standard_track(const PantsData& data) {
  check_gluing(data);
  for (int s_in_A : {0, 1})
    for (int c_next : {0, 1})
      for (int m0 : {0, 1})
        for (int dl : {0, 1, 2})
          for (int dsw : {0, 1})
            for (int z0 : {0, 1}) {
              Convention cv{(bool)s_in_A, (bool)c_next, (bool)m0,
                            dl,           (bool)dsw,    (bool)z0};
              if (auto got = assemble(data, cv)) return *std::move(got);
            }
  fail(ErrorCode::InvalidGluing,
       "no slot convention assembles a complete standard track for this "
       "pants data");
}

std::vector<Move> twist_word(const PantsTrack& pants, int curve) {
  auto it = pants.curve_paths.find(curve);
  if (it == pants.curve_paths.end())
    fail(ErrorCode::UnknownCurve, "no pants curve " + std::to_string(curve));
  const CurvePath& cp = it->second;
  auto [usw, uslot] = pants.track.locate({cp.small, 0});
  auto [wsw, wslot] = pants.track.locate({cp.small, 1});
  (void)usw;
  (void)wsw;
  if (uslot != wslot || uslot == Slot::Large)
    fail(ErrorCode::Internal, "curve loop has inconsistent small slots");
  Direction dir = uslot == Slot::SmallRight ? Direction::Right
                                            : Direction::Left;
  return {Move{MoveKind::Split, cp.large, dir},
          Move{MoveKind::Split, cp.small, dir}};
}

PantsData pants_data_S05() {
  PantsData data;
  data.curves = {0, 1};
  PantsBoundary c0p{true, 0, +1}, c0m{true, 0, -1};
  PantsBoundary c1p{true, 1, +1}, c1m{true, 1, -1};
  PantsBoundary punct{};
  data.pieces = {PantsPiece{{c0p, punct, punct}},
                 PantsPiece{{c0m, c1p, punct}},
                 PantsPiece{{c1m, punct, punct}}};
  return data;
}

PantsData pants_data_S20() {
  PantsData data;
  data.curves = {0, 1, 2};
  PantsPiece top{{{true, 0, +1}, {true, 1, +1}, {true, 2, +1}}};
  PantsPiece bottom{{{true, 0, -1}, {true, 1, -1}, {true, 2, -1}}};
  data.pieces = {top, bottom};
  return data;
}

namespace {

// Frozen catalog sources; see docs/catalog_verification.md for the one-time
// hand verification of each entry.
const char* kCatalogS05A = R"(tt v1
surface g=0 k=5
sw 0 L=11.0 A=1.1 B=5.0
sw 1 L=3.1 A=1.0 B=2.1
sw 2 L=9.1 A=8.1 B=8.0
sw 3 L=7.1 A=3.0 B=0.1
sw 4 L=2.0 A=4.1 B=9.0
sw 5 L=5.1 A=7.0 B=4.0
sw 6 L=11.1 A=10.1 B=10.0
sw 7 L=0.0 A=6.0 B=6.1
punct 1.0.L
punct 1.1.R
punct 10.0.L
punct 6.1.R
punct 8.0.L
)";

const char* kCatalogS12A = R"(tt v1
surface g=1 k=2
sw 0 L=0.1 A=10.1 B=1.1
sw 1 L=2.0 A=5.1 B=11.1
sw 2 L=2.1 A=0.0 B=1.0
sw 3 L=10.0 A=3.1 B=9.1
sw 4 L=8.1 A=9.0 B=7.1
sw 5 L=4.0 A=7.0 B=3.0
sw 6 L=11.0 A=8.0 B=6.0
sw 7 L=4.1 A=5.0 B=6.1
punct 0.1.R
punct 4.1.R
)";

const char* kCatalogS20A = R"(tt v1
surface g=2 k=0
sw 0 L=17.1 A=11.0 B=1.0
sw 1 L=15.1 A=7.1 B=12.0
sw 2 L=6.0 A=7.0 B=13.0
sw 3 L=10.0 A=8.0 B=1.1
sw 4 L=11.1 A=2.0 B=4.1
sw 5 L=5.1 A=0.0 B=9.0
sw 6 L=3.0 A=9.1 B=6.1
sw 7 L=8.1 A=4.0 B=3.1
sw 8 L=0.1 A=17.0 B=12.1
sw 9 L=13.1 A=14.1 B=2.1
sw 10 L=10.1 A=15.0 B=16.0
sw 11 L=5.0 A=14.0 B=16.1
)";

}  // namespace

PantsTrack catalog_pants(const std::string& name) {
  if (name == "pants_S05") return pants_standard_track(pants_data_S05());
  if (name == "pants_S20") return pants_standard_track(pants_data_S20());
  fail(ErrorCode::UnknownName, "no pants catalog entry '" + name + "'");
}

TrainTrack catalog(const std::string& name) {
  if (name == "pants_S05" || name == "pants_S20")
    return catalog_pants(name).track;
  if (name == "S05A") return parse_track_string(kCatalogS05A);
  if (name == "S12A") return parse_track_string(kCatalogS12A);
  if (name == "S20A") return parse_track_string(kCatalogS20A);
  fail(ErrorCode::UnknownName, "no catalog entry '" + name + "'");
}

}  // namespace ttkit
