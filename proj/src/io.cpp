#include "ttkit/io.hpp"

#include <fstream>
#include <sstream>

namespace ttkit {

namespace {

std::vector<std::string> content_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t b = line.find_last_not_of(" \t\r");
    lines.push_back(line.substr(a, b - a + 1));
  }
  return lines;
}

HalfBranch parse_half(const std::string& tok) {
  size_t dot = tok.rfind('.');
  if (dot == std::string::npos)
    fail(ErrorCode::ParseError, "bad half-branch '" + tok + "'");
  try {
    int branch = std::stoi(tok.substr(0, dot));
    int end = std::stoi(tok.substr(dot + 1));
    if (end != 0 && end != 1) throw std::invalid_argument("end");
    return {branch, end};
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, "bad half-branch '" + tok + "'");
  }
}

HalfBranch parse_slot(const std::string& tok, const std::string& prefix) {
  if (tok.rfind(prefix, 0) != 0)
    fail(ErrorCode::ParseError, "expected '" + prefix + "...', got '" + tok +
                                    "'");
  return parse_half(tok.substr(prefix.size()));
}

int parse_int(const std::string& tok, const std::string& what) {
  try {
    return std::stoi(tok);
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, "bad " + what + " '" + tok + "'");
  }
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> toks;
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

}  // namespace

TrainTrack parse_track(std::istream& in) {
  auto lines = content_lines(in);
  if (lines.empty() || lines[0] != "tt v1")
    fail(ErrorCode::ParseError, "missing 'tt v1' header");
  TrainTrack track;
  std::optional<SurfaceSignature> advisory;
  for (size_t i = 1; i < lines.size(); ++i) {
    auto toks = split_ws(lines[i]);
    if (toks[0] == "surface") {
      SurfaceSignature sig;
      for (size_t j = 1; j < toks.size(); ++j) {
        if (toks[j].rfind("g=", 0) == 0)
          sig.genus = parse_int(toks[j].substr(2), "genus");
        else if (toks[j].rfind("k=", 0) == 0)
          sig.punctures = parse_int(toks[j].substr(2), "puncture count");
        else
          fail(ErrorCode::ParseError, "bad surface field '" + toks[j] + "'");
      }
      advisory = sig;
    } else if (toks[0] == "sw") {
      if (toks.size() != 5)
        fail(ErrorCode::ParseError, "bad switch line '" + lines[i] + "'");
      SwitchRecord sw;
      sw.id = parse_int(toks[1], "switch id");
      sw.large = parse_slot(toks[2], "L=");
      sw.small_left = parse_slot(toks[3], "A=");
      sw.small_right = parse_slot(toks[4], "B=");
      track.switches.push_back(sw);
    } else if (toks[0] == "punct") {
      if (toks.size() != 2)
        fail(ErrorCode::ParseError, "bad punct line '" + lines[i] + "'");
      parse_region_key(toks[1]);
      track.punctured_regions.insert(toks[1]);
    } else {
      fail(ErrorCode::ParseError, "unknown directive '" + toks[0] + "'");
    }
  }
  track.sort_switches();
  if (advisory) {
    SurfaceSignature actual = surface_signature(track);
    if (actual != *advisory)
      fail(ErrorCode::ParseError,
           "surface line says g=" + std::to_string(advisory->genus) + " k=" +
               std::to_string(advisory->punctures) + " but the track has g=" +
               std::to_string(actual.genus) + " k=" +
               std::to_string(actual.punctures));
  }
  return track;
}

TrainTrack parse_track_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_track(ss);
}

TrainTrack load_track(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::ParseError, "cannot open " + path);
  return parse_track(f);
}

std::string serialize_track(const TrainTrack& track) {
  TrainTrack t = track;
  t.sort_switches();
  std::ostringstream out;
  out << "tt v1\n";
  SurfaceSignature sig = surface_signature(t);
  out << "surface g=" << sig.genus << " k=" << sig.punctures << "\n";
  for (const auto& sw : t.switches)
    out << "sw " << sw.id << " L=" << to_string(sw.large)
        << " A=" << to_string(sw.small_left)
        << " B=" << to_string(sw.small_right) << "\n";
  for (const auto& key : t.punctured_regions) out << "punct " << key << "\n";
  return out.str();
}

TransverseMeasure parse_measure(std::istream& in) {
  auto lines = content_lines(in);
  if (lines.empty() || lines[0] != "measure v1")
    fail(ErrorCode::ParseError, "missing 'measure v1' header");
  TransverseMeasure mu;
  for (size_t i = 1; i < lines.size(); ++i) {
    auto toks = split_ws(lines[i]);
    if (toks.size() != 3 || toks[0] != "w")
      fail(ErrorCode::ParseError, "bad measure line '" + lines[i] + "'");
    int branch = parse_int(toks[1], "branch id");
    try {
      mu.weights[branch] = Rational(toks[2]);
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "bad weight '" + toks[2] + "'");
    }
  }
  return mu;
}

TransverseMeasure load_measure(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::ParseError, "cannot open " + path);
  return parse_measure(f);
}

std::string serialize_measure(const TransverseMeasure& mu) {
  std::ostringstream out;
  out << "measure v1\n";
  for (const auto& [b, w] : mu.weights) out << "w " << b << " " << w << "\n";
  return out.str();
}

std::string to_string(const Move& move) {
  std::ostringstream out;
  switch (move.kind) {
    case MoveKind::Split: out << "split "; break;
    case MoveKind::Shift: out << "shift "; break;
    case MoveKind::Collapse: out << "collapse "; break;
  }
  out << move.at;
  if (move.kind != MoveKind::Shift)
    out << " " << (move.direction == Direction::Right ? "R" : "L");
  return out.str();
}

Move parse_move(const std::string& line) {
  auto toks = split_ws(line);
  if (toks.empty()) fail(ErrorCode::ParseError, "empty move");
  Move m;
  if (toks[0] == "split")
    m.kind = MoveKind::Split;
  else if (toks[0] == "shift")
    m.kind = MoveKind::Shift;
  else if (toks[0] == "collapse")
    m.kind = MoveKind::Collapse;
  else
    fail(ErrorCode::ParseError, "unknown move '" + toks[0] + "'");
  size_t want = m.kind == MoveKind::Shift ? 2 : 3;
  if (toks.size() != want)
    fail(ErrorCode::ParseError, "bad move line '" + line + "'");
  m.at = parse_int(toks[1], "branch id");
  if (m.kind != MoveKind::Shift) {
    if (toks[2] == "R")
      m.direction = Direction::Right;
    else if (toks[2] == "L")
      m.direction = Direction::Left;
    else
      fail(ErrorCode::ParseError, "bad direction '" + toks[2] + "'");
  }
  return m;
}

std::vector<Move> parse_word(std::istream& in) {
  std::vector<Move> word;
  for (const auto& line : content_lines(in)) word.push_back(parse_move(line));
  return word;
}

std::vector<Move> load_word(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::ParseError, "cannot open " + path);
  return parse_word(f);
}

std::string serialize_word(const std::vector<Move>& word) {
  std::ostringstream out;
  for (const Move& m : word) out << to_string(m) << "\n";
  return out.str();
}

}  // namespace ttkit
