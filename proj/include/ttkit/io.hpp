#pragma once

#include <iosfwd>
#include <string>

#include "ttkit/moves.hpp"
#include "ttkit/track.hpp"

namespace ttkit {

// .tt text format:
//   tt v1
//   surface g=<int> k=<int>          (advisory, cross-checked on parse)
//   sw <id> L=<b>.<0|1> A=<b>.<0|1> B=<b>.<0|1>
//   punct <branch>.<0|1>.<L|R>
TrainTrack parse_track(std::istream& in);
TrainTrack parse_track_string(const std::string& text);
TrainTrack load_track(const std::string& path);
std::string serialize_track(const TrainTrack& track);

// measure files:
//   measure v1
//   w <branch> <p>[/<q>]
TransverseMeasure parse_measure(std::istream& in);
TransverseMeasure load_measure(const std::string& path);
std::string serialize_measure(const TransverseMeasure& mu);

// move words, one move per line:
//   split <branch> R|L
//   shift <branch>
//   collapse <branch> R|L
std::vector<Move> parse_word(std::istream& in);
std::vector<Move> load_word(const std::string& path);
std::string serialize_word(const std::vector<Move>& word);
std::string to_string(const Move& move);
Move parse_move(const std::string& line);

}  // namespace ttkit
