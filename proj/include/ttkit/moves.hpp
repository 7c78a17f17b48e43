#pragma once

#include <map>
#include <vector>

#include "ttkit/track.hpp"

namespace ttkit {

enum class Direction { Right, Left };

inline Direction opposite(Direction d) {
  return d == Direction::Right ? Direction::Left : Direction::Right;
}

struct SplitMove {
  int at = -1;
  Direction direction = Direction::Right;

  auto operator<=>(const SplitMove&) const = default;
};

enum class MoveKind { Split, Shift, Collapse };

struct Move {
  MoveKind kind = MoveKind::Split;
  int at = -1;
  Direction direction = Direction::Right;  // ignored for shifts

  auto operator<=>(const Move&) const = default;
};

// Branch identifiers are stable across moves in this implementation (the
// split branch keeps its id on the diagonal), but nothing downstream may
// rely on that: every outcome carries the explicit bijection.
struct MoveOutcome {
  TrainTrack track;
  std::map<int, int> correspondence;  // old branch id -> new branch id
};

MoveOutcome split(const TrainTrack& track, const SplitMove& move);
MoveOutcome shift(const TrainTrack& track, int branch);
MoveOutcome collapse(const TrainTrack& track, int at, Direction direction);

MoveOutcome apply_move(const TrainTrack& track, const Move& move);
MoveOutcome apply_sequence(const TrainTrack& track,
                           const std::vector<Move>& word);

// Measure transport through a split: winners and bystanders keep their
// weights, the diagonal gets the (positive) difference of the loser weights.
TransverseMeasure measure_after_split(const TransverseMeasure& mu,
                                      const TrainTrack& track,
                                      const SplitMove& move,
                                      const std::map<int, int>& correspondence);

struct CarriedPosition;  // module carrying

struct LaminationProxy {
  // exactly one of the three is meaningful
  enum class Kind { Measure, Word, Carried } kind = Kind::Measure;
  TransverseMeasure measure;
  std::vector<Move> word;  // replayed from the track it was recorded on
  const CarriedPosition* carried = nullptr;
};

LaminationProxy measure_proxy(TransverseMeasure mu);

struct LambdaSplitResult {
  MoveOutcome outcome;
  Direction direction;
};

LambdaSplitResult lambda_split(const TrainTrack& track, int at,
                               const LaminationProxy& lambda);

// Direction choice only; does not apply the move.
Direction lambda_split_direction(const TrainTrack& track, int at,
                                 const TransverseMeasure& mu);

MoveOutcome full_lambda_split(const TrainTrack& track,
                              const LaminationProxy& lambda);

}  // namespace ttkit
