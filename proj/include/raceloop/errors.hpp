#pragma once

#include <stdexcept>

namespace raceloop {

struct TooFewPoints : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DegenerateInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct OutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct InvalidDt : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SelfIntersectingWalls : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyScan : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoWalls : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidWidth : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonpositiveDenominator : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct TrackParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownKey : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParams : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace raceloop
