#pragma once

#include <stdexcept>
#include <string>

namespace bearing_forms {

enum class ErrorKind {
  SelfLoop,
  DuplicateEdge,
  VertexOutOfRange,
  EmptyEdgeSet,
  NotUnitVector,
  CoincidentAgents,
  InvalidWindow,
  EmptyDirectionSet,
  DisconnectedGraph,
  NotAcyclic,
  TooFewEdges,
  BaseNotBpe,
  InvalidNewEdges,
  RankHypothesisFails,
  OutsideHorizon,
  UnsupportedDimension,
  InvalidGain,
  GainConditionViolated,
  NonPositiveSamples,
  InvalidInput,
  BearingLoss,
  ParseError,
};

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Two agents sharing an edge are closer than the coincidence tolerance.
class CoincidentAgentsError : public Error {
 public:
  CoincidentAgentsError(int edge, double separation, const std::string& message)
      : Error(ErrorKind::CoincidentAgents, message),
        edge_(edge),
        separation_(separation) {}

  /// Offending edge index (0-based into the graph's edge list), -1 if the
  /// failure happened outside a graph context (e.g. a raw bearing call).
  int edge() const noexcept { return edge_; }
  double separation() const noexcept { return separation_; }

 private:
  int edge_;
  double separation_;
};

/// A simulation ran into a sub-tolerance edge separation and aborted.
class BearingLossError : public Error {
 public:
  BearingLossError(double time, int edge, const std::string& message)
      : Error(ErrorKind::BearingLoss, message), time_(time), edge_(edge) {}

  double time() const noexcept { return time_; }
  int edge() const noexcept { return edge_; }

 private:
  double time_;
  int edge_;
};

/// The rank hypothesis of the single-PE-bearing equivalence failed.
class RankHypothesisError : public Error {
 public:
  RankHypothesisError(double time, int rank, int expected, const std::string& message)
      : Error(ErrorKind::RankHypothesisFails, message),
        time_(time),
        rank_(rank),
        expected_(expected) {}

  double time() const noexcept { return time_; }
  int rank() const noexcept { return rank_; }
  int expected_rank() const noexcept { return expected_; }

 private:
  double time_;
  int rank_;
  int expected_;
};

/// Scenario text could not be parsed; carries the 1-based source location.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error(ErrorKind::ParseError, message), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace bearing_forms
