#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kst {

enum class ErrorCode {
  DimensionMismatch,
  NonFiniteInput,
  InsufficientData,
  DegenerateBandwidth,
  EmptySet,
  InfeasibleNu,
  SolverDidNotConverge,
  DomainError,
  DegenerateVariance,
  MalformedCsv,
  ParseError,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is
/// stable and intended for programmatic dispatch; what() carries context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by CSV parsing; line and column are 1-based (column 0 when the
/// whole line is at fault).
class CsvError : public Error {
 public:
  CsvError(ErrorCode code, std::size_t line, std::size_t column, const std::string& detail)
      : Error(code, "line " + std::to_string(line) +
                        (column > 0 ? ", column " + std::to_string(column) : std::string{}) +
                        ": " + detail),
        line_(line),
        column_(column) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// The dual solver hit its iteration cap. The best feasible iterate is kept
/// so callers can decide whether it is good enough.
class SolverDidNotConverge : public Error {
 public:
  SolverDidNotConverge(std::vector<double> best_alphas, double objective, double kkt_gap,
                       std::size_t iterations)
      : Error(ErrorCode::SolverDidNotConverge,
              "no convergence after " + std::to_string(iterations) +
                  " iterations (KKT gap " + std::to_string(kkt_gap) + ")"),
        best_alphas_(std::move(best_alphas)),
        objective_(objective),
        kkt_gap_(kkt_gap) {}

  [[nodiscard]] const std::vector<double>& best_alphas() const noexcept { return best_alphas_; }
  [[nodiscard]] double objective() const noexcept { return objective_; }
  [[nodiscard]] double kkt_gap() const noexcept { return kkt_gap_; }

 private:
  std::vector<double> best_alphas_;
  double objective_;
  double kkt_gap_;
};

}  // namespace kst
