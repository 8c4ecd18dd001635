#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asd {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnbalancedStatistics : Error { using Error::Error; };
struct InvalidDistribution : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };
struct StateMismatch : Error { using Error::Error; };
struct InvalidPayoff : Error { using Error::Error; };
struct MalformedRow : Error { using Error::Error; };
struct StateSpaceTooLarge : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct StepTooLarge : Error { using Error::Error; };
struct InvalidStep : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };

struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

struct TreeBudgetExceeded : Error {
  TreeBudgetExceeded(const std::string& what, std::size_t partial_nodes)
      : Error(what), partial_nodes(partial_nodes) {}
  std::size_t partial_nodes;
};

}  // namespace asd
