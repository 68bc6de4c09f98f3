#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace iecsi {

// Precondition of an operation was not met by the caller.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input was well-formed but the computation is undefined for it
// (zero variance, no nonzero pairs, undefined kappa, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A file or document failed to parse. `where` is "file:line" or a field path.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what),
        where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

// One or more study invariants were violated.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "validation failed";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

// Inter-rater agreement below the configured threshold; the summaries
// must be re-annotated before knowledge gain can be computed.
class GateError : public std::runtime_error {
 public:
  explicit GateError(std::map<std::string, std::optional<double>> kappas)
      : std::runtime_error(describe(kappas)), kappas_(std::move(kappas)) {}
  const std::map<std::string, std::optional<double>>& kappas() const noexcept {
    return kappas_;
  }

 private:
  static std::string describe(const std::map<std::string, std::optional<double>>& k) {
    std::string out = "summary kappa below threshold, re-annotation required:";
    for (const auto& [dim, value] : k) {
      out += " " + dim + "=" + (value ? std::to_string(*value) : std::string("undefined"));
    }
    return out;
  }
  std::map<std::string, std::optional<double>> kappas_;
};

}  // namespace iecsi
