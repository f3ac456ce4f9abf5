#pragma once

#include <stdexcept>
#include <string>

namespace engage {

// Exit-code buckets used by the CLI: 1 input data, 2 configuration,
// 3 internal invariant violation.
enum class ErrorKind { Input = 1, Config = 2, Internal = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct InputError : Error {
  explicit InputError(const std::string& w) : Error(ErrorKind::Input, w) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::Config, w) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& w) : Error(ErrorKind::Internal, w) {}
};

// ingest
struct MissingColumnError : InputError {
  explicit MissingColumnError(const std::string& column)
      : InputError("missing column: " + column), column(column) {}
  std::string column;
};

struct BadTimestampError : InputError {
  BadTimestampError(std::size_t row, const std::string& raw)
      : InputError("row " + std::to_string(row) + ": bad timestamp \"" + raw + "\""),
        row(row),
        raw(raw) {}
  std::size_t row;
  std::string raw;
};

struct EmptyUserError : InputError {
  explicit EmptyUserError(std::size_t row)
      : InputError("row " + std::to_string(row) + ": empty user"), row(row) {}
  std::size_t row;
};

struct DuplicateUserError : InputError {
  explicit DuplicateUserError(const std::string& user)
      : InputError("duplicate user with conflicting grades: " + user), user(user) {}
  std::string user;
};

// sessionizer
struct InsufficientDataError : InputError {
  explicit InsufficientDataError(const std::string& w) : InputError(w) {}
};

// chapter metric
struct EmptyPopulationError : InputError {
  EmptyPopulationError() : InputError("min-max scaling over an empty population") {}
};

struct WeightMismatchError : ConfigError {
  explicit WeightMismatchError(const std::string& w) : ConfigError(w) {}
};

// evaluation
struct DegenerateInputError : InputError {
  explicit DegenerateInputError(const std::string& w) : InputError(w) {}
};

struct TooFewStudentsError : InputError {
  explicit TooFewStudentsError(std::size_t n)
      : InputError("quintile assignment needs at least 5 students, got " +
                   std::to_string(n)) {}
};

struct MissingGradeError : InputError {
  explicit MissingGradeError(const std::string& user)
      : InputError("no grade for user " + user), user(user) {}
  std::string user;
};

struct SingleClassError : InputError {
  explicit SingleClassError(const std::string& w) : InputError(w) {}
};

struct EmptySubsetError : ConfigError {
  EmptySubsetError() : ConfigError("indicator subset is empty") {}
};

// pipeline
struct InvalidConfigError : ConfigError {
  explicit InvalidConfigError(const std::string& w) : ConfigError(w) {}
};

struct MissingGradesError : InputError {
  explicit MissingGradesError(const std::string& w) : InputError(w) {}
};

struct CohortMismatchError : InputError {
  CohortMismatchError(const std::string& user, const std::string& detail)
      : InputError("cohort mismatch: user " + user + " " + detail), user(user) {}
  std::string user;
};

}  // namespace engage
