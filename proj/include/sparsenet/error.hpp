#ifndef SPARSENET_ERROR_HPP
#define SPARSENET_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sparsenet {

/// Bad input: arguments out of range, inconsistent shapes, malformed files.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A text or binary artifact could not be parsed.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : ValidationError(what), position_(position) {}

  /// Line number (text formats) or bit offset (binary formats).
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A numerical stage missed its error budget or produced non-finite values.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& stage, const std::string& what, double achieved)
      : std::runtime_error(stage + ": " + what), stage_(stage), achieved_(achieved) {}

  const std::string& stage() const noexcept { return stage_; }
  double achieved() const noexcept { return achieved_; }

 private:
  std::string stage_;
  double achieved_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace detail
}  // namespace sparsenet

#endif  // SPARSENET_ERROR_HPP
