#ifndef IDENTLINK_ERRORS_HPP
#define IDENTLINK_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace identlink {

// Thrown when a linear-algebra or sampling step fails numerically
// (e.g. a Cholesky pivot goes non-positive).  `index` identifies the
// failing pivot, observation, or sweep, depending on context.
class numerical_error : public std::runtime_error {
 public:
  numerical_error(const std::string& what, std::ptrdiff_t index = -1)
      : std::runtime_error(what), index_(index) {}
  std::ptrdiff_t index() const { return index_; }

 private:
  std::ptrdiff_t index_;
};

// Thrown by the CSV/config readers.  Rows and columns are 1-based;
// 0 means "not applicable".
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t row = 0, std::size_t col = 0)
      : std::runtime_error(what + " (row " + std::to_string(row) + ", column " +
                           std::to_string(col) + ")"),
        row_(row),
        col_(col) {}
  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

}  // namespace identlink

#endif  // IDENTLINK_ERRORS_HPP
