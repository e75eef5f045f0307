#ifndef FATT_ERRORS_HPP
#define FATT_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fatt {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition or inconsistent configuration. The CLI maps these
// to usage errors (exit 1).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Problems with input data: unreadable files, malformed datasets,
// mismatched index files. The CLI maps these to exit 2.
class DataError : public Error {
 public:
  using Error::Error;
};

// A persisted index failed validation while being read back.
class CorruptIndex : public DataError {
 public:
  CorruptIndex(const std::string& what, std::uint64_t byte_offset)
      : DataError(what + " (at byte offset " + std::to_string(byte_offset) + ")"),
        offset_(byte_offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace fatt

#endif
