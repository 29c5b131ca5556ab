#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace deepbarcode {

/// Failure categories surfaced by the library. The CLI maps `Config` and
/// `Usage` to exit code 2 and everything else to exit code 1.
enum class ErrorKind {
  Format,      // bad magic, malformed header, pad bits set
  Truncation,  // payload shorter/longer than the header declares
  Data,        // non-finite values and similar content errors
  Parse,       // text that is not what it should be
  Domain,      // value outside its allowed range (e.g. negative label)
  Dimension,   // mismatched lengths or shapes
  Parameter,   // bad argument to an operation
  Bounds,      // index out of range
  Config,      // invalid search configuration
  Io,          // open/read/write/rename failures
  Usage,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace deepbarcode
