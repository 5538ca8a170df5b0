#ifndef FED3R_CORE_ERROR_HPP
#define FED3R_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fed3r {

// Numeric values are shared with the public C header (fed3r.h); the C API
// layer static_asserts the correspondence.
enum class Errc : int {
  ok = 0,
  invalid_argument = 1,
  dimension_mismatch = 2,
  label_out_of_range = 3,
  not_positive_definite = 4,
  empty_dataset = 5,
  io_failure = 6,
  bad_magic = 7,
  version_unsupported = 8,
  truncated_file = 9,
  invalid_manifest = 10,
  too_many_clients = 11,
  empty_class = 12,
  pool_exhausted = 13,
  unknown_algorithm = 14,
  invalid_bandwidth = 15,
  empty_grid = 16,
  internal = 17,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace fed3r

#endif
