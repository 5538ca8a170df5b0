#include "error.hpp"

namespace fed3r {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::ok: return "ok";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::label_out_of_range: return "label_out_of_range";
    case Errc::not_positive_definite: return "not_positive_definite";
    case Errc::empty_dataset: return "empty_dataset";
    case Errc::io_failure: return "io_failure";
    case Errc::bad_magic: return "bad_magic";
    case Errc::version_unsupported: return "version_unsupported";
    case Errc::truncated_file: return "truncated_file";
    case Errc::invalid_manifest: return "invalid_manifest";
    case Errc::too_many_clients: return "too_many_clients";
    case Errc::empty_class: return "empty_class";
    case Errc::pool_exhausted: return "pool_exhausted";
    case Errc::unknown_algorithm: return "unknown_algorithm";
    case Errc::invalid_bandwidth: return "invalid_bandwidth";
    case Errc::empty_grid: return "empty_grid";
    case Errc::internal: return "internal";
  }
  return "unknown";
}

}  // namespace fed3r
