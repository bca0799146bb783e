#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace xbnet {

enum class errc {
  io_error,
  malformed_header,
  malformed_period,
  malformed_value,
  duplicate_record,
  gap_in_periods,
  empty_panel,
  range_out_of_bounds,
  unknown_entity,
  too_short,
  zero_variance,
  length_mismatch,
  out_of_range,
  invalid_factor,
  empty_denominator,
  window_too_short,
  window_too_long,
  split_out_of_range,
};

inline std::string_view errc_name(errc code) {
  switch (code) {
    case errc::io_error: return "io-error";
    case errc::malformed_header: return "malformed-header";
    case errc::malformed_period: return "malformed-period";
    case errc::malformed_value: return "malformed-value";
    case errc::duplicate_record: return "duplicate-record";
    case errc::gap_in_periods: return "gap-in-periods";
    case errc::empty_panel: return "empty-panel";
    case errc::range_out_of_bounds: return "range-out-of-bounds";
    case errc::unknown_entity: return "unknown-entity";
    case errc::too_short: return "too-short";
    case errc::zero_variance: return "zero-variance";
    case errc::length_mismatch: return "length-mismatch";
    case errc::out_of_range: return "out-of-range";
    case errc::invalid_factor: return "invalid-factor";
    case errc::empty_denominator: return "empty-denominator";
    case errc::window_too_short: return "window-too-short";
    case errc::window_too_long: return "window-too-long";
    case errc::split_out_of_range: return "split-out-of-range";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace xbnet
