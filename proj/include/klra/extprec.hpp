#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <stdexcept>
#include <string>

namespace klra {

namespace mp = boost::multiprecision;

/// Software binary floats with a fixed mantissa width. The width is a
/// compile-time parameter of cpp_bin_float, so runtime selection dispatches
/// over this fixed set; requests are rounded up to the next available width.
using ext128 = mp::number<mp::cpp_bin_float<128, mp::digit_base_2>, mp::et_off>;
using ext192 = mp::number<mp::cpp_bin_float<192, mp::digit_base_2>, mp::et_off>;
using ext256 = mp::number<mp::cpp_bin_float<256, mp::digit_base_2>, mp::et_off>;

enum class PrecisionMode { fp64, ext128, ext192, ext256 };

inline int mantissa_bits(PrecisionMode mode) {
  switch (mode) {
    case PrecisionMode::fp64:
      return 53;
    case PrecisionMode::ext128:
      return 128;
    case PrecisionMode::ext192:
      return 192;
    case PrecisionMode::ext256:
      return 256;
  }
  throw std::logic_error("mantissa_bits: unknown mode");
}

inline std::string precision_name(PrecisionMode mode) {
  switch (mode) {
    case PrecisionMode::fp64:
      return "double";
    case PrecisionMode::ext128:
      return "ext128";
    case PrecisionMode::ext192:
      return "ext192";
    case PrecisionMode::ext256:
      return "ext256";
  }
  throw std::logic_error("precision_name: unknown mode");
}

/// "double", "ext128", or "extN" for any N <= 256 (rounded up to the next
/// available width).
PrecisionMode parse_precision(const std::string& text);

/// Smallest extended mode with at least `bits` mantissa bits.
PrecisionMode extended_mode_for_bits(int bits);

/// Call f with a value of the scalar type selected by mode; f must be a
/// generic callable (templated lambda).
template <typename F>
decltype(auto) dispatch_precision(PrecisionMode mode, F&& f) {
  switch (mode) {
    case PrecisionMode::fp64:
      return f(double{});
    case PrecisionMode::ext128:
      return f(ext128{});
    case PrecisionMode::ext192:
      return f(ext192{});
    case PrecisionMode::ext256:
      return f(ext256{});
  }
  throw std::logic_error("dispatch_precision: unknown mode");
}

}  // namespace klra
