#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace gencomp {

/// Exact densities. Values are always normalized (12/16 is stored as 3/4).
using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// 1 - 2^{-k} for k >= 0, or 1 - 2^{|k|} for negative k.
inline Rational one_minus_pow2_neg(int k) {
  if (k >= 0) {
    const std::int64_t den = std::int64_t{1} << k;
    return Rational(den - 1, den);
  }
  return Rational(1 - (std::int64_t{1} << -k), 1);
}

}  // namespace gencomp
