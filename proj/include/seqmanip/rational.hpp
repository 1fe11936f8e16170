// Copyright 2026 The seqmanip Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace seqmanip {

using BigInt = boost::multiprecision::cpp_int;

// Always kept in lowest terms with a positive denominator.
using Rational = boost::multiprecision::cpp_rational;

namespace detail {

inline bool is_decimal_integer(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s.front() == '-' || s.front() == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

inline BigInt parse_big_int(std::string_view s) {
  std::string digits(s);
  if (!digits.empty() && digits.front() == '+') digits.erase(0, 1);
  return BigInt(digits);
}

}  // namespace detail

// Accepts "p" or "p/q" with decimal integers, q != 0.
inline Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  const auto num = text.substr(0, slash);
  if (!detail::is_decimal_integer(num))
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  if (slash == std::string_view::npos) return Rational(detail::parse_big_int(num));
  const auto den = text.substr(slash + 1);
  if (!detail::is_decimal_integer(den))
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  BigInt d = detail::parse_big_int(den);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rational(detail::parse_big_int(num), d);
}

inline std::string to_string(const Rational& r) {
  const BigInt& num = boost::multiprecision::numerator(r);
  const BigInt& den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

// Rounded to `places` decimals for human-readable output only.
inline std::string to_decimal(const Rational& r, int places = 6) {
  BigInt scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  BigInt num = boost::multiprecision::numerator(r);
  const BigInt& den = boost::multiprecision::denominator(r);
  const bool negative = num < 0;
  if (negative) num = -num;
  BigInt scaled = (num * scale * 2 + den) / (den * 2);
  BigInt whole = scaled / scale;
  BigInt frac = scaled % scale;
  std::ostringstream out;
  if (negative && scaled != 0) out << '-';
  out << whole.str();
  if (places > 0) out << '.' << std::setw(places) << std::setfill('0') << frac.str();
  return out.str();
}

}  // namespace seqmanip
