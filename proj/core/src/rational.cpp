// Copyright 2026 The monitorbench Authors. All rights reserved.
//
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

#include "monitorbench/rational.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace mb {
namespace {

bool AllDigits(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

Rational ParseRational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](unsigned char c) { return std::isspace(c) != 0; }),
          s.end());
  if (s.empty()) throw Error("empty rational literal");

  bool negative = false;
  if (s[0] == '+' || s[0] == '-') {
    negative = (s[0] == '-');
    s.erase(s.begin());
  }

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (!AllDigits(num) || !AllDigits(den)) {
      throw Error("bad ratio literal: " + std::string(text));
    }
    BigInt d(den);
    if (d == 0) throw Error("zero denominator: " + std::string(text));
    Rational q(BigInt(num), d);
    return negative ? Rational(-q) : q;
  }

  auto dot = s.find('.');
  std::string int_part = (dot == std::string::npos) ? s : s.substr(0, dot);
  std::string frac_part = (dot == std::string::npos) ? "" : s.substr(dot + 1);
  if (int_part.empty()) int_part = "0";
  if (!AllDigits(int_part) || (!frac_part.empty() && !AllDigits(frac_part))) {
    throw Error("bad decimal literal: " + std::string(text));
  }
  BigInt scale = 1;
  for (size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
  BigInt num = BigInt(int_part) * scale + (frac_part.empty() ? BigInt(0) : BigInt(frac_part));
  Rational q(num, scale);
  return negative ? Rational(-q) : q;
}

std::string FormatRatio(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

std::string FormatDecimal(const Rational& q, int sig_digits) {
  if (q == 0) return "0";
  BigInt num = numerator(q);
  BigInt den = denominator(q);
  bool negative = num < 0;
  if (negative) num = -num;

  // Strip factors of 2 and 5 to detect a terminating expansion.
  BigInt d = den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }

  std::string digits;
  BigInt int_part;
  int frac_len = 0;
  if (d == 1) {
    int shift = std::max(twos, fives);
    BigInt scaled = num;
    for (int i = 0; i < shift; ++i) scaled *= 10;
    scaled /= den;
    int_part = scaled;
    frac_len = shift;
  } else {
    // Non-terminating expansion: round to sig_digits significant digits.
    BigInt ip = num / den;
    std::string ip_str = ip.str();
    int int_digits = (ip == 0) ? 0 : static_cast<int>(ip_str.size());
    int frac_digits;
    if (int_digits > 0) {
      frac_digits = std::max(0, sig_digits - int_digits);
    } else {
      // Count leading zeros after the decimal point.
      int lead = 0;
      BigInt r = num % den;
      while (r * 10 < den) { r *= 10; ++lead; }
      frac_digits = lead + sig_digits;
    }
    BigInt scaled = num;
    for (int i = 0; i < frac_digits; ++i) scaled *= 10;
    // Round half away from zero.
    scaled = (scaled * 2 + den) / (den * 2);
    int_part = scaled;
    frac_len = frac_digits;
  }

  std::string s = int_part.str();
  if (static_cast<int>(s.size()) <= frac_len) {
    s.insert(0, frac_len - s.size() + 1, '0');
  }
  std::string out;
  if (frac_len == 0) {
    out = s;
  } else {
    out = s.substr(0, s.size() - frac_len) + "." + s.substr(s.size() - frac_len);
    // Trim trailing zeros but keep at least one digit after the point.
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return negative ? "-" + out : out;
}

}  // namespace mb
