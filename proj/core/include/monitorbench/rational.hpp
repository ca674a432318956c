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

#ifndef MONITORBENCH_RATIONAL_HPP_
#define MONITORBENCH_RATIONAL_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace mb {

using Rational = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<
        boost::multiprecision::backends::cpp_int_backend<>>,
    boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::cpp_int;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Parses "3", "-2.5", "0.125", or a ratio "3/2" into an exact rational.
Rational ParseRational(std::string_view text);

// Renders an exact decimal expansion when the denominator is 2^a*5^b,
// otherwise rounds to `sig_digits` significant digits.
std::string FormatDecimal(const Rational& q, int sig_digits = 12);

// Renders "p/q" (or just "p" for integers).
std::string FormatRatio(const Rational& q);

inline double ToDouble(const Rational& q) { return q.convert_to<double>(); }

inline Rational RationalAbs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace mb

#endif  // MONITORBENCH_RATIONAL_HPP_
