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

#ifndef MONITORBENCH_NORMALIZER_HPP_
#define MONITORBENCH_NORMALIZER_HPP_

#include <cmath>
#include <cstdint>

namespace mb {

// Welford streaming mean/variance with deterministic shard merge.
class RunningNormalizer {
 public:
  static constexpr double kEps = 1e-8;

  void Update(double x) {
    ++count_;
    double d = x - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (x - mean_);
  }

  void Merge(const RunningNormalizer& o) {
    if (o.count_ == 0) return;
    if (count_ == 0) {
      *this = o;
      return;
    }
    double na = static_cast<double>(count_);
    double nb = static_cast<double>(o.count_);
    double d = o.mean_ - mean_;
    double n = na + nb;
    m2_ += o.m2_ + d * d * na * nb / n;
    mean_ += d * nb / n;
    count_ += o.count_;
  }

  double Apply(double x) const { return (x - Mean()) / (Std() + kEps); }

  std::int64_t count() const { return count_; }
  double Mean() const { return mean_; }
  double Variance() const {
    return count_ > 1 ? m2_ / static_cast<double>(count_) : 0.0;
  }
  double Std() const { return std::sqrt(Variance()); }

 private:
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace mb

#endif  // MONITORBENCH_NORMALIZER_HPP_
