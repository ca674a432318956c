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

#ifndef MONITORBENCH_METRICS_HPP_
#define MONITORBENCH_METRICS_HPP_

#include <iosfwd>
#include <utility>
#include <vector>

#include "monitorbench/world.hpp"

namespace mb {

struct MetricsReport {
  std::vector<std::pair<Rational, Rational>> igi_series;  // (t, IGI) at events
  std::vector<std::pair<Rational, Rational>> iwi_series;  // (t, IWI) at events
  Rational agi = 0;
  Rational wi = 0;
  Rational tail_wi = 0;
  Rational T = 0;
  Rational horizon = 0;
};

// IGI(t) = (1/|V|) sum_v w(v) L_v(t).
Rational Igi(const MonitorGraph& g, const EventLog& log, const Rational& t);
// AGI(H): exact integral of the piecewise-linear IGI over [0, H], divided by H.
Rational Agi(const MonitorGraph& g, const EventLog& log, const Rational& H);
// IWI(t) = M(t); WI(H) = sup over [0, H].
Rational Iwi(const MonitorGraph& g, const EventLog& log, const Rational& t);
Rational Wi(const MonitorGraph& g, const EventLog& log, const Rational& H);
Rational TailWi(const MonitorGraph& g, const EventLog& log, const Rational& T,
                const Rational& H);

MetricsReport ComputeMetrics(const MonitorGraph& g, const EventLog& log,
                             const Rational& T, const Rational& H);

// CSV columns (t, igi, iwi), one row per event time.
void WriteMetricsCsv(const MetricsReport& report, std::ostream& out,
                     int sig_digits = 12);
// Summary JSON with (agi, wi, tail_wi, T, H).
void WriteMetricsSummary(const MetricsReport& report, std::ostream& out,
                         int sig_digits = 12);

}  // namespace mb

#endif  // MONITORBENCH_METRICS_HPP_
