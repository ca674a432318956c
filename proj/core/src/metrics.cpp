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

#include "monitorbench/metrics.hpp"

#include <algorithm>
#include <ostream>

#include "json.hpp"

namespace mb {

Rational Igi(const MonitorGraph& g, const EventLog& log, const Rational& t) {
  Rational sum = 0;
  for (int v = 0; v < g.num_nodes(); ++v) {
    sum += g.weight(v) * LatencyAt(g, log, v, t);
  }
  return sum / g.num_nodes();
}

Rational Agi(const MonitorGraph& g, const EventLog& log, const Rational& H) {
  if (H <= 0) throw Error("nonpositive AGI horizon");
  if (H > log.end_time) throw Error("AGI horizon beyond log");
  Rational integral = 0;
  for (const EventRecord& rec : log.records) {
    Rational t_end = std::min(rec.t + rec.dt, H);
    if (t_end <= rec.t) break;
    Rational dt = t_end - rec.t;
    std::vector<char> occupied(g.num_nodes(), 0);
    for (const RobotPose& pose : rec.poses) {
      if (pose.stationary()) occupied[pose.to] = 1;
    }
    for (int v = 0; v < g.num_nodes(); ++v) {
      if (occupied[v]) continue;
      // integral of (L_v + s) ds over [0, dt]
      integral += g.weight(v) * (rec.latencies[v] * dt + dt * dt / 2);
    }
  }
  return integral / (Rational(g.num_nodes()) * H);
}

Rational Iwi(const MonitorGraph& g, const EventLog& log, const Rational& t) {
  return WorstWeightedLatency(g, log, t);
}

Rational Wi(const MonitorGraph& g, const EventLog& log, const Rational& H) {
  return TailSup(g, log, 0, H);
}

Rational TailWi(const MonitorGraph& g, const EventLog& log, const Rational& T,
                const Rational& H) {
  return TailSup(g, log, T, H);
}

MetricsReport ComputeMetrics(const MonitorGraph& g, const EventLog& log,
                             const Rational& T, const Rational& H) {
  MetricsReport report;
  report.T = T;
  report.horizon = H;
  for (const EventRecord& rec : log.records) {
    if (rec.t > H) break;
    report.igi_series.emplace_back(rec.t, Igi(g, log, rec.t));
    report.iwi_series.emplace_back(rec.t, Iwi(g, log, rec.t));
  }
  report.agi = (H > 0) ? Agi(g, log, H) : Rational(0);
  report.wi = Wi(g, log, H);
  report.tail_wi = TailWi(g, log, T, H);
  return report;
}

void WriteMetricsCsv(const MetricsReport& report, std::ostream& out,
                     int sig_digits) {
  out << "t,igi,iwi\n";
  for (size_t i = 0; i < report.igi_series.size(); ++i) {
    out << FormatDecimal(report.igi_series[i].first, sig_digits) << ","
        << FormatDecimal(report.igi_series[i].second, sig_digits) << ","
        << FormatDecimal(report.iwi_series[i].second, sig_digits) << "\n";
  }
}

void WriteMetricsSummary(const MetricsReport& report, std::ostream& out,
                         int sig_digits) {
  nlohmann::json j;
  j["agi"] = FormatDecimal(report.agi, sig_digits);
  j["wi"] = FormatDecimal(report.wi, sig_digits);
  j["tail_wi"] = FormatDecimal(report.tail_wi, sig_digits);
  j["T"] = FormatDecimal(report.T, sig_digits);
  j["H"] = FormatDecimal(report.horizon, sig_digits);
  out << j.dump(2) << "\n";
}

}  // namespace mb
