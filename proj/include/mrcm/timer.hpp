// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace mrcm {

class StopWatch {
 public:
  StopWatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }
  void restart() { start_ = std::chrono::steady_clock::now(); }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Accumulated per-stage wall times, in insertion order.
struct StageTimings {
  std::vector<std::pair<std::string, double>> stages;

  void add(const std::string& stage, double seconds) {
    for (auto& s : stages)
      if (s.first == stage) {
        s.second += seconds;
        return;
      }
    stages.emplace_back(stage, seconds);
  }

  double get(const std::string& stage) const {
    for (const auto& s : stages)
      if (s.first == stage) return s.second;
    return 0.0;
  }

  void merge(const StageTimings& other) {
    for (const auto& s : other.stages) add(s.first, s.second);
  }
};

}  // namespace mrcm
