// Copyright 2026 The fairwalk Authors
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

#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "fairwalk/common.hpp"

namespace fairwalk {

// Walker/Vose alias table: O(1) draws from a fixed categorical distribution.
class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(const std::vector<double>& weights) {
    const std::size_t n = weights.size();
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw Error("alias table: negative weight");
      total += w;
    }
    if (n == 0 || !(total > 0.0)) throw Error("alias table: no positive weight");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = weights[i] * static_cast<double>(n) / total;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t l = large.back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (auto i : large) prob_[i] = 1.0;
    for (auto i : small) prob_[i] = 1.0;  // numerical leftovers
  }

  std::size_t size() const { return prob_.size(); }

  std::size_t sample(Rng& rng) const {
    // One uniform picks the column; its fractional part decides the coin.
    const double u = rng.uniform() * static_cast<double>(prob_.size());
    const auto column = std::min(static_cast<std::size_t>(u), prob_.size() - 1);
    return u - static_cast<double>(column) < prob_[column] ? column : alias_[column];
  }

  // Exact probability of drawing index i (for tests).
  double probability(std::size_t i) const {
    const double n = static_cast<double>(prob_.size());
    double p = prob_[i] / n;
    for (std::size_t c = 0; c < prob_.size(); ++c) {
      if (alias_[c] == i && prob_[c] < 1.0) p += (1.0 - prob_[c]) / n;
    }
    return p;
  }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace fairwalk
