// Copyright 2026 The rcsf Authors. All Rights Reserved.
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

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include "rcsf/eval.hpp"

using Catch::Approx;

TEST_CASE("F1 from published precision and recall") {
  CHECK(std::abs(rcsf::f1_from(98.17, 95.16) - 96.64) <= 0.01);
  CHECK(std::abs(rcsf::f1_from(98.0, 87.0) - 2.0 * 98.0 * 87.0 / 185.0) <= 1e-12);
  CHECK(std::lround(rcsf::f1_from(98.0, 87.0)) == 92);
  CHECK(rcsf::f1_from(0.0, 0.0) == 0.0);
}

TEST_CASE("metrics from confusion counts") {
  rcsf::ConfusionCounts c;
  for (int i = 0; i < 8; ++i) c.add(+1, +1);
  for (int i = 0; i < 2; ++i) c.add(+1, -1);
  c.add(-1, +1);
  for (int i = 0; i < 9; ++i) c.add(-1, -1);
  CHECK(c.tp == 8);
  CHECK(c.fn == 2);
  CHECK(c.fp == 1);
  CHECK(c.tn == 9);
  const auto m = rcsf::metrics(c);
  CHECK(*m.precision_pct == Approx(800.0 / 9.0));
  CHECK(*m.recall_pct == Approx(80.0));
  CHECK(*m.f1_pct == Approx(2.0 * 8 / (2.0 * 8 + 1 + 2) * 100.0));

  SECTION("undefined quantities stay absent") {
    rcsf::ConfusionCounts none;
    none.tn = 5;
    const auto e = rcsf::metrics(none);
    CHECK_FALSE(e.precision_pct);
    CHECK_FALSE(e.recall_pct);
    CHECK_FALSE(e.f1_pct);
    CHECK(rcsf::format_pct(e.f1_pct) == "n/a");

    rcsf::ConfusionCounts missed;
    missed.fn = 3;
    missed.tn = 2;
    const auto f = rcsf::metrics(missed);
    CHECK_FALSE(f.precision_pct);
    CHECK(*f.recall_pct == 0.0);
    CHECK_FALSE(f.f1_pct);

    rcsf::ConfusionCounts wrong;
    wrong.fn = 1;
    wrong.fp = 1;
    CHECK(*rcsf::metrics(wrong).f1_pct == 0.0);
  }
  SECTION("F1 lies between precision and recall") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> d(0, 50);
    for (int i = 0; i < 200; ++i) {
      rcsf::ConfusionCounts r;
      r.tp = static_cast<std::size_t>(d(rng)) + 1;
      r.fp = static_cast<std::size_t>(d(rng));
      r.fn = static_cast<std::size_t>(d(rng));
      const auto q = rcsf::metrics(r);
      CHECK(*q.f1_pct >= std::min(*q.precision_pct, *q.recall_pct) - 1e-12);
      CHECK(*q.f1_pct <= std::max(*q.precision_pct, *q.recall_pct) + 1e-12);
    }
  }
}

TEST_CASE("harmful rate and verdict") {
  std::vector<int> labels(60, -1);
  std::fill(labels.begin(), labels.begin() + 12, 1);
  const auto r = rcsf::harmful_rate(labels);
  CHECK(r.harmful_rate_pct == 20.0);
  CHECK(r.verdict == rcsf::Verdict::general);
  CHECK(rcsf::harmful_rate(labels, 20.0, false).verdict == rcsf::Verdict::x_rated);
  labels[12] = 1;
  CHECK(rcsf::harmful_rate(labels).verdict == rcsf::Verdict::x_rated);

  CHECK(rcsf::harmful_rate(std::vector<int>(7, -1)).harmful_rate_pct == 0.0);
  const auto all = rcsf::harmful_rate(std::vector<int>(7, 1));
  CHECK(all.harmful_rate_pct == 100.0);
  CHECK(all.verdict == rcsf::Verdict::x_rated);
  CHECK_THROWS_AS(rcsf::harmful_rate(std::vector<int>{}), rcsf::InvalidArgument);

  SECTION("order does not matter and swapping classes complements the rate") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<int> v(1 + rng() % 40);
      for (int& x : v) x = rng() % 3 == 0 ? 1 : -1;
      const double rate = rcsf::harmful_rate(v).harmful_rate_pct;
      std::shuffle(v.begin(), v.end(), rng);
      CHECK(rcsf::harmful_rate(v).harmful_rate_pct == rate);
      for (int& x : v) x = -x;
      CHECK(rcsf::harmful_rate(v).harmful_rate_pct == Approx(100.0 - rate));
    }
  }
  SECTION("report output") {
    const auto j = rcsf::to_json(r);
    CHECK(j["verdict"] == "general");
    CHECK(j["obscene_clips"] == 12);
    CHECK(j["total_clips"] == 60);
    CHECK(j["clips"].size() == 60);
    CHECK(rcsf::to_text(r).find("-> general") != std::string::npos);
  }
}
