/* Copyright 2026 The hetsgd Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "hetsgd/aggregator.hpp"

namespace hetsgd {
namespace {

std::vector<GradientMessage> random_messages(std::mt19937_64& rng, int workers, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<GradientMessage> out(workers);
  for (int m = 0; m < workers; ++m) {
    out[m].worker_id = m;
    for (int j = 0; j < dim; ++j) out[m].gradient.push_back(normal(rng));
  }
  return out;
}

std::vector<double> random_simplex(std::mt19937_64& rng, int workers) {
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  std::vector<double> w(workers);
  double total = 0.0;
  for (auto& v : w) total += v = dist(rng);
  for (auto& v : w) v /= total;
  return w;
}

TEST(AllreduceMean, Examples) {
  const std::vector<GradientMessage> two = {{0, {1, 2}, 0.5}, {1, {3, 4}, 0.5}};
  EXPECT_EQ(allreduce_mean(two), (std::vector<double>{2, 3}));
  const std::vector<GradientMessage> one = {{0, {5, 6}, 1.0}};
  EXPECT_EQ(allreduce_mean(one), (std::vector<double>{5, 6}));
}

TEST(AllreduceMean, MatchesSummationOracle) {
  std::mt19937_64 rng(11);
  const auto messages = random_messages(rng, 8, 33);
  const auto mean = allreduce_mean(messages);
  for (int j = 0; j < 33; ++j) {
    long double acc = 0.0L;
    for (const auto& msg : messages) acc += msg.gradient[j];
    EXPECT_NEAR(mean[j], static_cast<double>(acc / 8.0L), 1e-12);
  }
}

TEST(AllreduceMean, DimensionMismatch) {
  const std::vector<GradientMessage> bad = {{0, {1, 2}, 0.5}, {1, {3}, 0.5}};
  EXPECT_THROW(allreduce_mean(bad), DimensionMismatch);
  const std::vector<GradientMessage> dup = {{0, {1}, 0.5}, {0, {3}, 0.5}};
  EXPECT_THROW(allreduce_mean(dup), DimensionMismatch);
  EXPECT_THROW(allreduce_mean({}), EmptyInput);
}

TEST(WeightedAggregate, Examples) {
  const std::vector<GradientMessage> msgs = {{0, {4}, 0}, {1, {0}, 0}};
  EXPECT_EQ(weighted_aggregate(msgs, std::vector<double>{0.25, 0.75}), (std::vector<double>{1}));

  const std::vector<GradientMessage> basis = {{0, {1, 0, 0}, 0}, {1, {0, 1, 0}, 0}, {2, {0, 0, 1}, 0}};
  const std::vector<double> w = {1.0 / 7, 2.0 / 7, 4.0 / 7};
  const auto out = weighted_aggregate(basis, w);
  for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(out[j], w[j]);
}

TEST(WeightedAggregate, UsesMessageWeights) {
  const std::vector<GradientMessage> msgs = {{1, {8}, 0.75}, {0, {4}, 0.25}};
  EXPECT_EQ(weighted_aggregate(msgs), (std::vector<double>{7}));
}

TEST(WeightedAggregate, RejectsBadWeights) {
  const std::vector<GradientMessage> msgs = {{0, {4}, 0}, {1, {0}, 0}};
  EXPECT_THROW(weighted_aggregate(msgs, std::vector<double>{0.5, 0.6}), InvalidWeights);
  EXPECT_THROW(weighted_aggregate(msgs, std::vector<double>{1.0, 0.0}), InvalidWeights);
  EXPECT_THROW(weighted_aggregate(msgs, std::vector<double>{1.0}), DimensionMismatch);
}

TEST(WeightedAggregate, UniformWeightsReduceToMean) {
  std::mt19937_64 rng(5);
  for (int workers : {1, 2, 3, 7}) {
    const auto msgs = random_messages(rng, workers, 16);
    const std::vector<double> w(workers, 1.0 / workers);
    const auto a = weighted_aggregate(msgs, w);
    const auto b = allreduce_mean(msgs);
    for (int j = 0; j < 16; ++j) EXPECT_NEAR(a[j], b[j], 1e-12);
  }
}

TEST(Aggregation, ArrivalOrderDoesNotMatter) {
  std::mt19937_64 rng(21);
  auto msgs = random_messages(rng, 6, 10);
  const auto w = random_simplex(rng, 6);
  const auto mean = allreduce_mean(msgs);
  const auto weighted = weighted_aggregate(msgs, w);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(msgs.begin(), msgs.end(), rng);
    EXPECT_EQ(allreduce_mean(msgs), mean);
    EXPECT_EQ(weighted_aggregate(msgs, w), weighted);
  }
}

TEST(Aggregation, Linearity) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int workers = 1 + static_cast<int>(rng() % 6);
    const auto g = random_messages(rng, workers, 12);
    const auto h = random_messages(rng, workers, 12);
    const auto w = random_simplex(rng, workers);
    const double alpha = coef(rng), beta = coef(rng);
    auto combo = g;
    for (int m = 0; m < workers; ++m)
      for (int j = 0; j < 12; ++j) combo[m].gradient[j] = alpha * g[m].gradient[j] + beta * h[m].gradient[j];

    const auto mg = allreduce_mean(g), mh = allreduce_mean(h), mc = allreduce_mean(combo);
    const auto wg = weighted_aggregate(g, w), wh = weighted_aggregate(h, w), wc = weighted_aggregate(combo, w);
    for (int j = 0; j < 12; ++j) {
      EXPECT_NEAR(mc[j], alpha * mg[j] + beta * mh[j], 1e-10);
      EXPECT_NEAR(wc[j], alpha * wg[j] + beta * wh[j], 1e-10);
    }
  }
}

TEST(Aggregation, Convexity) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int workers = 1 + static_cast<int>(rng() % 8);
    const auto msgs = random_messages(rng, workers, 5);
    const auto w = random_simplex(rng, workers);
    const auto mean = allreduce_mean(msgs);
    const auto weighted = weighted_aggregate(msgs, w);
    for (int j = 0; j < 5; ++j) {
      double lo = msgs[0].gradient[j], hi = lo;
      for (const auto& m : msgs) {
        lo = std::min(lo, m.gradient[j]);
        hi = std::max(hi, m.gradient[j]);
      }
      const double slack = 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
      EXPECT_GE(mean[j], lo - slack);
      EXPECT_LE(mean[j], hi + slack);
      EXPECT_GE(weighted[j], lo - slack);
      EXPECT_LE(weighted[j], hi + slack);
    }
  }
}

TEST(Aggregation, ParallelKernelIsBitwiseSerial) {
  std::mt19937_64 rng(99);
  const auto msgs = random_messages(rng, 5, 4096);
  const auto w = random_simplex(rng, 5);
  EXPECT_EQ(allreduce_mean(msgs, ExecutionPolicy::kParallel), allreduce_mean(msgs, ExecutionPolicy::kSerial));
  EXPECT_EQ(weighted_aggregate(msgs, w, ExecutionPolicy::kParallel),
            weighted_aggregate(msgs, w, ExecutionPolicy::kSerial));
}

}  // namespace
}  // namespace hetsgd
