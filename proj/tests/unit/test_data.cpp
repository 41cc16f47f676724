/*
 * Copyright 2026 The protohg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <cstring>

#include "protohg/data.hpp"
#include "protohg/io.hpp"
#include "support.hpp"

namespace protohg::data {
namespace {

RawCorpus ramp_corpus(std::size_t T, std::size_t N) {
  RawCorpus c;
  c.values = Tensor({T, N, 1});
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t n = 0; n < N; ++n) c.values[t * N + n] = 100.0 * n + t;
  c.observed.assign(T * N, 1);
  return c;
}

// Writes a float32 tensor file of the given shape plus its descriptor.
std::filesystem::path write_f32(const std::filesystem::path& dir, std::size_t T, std::size_t N,
                                std::size_t C) {
  std::vector<float> v(T * N * C);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(i % 997);
  std::string bytes(v.size() * sizeof(float), '\0');
  std::memcpy(bytes.data(), v.data(), bytes.size());
  io::atomic_write(dir / "values.f32", bytes);
  Descriptor d;
  d.nodes = N;
  d.timesteps = T;
  d.channels = C;
  d.values_path = "values.f32";
  d.dtype = "float32";
  d.write(dir / "data.desc");
  return dir / "data.desc";
}

// Days covered by an inclusive calendar range, counted independently of
// CivilTime via the proleptic Gregorian day number.
long days_from_civil(long y, long m, long d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const long yoe = y - era * 400;
  const long doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const long doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

TEST(LoadPems, PublishedShapesAreHonored) {
  // Node and step counts of two public benchmarks, 5-minute sampling.
  struct Case {
    std::size_t nodes, steps;
    long y0, m0, d0, y1, m1, d1;
  };
  for (const auto& c : {Case{170, 17856, 2016, 7, 1, 2016, 8, 31},
                        Case{307, 16992, 2018, 1, 1, 2018, 2, 28}}) {
    const long days = days_from_civil(c.y1, c.m1, c.d1) - days_from_civil(c.y0, c.m0, c.d0) + 1;
    EXPECT_EQ(static_cast<std::size_t>(days * 288), c.steps);
    auto dir = testing::temp_dir("pems_shape");
    auto corpus = load_pems(write_f32(dir, c.steps, c.nodes, 1));
    EXPECT_EQ(corpus.nodes(), c.nodes);
    EXPECT_EQ(corpus.steps(), c.steps);
  }
}

TEST(LoadPems, MultiChannelKeepsFlowFirst) {
  auto dir = testing::temp_dir("pems_multi");
  auto corpus = load_pems(write_f32(dir, 30, 4, 3));
  EXPECT_EQ(corpus.channels(), 3u);
  EXPECT_EQ(corpus.flow(1, 2), static_cast<double>((1 * 4 + 2) * 3));
}

TEST(LoadPems, Errors) {
  auto dir = testing::temp_dir("pems_err");
  EXPECT_THROW(load_pems(dir / "absent.desc"), DataError);
  Descriptor d;
  d.nodes = 0;
  d.timesteps = 0;
  d.values_path = "values.f32";
  EXPECT_THROW(load_pems(d, dir), DataError);  // zero-length tensor
  write_f32(dir, 10, 2, 1);
  d.nodes = 3;
  d.timesteps = 10;
  try {
    load_pems(d, dir);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("shape mismatch"), std::string::npos);
  }
  d.nodes = 2;
  d.period_minutes = 7;
  EXPECT_THROW(load_pems(d, dir), DataError);
  std::ofstream(dir / "bad.desc") << "nodes=2\ntimesteps=10\nvalues_path=values.f32\ncolour=red\n";
  EXPECT_THROW(load_pems(dir / "bad.desc"), DataError);
}

TEST(LoadPems, CsvWithGapsIsInterpolated) {
  auto dir = testing::temp_dir("pems_csv");
  std::ofstream(dir / "v.csv") << "a,b\n";
  {
    std::ofstream f(dir / "v.csv");
    f << "n0,n1\n";
    for (int t = 0; t < 40; ++t) {
      if (t == 5) {
        f << "nan," << t << "\n";
      } else {
        f << 2 * t << "," << t << "\n";
      }
    }
  }
  std::ofstream(dir / "d.desc") << "nodes=2\ntimesteps=40\nvalues_path=v.csv\ndtype=csv\n";
  auto c = load_pems(dir / "d.desc");
  EXPECT_DOUBLE_EQ(c.flow(5, 0), 10.0);
  EXPECT_EQ(c.observed[5 * 2 + 0], 0);
  EXPECT_EQ(c.observed[5 * 2 + 1], 1);
}

TEST(Impute, DensityLimitAndEdges) {
  Tensor v({10, 1, 1});
  std::iota(v.vec().begin(), v.vec().end(), 0.0);
  std::vector<std::uint8_t> obs;
  v[0] = std::nan("");
  v[9] = std::nan("");
  EXPECT_THROW(impute_missing(v, obs, 0.2), DataError);  // 20% >= limit
  EXPECT_EQ(impute_missing(v, obs, 0.5), 2u);
  EXPECT_EQ(v[0], 1.0);  // nearest observed value at the edges
  EXPECT_EQ(v[9], 8.0);
  Tensor all_nan({3, 1, 1}, std::numeric_limits<double>::quiet_NaN());
  EXPECT_THROW(impute_missing(all_nan, obs, 1.1), DataError);
}

TEST(TimeIndices, CalendarExamples) {
  RawCorpus c = ramp_corpus(2017, 1);
  c.start = CivilTime::parse("2024-01-01 00:00");  // Monday
  EXPECT_EQ(c.start.weekday(), 0);
  const auto idx = compute_time_indices(c);
  ASSERT_EQ(idx.tod.size(), 2017u);
  EXPECT_EQ(idx.tod[0], 0);
  EXPECT_EQ(idx.dow[0], 0);
  EXPECT_EQ(idx.tod[287], 287);
  EXPECT_EQ(idx.dow[287], 0);
  EXPECT_EQ(idx.tod[288], 0);
  EXPECT_EQ(idx.dow[288], 1);
  EXPECT_EQ(idx.tod[2016], 0);
  EXPECT_EQ(idx.dow[2016], 0);
  for (std::size_t t = 0; t + 288 < idx.tod.size(); ++t) EXPECT_EQ(idx.tod[t + 288], idx.tod[t]);
}

TEST(TimeIndices, OffsetStartAndBadPeriod) {
  RawCorpus c = ramp_corpus(4, 1);
  c.start = CivilTime::parse("2024-01-07T23:55");  // Sunday
  auto idx = compute_time_indices(c);
  EXPECT_EQ(idx.tod[0], 287);
  EXPECT_EQ(idx.dow[0], 6);
  EXPECT_EQ(idx.tod[1], 0);
  EXPECT_EQ(idx.dow[1], 0);
  EXPECT_EQ(slots_per_day(5), 288);
  EXPECT_EQ(slots_per_day(120), 12);
  EXPECT_THROW(slots_per_day(7), DataError);
  EXPECT_THROW(slots_per_day(0), DataError);
  EXPECT_THROW(CivilTime::parse("2024-13-01 00:00"), DataError);
}

TEST(Windows, CountFormulaAndBoundary) {
  for (auto [T, expect] : {std::pair<std::size_t, std::size_t>{100, 77}, {24, 1}}) {
    auto c = ramp_corpus(T, 2);
    EXPECT_EQ(make_windows(c, compute_time_indices(c), 12, 12).size(), expect);
  }
  auto c = ramp_corpus(23, 2);
  EXPECT_THROW(make_windows(c, compute_time_indices(c), 12, 12), DataError);
}

TEST(Windows, ReconstructionAndChannels) {
  auto c = ramp_corpus(40, 3);
  auto w = make_windows(c, compute_time_indices(c), 5, 4);
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto win = w.at(i);
    for (std::size_t l = 0; l < 5; ++l)
      for (std::size_t n = 0; n < 3; ++n) {
        EXPECT_EQ(win.x[(l * 3 + n) * 3], c.flow(i + l, n));
        EXPECT_EQ(win.x[(l * 3 + n) * 3 + 1], win.tod_past[l] / 288.0);
        EXPECT_EQ(win.x[(l * 3 + n) * 3 + 2], win.dow_past[l] / 7.0);
      }
    for (std::size_t h = 0; h < 4; ++h) EXPECT_EQ(win.y[h * 3 + 1], c.flow(i + 5 + h, 1));
  }
}

TEST(Split, SizesFollowFloorRule) {
  EXPECT_EQ(split_sizes(100, {6, 2, 2}), (std::array<std::size_t, 3>{60, 20, 20}));
  EXPECT_EQ(split_sizes(10, {6, 2, 2}), (std::array<std::size_t, 3>{6, 2, 2}));
  EXPECT_EQ(split_sizes(7, {6, 2, 2}), (std::array<std::size_t, 3>{4, 1, 2}));
  EXPECT_THROW(split_sizes(7, {6, 0, 2}), DataError);
}

TEST(Split, IsChronological) {
  auto c = ramp_corpus(200, 2);
  auto s = split(make_windows(c, compute_time_indices(c), 12, 12));
  EXPECT_LT(s.train.starts().back(), s.val.starts().front());
  EXPECT_LT(s.val.starts().back(), s.test.starts().front());
  EXPECT_EQ(s.train.size() + s.val.size() + s.test.size(), 177u);
}

TEST(Normalizer, Examples) {
  const std::vector<double> v{0.0, 2.0};
  auto n = fit_normalizer(std::span<const double>(v));
  EXPECT_EQ(n.mean, 1.0);
  EXPECT_EQ(n.std, 1.0);
  EXPECT_EQ(n.normalize(0.0), -1.0);
  EXPECT_EQ(n.normalize(2.0), 1.0);
  const std::vector<double> flat(5, 3.0);
  EXPECT_THROW(fit_normalizer(std::span<const double>(flat)), DataError);
}

TEST(Normalizer, RoundTripAndRepeatedApplication) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-500, 500);
  Normalizer n{37.5, 12.25};
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    EXPECT_NEAR(n.denormalize(n.normalize(v)), v, 1e-6 * std::max(1.0, std::fabs(v)));
    EXPECT_NEAR(n.denormalize(n.denormalize(n.normalize(n.normalize(v)))), v,
                1e-6 * std::max(1.0, std::fabs(v)));
  }
}

TEST(Normalizer, TrainingStepsAreStandardized) {
  auto syn = generate_synthetic(4, 300, 5);
  auto w = make_windows(syn.corpus, compute_time_indices(syn.corpus), 12, 12);
  auto s = split(w);
  auto n = fit_normalizer(s.train);
  const std::size_t first = s.train.starts().front();
  const std::size_t last = s.train.starts().back() + 12;
  double m = 0, v = 0, cnt = 0;
  for (std::size_t t = first; t < last; ++t)
    for (std::size_t k = 0; k < 4; ++k) {
      m += n.normalize(syn.corpus.flow(t, k));
      ++cnt;
    }
  m /= cnt;
  for (std::size_t t = first; t < last; ++t)
    for (std::size_t k = 0; k < 4; ++k) v += std::pow(n.normalize(syn.corpus.flow(t, k)) - m, 2);
  EXPECT_NEAR(m, 0.0, 1e-6);
  EXPECT_NEAR(std::sqrt(v / cnt), 1.0, 1e-6);
}

TEST(Batch, StacksNormalizedWindows) {
  auto syn = generate_synthetic(3, 100, 5);
  auto w = make_windows(syn.corpus, compute_time_indices(syn.corpus), 4, 2);
  const Normalizer n{10.0, 2.0};
  const std::vector<std::size_t> which{3, 7};
  auto b = make_batch(w, which, n);
  EXPECT_EQ(b.x.shape(), (Shape{2, 4, 3, 3}));
  EXPECT_EQ(b.y.shape(), (Shape{2, 2, 3}));
  EXPECT_EQ(b.tod_future.size(), 4u);
  EXPECT_EQ(b.x[((1 * 4 + 0) * 3 + 2) * 3], n.normalize(syn.corpus.flow(7, 2)));
  EXPECT_EQ(b.y[(1 * 2 + 1) * 3 + 0], n.normalize(syn.corpus.flow(7 + 4 + 1, 0)));
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

TEST(Synthetic, GroupsShareAProfile) {
  auto syn = generate_synthetic(6, 600, 7);
  ASSERT_EQ(syn.groups, (std::vector<int>{0, 1, 0, 1, 0, 1}));
  auto series = [&](std::size_t n) {
    std::vector<double> s(600);
    for (std::size_t t = 0; t < 600; ++t) s[t] = syn.corpus.flow(t, n);
    return s;
  };
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j) {
      const double r = pearson(series(i), series(j));
      if (syn.groups[i] == syn.groups[j]) {
        EXPECT_GT(r, 0.9) << i << "," << j;
      } else {
        EXPECT_LT(r, 0.5) << i << "," << j;
      }
    }
}

TEST(Synthetic, DeterministicAndPeriodicWithoutNoise) {
  auto a = generate_synthetic(6, 600, 7), b = generate_synthetic(6, 600, 7);
  EXPECT_EQ(a.corpus.values.vec(), b.corpus.values.vec());
  EXPECT_NE(a.corpus.values.vec(), generate_synthetic(6, 600, 8).corpus.values.vec());
  PatternSpec quiet;
  quiet.noise_std = 0.0;
  quiet.drift_std = 0.0;
  quiet.weekly_amplitude = 0.0;
  auto p = generate_synthetic(4, 900, 7, quiet);
  for (std::size_t t = 0; t + 288 < 900; ++t)
    for (std::size_t n = 0; n < 4; ++n) ASSERT_EQ(p.corpus.flow(t, n), p.corpus.flow(t + 288, n));
}

TEST(Synthetic, WrittenDatasetLoadsBack) {
  auto dir = testing::temp_dir("synth_io");
  auto syn = generate_synthetic(5, 150, 9);
  auto desc = write_dataset(dir, "toy", syn.corpus, syn.groups);
  auto back = load_pems(desc);
  EXPECT_EQ(back.values.vec(), syn.corpus.values.vec());
  EXPECT_EQ(back.start.str(), syn.corpus.start.str());
  EXPECT_EQ(load_groups(desc), syn.groups);
}

}  // namespace
}  // namespace protohg::data
