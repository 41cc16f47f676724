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

#include "protohg/data.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "protohg/io.hpp"

namespace protohg::data {

namespace fs = std::filesystem;

CivilTime CivilTime::parse(const std::string& text) {
  CivilTime c;
  char sep = ' ';
  int n = std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d", &c.year, &c.month, &c.day, &sep, &c.hour,
                      &c.minute);
  if (n == 3) {
    c.hour = c.minute = 0;
  } else if (n != 6 || (sep != ' ' && sep != 'T')) {
    throw DataError("cannot parse start timestamp '" + text + "' (want YYYY-MM-DD HH:MM)");
  }
  namespace chr = std::chrono;
  const chr::year_month_day ymd{chr::year{c.year}, chr::month{static_cast<unsigned>(c.month)},
                                chr::day{static_cast<unsigned>(c.day)}};
  if (!ymd.ok() || c.hour < 0 || c.hour > 23 || c.minute < 0 || c.minute > 59) {
    throw DataError("invalid start timestamp '" + text + "'");
  }
  return c;
}

std::string CivilTime::str() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d", year, month, day, hour, minute);
  return buf;
}

int CivilTime::weekday() const {
  namespace chr = std::chrono;
  const chr::sys_days d{chr::year{year} / chr::month{static_cast<unsigned>(month)} /
                        chr::day{static_cast<unsigned>(day)}};
  // c_encoding: 0 = Sunday
  return static_cast<int>((chr::weekday{d}.c_encoding() + 6) % 7);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long n = std::stoll(v, &pos);
    if (pos != v.size() || n < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw DataError("descriptor key '" + key + "' expects a non-negative integer, got '" + v +
                    "'");
  }
}

}  // namespace

Descriptor Descriptor::read(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset descriptor " + path.string());
  Descriptor d;
  bool has_nodes = false, has_steps = false, has_values = false;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("descriptor line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "nodes") {
      d.nodes = parse_size(key, val);
      has_nodes = true;
    } else if (key == "timesteps") {
      d.timesteps = parse_size(key, val);
      has_steps = true;
    } else if (key == "channels") {
      d.channels = parse_size(key, val);
    } else if (key == "period_minutes") {
      d.period_minutes = static_cast<int>(parse_size(key, val));
    } else if (key == "start") {
      d.start = val;
    } else if (key == "values_path") {
      d.values_path = val;
      has_values = true;
    } else if (key == "dtype") {
      d.dtype = val;
    } else if (key == "groups_path") {
      d.groups_path = val;
    } else {
      throw DataError("unknown descriptor key '" + key + "' in " + path.string());
    }
  }
  if (!has_nodes || !has_steps || !has_values) {
    throw DataError("descriptor " + path.string() +
                    " must define nodes, timesteps and values_path");
  }
  return d;
}

void Descriptor::write(const fs::path& path) const {
  std::ostringstream os;
  os << "nodes=" << nodes << '\n'
     << "timesteps=" << timesteps << '\n'
     << "channels=" << channels << '\n'
     << "period_minutes=" << period_minutes << '\n'
     << "start=" << start << '\n'
     << "values_path=" << values_path.string() << '\n'
     << "dtype=" << dtype << '\n';
  if (!groups_path.empty()) os << "groups_path=" << groups_path.string() << '\n';
  io::atomic_write(path, os.str());
}

namespace {

Tensor read_binary(const fs::path& path, const Descriptor& d) {
  const std::size_t width = d.dtype == "float64" ? 8 : 4;
  const std::size_t expected = d.timesteps * d.nodes * d.channels;
  std::error_code ec;
  const auto bytes = fs::file_size(path, ec);
  if (ec) throw DataError("missing values file " + path.string());
  if (expected == 0 || bytes != expected * width) {
    throw DataError("shape mismatch: " + path.string() + " holds " + std::to_string(bytes) +
                    " bytes, descriptor expects " + std::to_string(d.timesteps) + " x " +
                    std::to_string(d.nodes) + " x " + std::to_string(d.channels) + " " +
                    d.dtype);
  }
  std::ifstream in(path, std::ios::binary);
  Tensor t({d.timesteps, d.nodes, d.channels});
  if (width == 8) {
    in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(expected * 8));
  } else {
    std::vector<float> buf(expected);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(expected * 4));
    std::copy(buf.begin(), buf.end(), t.data());
  }
  if (!in) throw DataError("short read from " + path.string());
  return t;
}

Tensor read_csv(const fs::path& path, const Descriptor& d) {
  std::ifstream in(path);
  if (!in) throw DataError("missing values file " + path.string());
  std::vector<double> vals;
  std::string line;
  std::size_t rows = 0;
  const std::size_t width = d.nodes * d.channels;
  bool first = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      cell = trim(cell);
      if (cell.empty() || cell == "nan" || cell == "NaN" || cell == "NA") {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
        if (pos != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (first && !numeric) {
      first = false;
      continue;  // header
    }
    first = false;
    if (!numeric) throw DataError("non-numeric cell in " + path.string() + ": " + line);
    if (row.size() != width) {
      throw DataError("shape mismatch: row " + std::to_string(rows) + " of " + path.string() +
                      " has " + std::to_string(row.size()) + " columns, expected " +
                      std::to_string(width));
    }
    vals.insert(vals.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0 || rows != d.timesteps) {
    throw DataError("shape mismatch: " + path.string() + " has " + std::to_string(rows) +
                    " rows, descriptor expects " + std::to_string(d.timesteps));
  }
  return Tensor({d.timesteps, d.nodes, d.channels}, std::move(vals));
}

}  // namespace

std::size_t impute_missing(Tensor& values, std::vector<std::uint8_t>& observed,
                           double max_nan_fraction) {
  const std::size_t T = values.dim(0), N = values.dim(1), C = values.dim(2);
  observed.assign(T * N, 1);
  std::size_t missing = 0;
  for (std::size_t i = 0; i < values.size(); ++i) missing += std::isnan(values[i]) ? 1 : 0;
  if (missing == 0) return 0;
  const double frac = static_cast<double>(missing) / static_cast<double>(values.size());
  if (frac >= max_nan_fraction) {
    throw DataError("missing-value fraction " + std::to_string(frac) + " exceeds limit " +
                    std::to_string(max_nan_fraction));
  }
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      auto at = [&](std::size_t t) -> double& { return values[(t * N + n) * C + c]; };
      std::ptrdiff_t prev = -1;
      for (std::size_t t = 0; t <= T; ++t) {
        if (t < T && std::isnan(at(t))) {
          if (c == 0) observed[t * N + n] = 0;
          continue;
        }
        // gap is (prev, t)
        const std::size_t gap_begin = static_cast<std::size_t>(prev + 1);
        if (gap_begin < t) {
          if (prev < 0 && t == T) {
            throw DataError("node " + std::to_string(n) + " has no observed readings");
          }
          for (std::size_t k = gap_begin; k < t; ++k) {
            if (prev < 0) {
              at(k) = at(t);
            } else if (t == T) {
              at(k) = at(static_cast<std::size_t>(prev));
            } else {
              const double lo = at(static_cast<std::size_t>(prev));
              const double hi = at(t);
              const double w = static_cast<double>(k - static_cast<std::size_t>(prev)) /
                               static_cast<double>(t - static_cast<std::size_t>(prev));
              at(k) = lo + w * (hi - lo);
            }
          }
        }
        prev = static_cast<std::ptrdiff_t>(t);
      }
    }
  }
  return missing;
}

RawCorpus load_pems(const Descriptor& desc, const fs::path& base_dir, const LoadOptions& opts) {
  if (desc.nodes == 0 || desc.timesteps == 0 || desc.channels == 0) {
    throw DataError("shape mismatch: descriptor declares an empty tensor (" +
                    std::to_string(desc.timesteps) + " x " + std::to_string(desc.nodes) + " x " +
                    std::to_string(desc.channels) + ")");
  }
  slots_per_day(desc.period_minutes);  // validates
  const fs::path values =
      desc.values_path.is_absolute() ? desc.values_path : base_dir / desc.values_path;
  RawCorpus c;
  if (desc.dtype == "csv") {
    c.values = read_csv(values, desc);
  } else if (desc.dtype == "float32" || desc.dtype == "float64") {
    c.values = read_binary(values, desc);
  } else {
    throw DataError("unsupported dtype '" + desc.dtype + "'");
  }
  c.start = CivilTime::parse(desc.start);
  c.period_minutes = desc.period_minutes;
  impute_missing(c.values, c.observed, opts.max_nan_fraction);
  for (double v : c.values.vec()) {
    if (!std::isfinite(v)) throw DataError("non-finite reading in " + values.string());
  }
  return c;
}

RawCorpus load_pems(const fs::path& descriptor_path, const LoadOptions& opts) {
  if (!fs::exists(descriptor_path)) {
    throw DataError("dataset descriptor not found: " + descriptor_path.string());
  }
  return load_pems(Descriptor::read(descriptor_path), descriptor_path.parent_path(), opts);
}

std::vector<int> load_groups(const fs::path& descriptor_path) {
  const auto d = Descriptor::read(descriptor_path);
  if (d.groups_path.empty()) return {};
  const fs::path p =
      d.groups_path.is_absolute() ? d.groups_path : descriptor_path.parent_path() / d.groups_path;
  std::ifstream in(p);
  if (!in) throw DataError("missing groups file " + p.string());
  std::vector<int> groups;
  int g = 0;
  while (in >> g) groups.push_back(g);
  if (groups.size() != d.nodes) throw DataError("groups file length differs from node count");
  return groups;
}

int slots_per_day(int period_minutes) {
  if (period_minutes <= 0 || 1440 % period_minutes != 0) {
    throw DataError("sample period " + std::to_string(period_minutes) +
                    " min does not divide 1440");
  }
  return 1440 / period_minutes;
}

TimeIndices compute_time_indices(const RawCorpus& corpus) {
  TimeIndices idx;
  idx.slots_per_day = slots_per_day(corpus.period_minutes);
  const int minute_of_day = corpus.start.hour * 60 + corpus.start.minute;
  if (minute_of_day % corpus.period_minutes != 0) {
    throw DataError("start time " + corpus.start.str() + " is not aligned to the sample period");
  }
  int tod = minute_of_day / corpus.period_minutes;
  int dow = corpus.start.weekday();
  const std::size_t T = corpus.steps();
  idx.tod.resize(T);
  idx.dow.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    idx.tod[t] = tod;
    idx.dow[t] = dow;
    if (++tod == idx.slots_per_day) {
      tod = 0;
      dow = (dow + 1) % 7;
    }
  }
  return idx;
}

Tensor Normalizer::normalize(const Tensor& t) const {
  Tensor out = t;
  for (auto& v : out.vec()) v = normalize(v);
  return out;
}

Tensor Normalizer::denormalize(const Tensor& t) const {
  Tensor out = t;
  for (auto& v : out.vec()) v = denormalize(v);
  return out;
}

WindowSet::WindowSet(std::shared_ptr<const RawCorpus> corpus,
                     std::shared_ptr<const TimeIndices> idx, std::vector<std::size_t> starts,
                     std::size_t history, std::size_t horizon)
    : corpus_(std::move(corpus)),
      indices_(std::move(idx)),
      starts_(std::move(starts)),
      history_(history),
      horizon_(horizon) {}

TrafficWindow WindowSet::at(std::size_t i, const Normalizer* norm) const {
  const auto& c = *corpus_;
  const auto& idx = *indices_;
  const std::size_t s = starts_.at(i);
  const std::size_t N = c.nodes(), L = history_, H = horizon_;
  const double spd = static_cast<double>(idx.slots_per_day);
  TrafficWindow w;
  w.start = s;
  w.x = Tensor({L, N, 3});
  w.y = Tensor({H, N});
  w.y_mask = Tensor({H, N});
  for (std::size_t l = 0; l < L; ++l) {
    const std::size_t t = s + l;
    w.tod_past.push_back(idx.tod[t]);
    w.dow_past.push_back(idx.dow[t]);
    for (std::size_t n = 0; n < N; ++n) {
      double* px = w.x.data() + (l * N + n) * 3;
      px[0] = norm ? norm->normalize(c.flow(t, n)) : c.flow(t, n);
      px[1] = idx.tod[t] / spd;
      px[2] = idx.dow[t] / 7.0;
    }
  }
  for (std::size_t h = 0; h < H; ++h) {
    const std::size_t t = s + L + h;
    w.tod_future.push_back(idx.tod[t]);
    w.dow_future.push_back(idx.dow[t]);
    for (std::size_t n = 0; n < N; ++n) {
      w.y[h * N + n] = norm ? norm->normalize(c.flow(t, n)) : c.flow(t, n);
      w.y_mask[h * N + n] = c.observed.empty() ? 1.0 : c.observed[t * N + n];
    }
  }
  return w;
}

WindowSet WindowSet::slice(std::size_t begin, std::size_t end) const {
  end = std::min(end, starts_.size());
  begin = std::min(begin, end);
  return WindowSet(corpus_, indices_,
                   std::vector<std::size_t>(starts_.begin() + static_cast<std::ptrdiff_t>(begin),
                                            starts_.begin() + static_cast<std::ptrdiff_t>(end)),
                   history_, horizon_);
}

WindowSet make_windows(std::shared_ptr<const RawCorpus> corpus,
                       std::shared_ptr<const TimeIndices> indices, std::size_t history,
                       std::size_t horizon) {
  const std::size_t T = corpus->steps();
  if (history == 0 || horizon == 0) throw DataError("history and horizon must be positive");
  if (T < history + horizon) {
    throw DataError("series of " + std::to_string(T) + " steps is shorter than L + H = " +
                    std::to_string(history + horizon));
  }
  if (indices->tod.size() != T) throw DataError("time indices do not cover the corpus");
  std::vector<std::size_t> starts(T - history - horizon + 1);
  for (std::size_t i = 0; i < starts.size(); ++i) starts[i] = i;
  return WindowSet(std::move(corpus), std::move(indices), std::move(starts), history, horizon);
}

WindowSet make_windows(const RawCorpus& corpus, const TimeIndices& indices, std::size_t history,
                       std::size_t horizon) {
  return make_windows(std::make_shared<const RawCorpus>(corpus),
                      std::make_shared<const TimeIndices>(indices), history, horizon);
}

std::array<std::size_t, 3> split_sizes(std::size_t count, std::array<double, 3> ratios) {
  for (double r : ratios) {
    if (!(r > 0.0)) throw DataError("split ratios must be positive");
  }
  const double total = ratios[0] + ratios[1] + ratios[2];
  const double w = static_cast<double>(count);
  const auto train = static_cast<std::size_t>(std::floor(w * ratios[0] / total + 1e-9));
  const auto val = static_cast<std::size_t>(std::floor(w * ratios[1] / total + 1e-9));
  return {train, val, count - train - val};
}

Splits split(const WindowSet& windows, std::array<double, 3> ratios) {
  const auto sz = split_sizes(windows.size(), ratios);
  return Splits{windows.slice(0, sz[0]), windows.slice(sz[0], sz[0] + sz[1]),
                windows.slice(sz[0] + sz[1], windows.size())};
}

Normalizer fit_normalizer(std::span<const double> values) {
  if (values.empty()) throw DataError("cannot fit normalizer on an empty training split");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  if (!(var > 0.0)) throw DataError("training data has zero variance; cannot normalize");
  return Normalizer{mean, std::sqrt(var)};
}

Normalizer fit_normalizer(const WindowSet& train) {
  if (train.empty()) throw DataError("cannot fit normalizer on an empty training split");
  const auto& c = train.corpus();
  const std::size_t first = train.starts().front();
  const std::size_t last = train.starts().back() + train.history();
  std::vector<double> vals;
  vals.reserve((last - first) * c.nodes());
  for (std::size_t t = first; t < last; ++t) {
    for (std::size_t n = 0; n < c.nodes(); ++n) {
      if (!c.observed.empty() && !c.observed[t * c.nodes() + n]) continue;
      vals.push_back(c.flow(t, n));
    }
  }
  return fit_normalizer(vals);
}

Batch stack_windows(std::span<const TrafficWindow> windows) {
  if (windows.empty()) throw DataError("empty batch");
  const auto& w0 = windows.front();
  const std::size_t B = windows.size(), L = w0.x.dim(0), N = w0.x.dim(1), H = w0.y.dim(0);
  Batch b;
  b.x = Tensor({B, L, N, 3});
  b.y = Tensor({B, H, N});
  b.y_mask = Tensor({B, H, N});
  for (std::size_t i = 0; i < B; ++i) {
    const auto& w = windows[i];
    std::copy(w.x.vec().begin(), w.x.vec().end(), b.x.data() + i * L * N * 3);
    std::copy(w.y.vec().begin(), w.y.vec().end(), b.y.data() + i * H * N);
    std::copy(w.y_mask.vec().begin(), w.y_mask.vec().end(), b.y_mask.data() + i * H * N);
    b.tod_past.insert(b.tod_past.end(), w.tod_past.begin(), w.tod_past.end());
    b.dow_past.insert(b.dow_past.end(), w.dow_past.begin(), w.dow_past.end());
    b.tod_future.insert(b.tod_future.end(), w.tod_future.begin(), w.tod_future.end());
    b.dow_future.insert(b.dow_future.end(), w.dow_future.begin(), w.dow_future.end());
    b.starts.push_back(w.start);
  }
  return b;
}

Batch make_batch(const WindowSet& windows, std::span<const std::size_t> which,
                 const Normalizer& norm) {
  std::vector<TrafficWindow> ws;
  ws.reserve(which.size());
  for (auto i : which) ws.push_back(windows.at(i, &norm));
  return stack_windows(ws);
}

SyntheticCorpus generate_synthetic(std::size_t nodes, std::size_t steps, std::uint64_t seed,
                                   const PatternSpec& spec) {
  if (nodes == 0 || steps == 0) throw DataError("synthetic corpus needs N, T > 0");
  if (spec.groups == 0) throw DataError("synthetic corpus needs at least one group");
  const int spd = slots_per_day(spec.period_minutes);
  const double week = 7.0 * spd;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SyntheticCorpus out;
  out.groups.resize(nodes);
  for (std::size_t n = 0; n < nodes; ++n) out.groups[n] = static_cast<int>(n % spec.groups);

  std::vector<double> node_scale(nodes), node_offset(nodes);
  for (std::size_t n = 0; n < nodes; ++n) {
    node_scale[n] = 0.85 + 0.3 * unit(rng);
    node_offset[n] = -10.0 + 20.0 * unit(rng);
  }

  // Group-level drift shared by all members.
  std::vector<double> drift(spec.groups * steps, 0.0);
  for (std::size_t g = 0; g < spec.groups; ++g) {
    double state = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
      state = spec.drift_coef * state + spec.drift_std * gauss(rng);
      drift[g * steps + t] = state;
    }
  }

  RawCorpus& c = out.corpus;
  c.start = CivilTime::parse(spec.start);
  c.period_minutes = spec.period_minutes;
  c.values = Tensor({steps, nodes, 1});
  c.observed.assign(steps * nodes, 1);
  const int start_slot = (c.start.hour * 60 + c.start.minute) / spec.period_minutes;
  for (std::size_t t = 0; t < steps; ++t) {
    const double slot = static_cast<double>((start_slot + static_cast<long>(t)) % spd);
    const double day_phase = kTwoPi * slot / spd;
    const double abs_step = static_cast<double>(start_slot) + static_cast<double>(t);
    for (std::size_t n = 0; n < nodes; ++n) {
      const auto g = static_cast<std::size_t>(out.groups[n]);
      const double shift = kTwoPi * static_cast<double>(g) / static_cast<double>(spec.groups);
      const double daily =
          std::sin(day_phase + shift) + 0.5 * std::sin(2.0 * day_phase + 1.7 * shift);
      const double weekly = std::sin(kTwoPi * abs_step / week + shift);
      const double signal = spec.daily_amplitude * daily + spec.weekly_amplitude * weekly +
                            drift[g * steps + t];
      const double v = spec.base + node_offset[n] + node_scale[n] * signal +
                       spec.noise_std * gauss(rng);
      c.values[t * nodes + n] = std::max(0.0, v);
    }
  }
  return out;
}

fs::path write_dataset(const fs::path& dir, const std::string& name, const RawCorpus& corpus,
                       const std::vector<int>& groups) {
  fs::create_directories(dir);
  Descriptor d;
  d.nodes = corpus.nodes();
  d.timesteps = corpus.steps();
  d.channels = corpus.channels();
  d.period_minutes = corpus.period_minutes;
  d.start = corpus.start.str();
  d.values_path = name + ".f64";
  d.dtype = "float64";
  std::string bytes(corpus.values.size() * sizeof(double), '\0');
  std::memcpy(bytes.data(), corpus.values.data(), bytes.size());
  io::atomic_write(dir / d.values_path, bytes);
  if (!groups.empty()) {
    d.groups_path = name + ".groups";
    std::ostringstream os;
    for (int g : groups) os << g << '\n';
    io::atomic_write(dir / d.groups_path, os.str());
  }
  const fs::path desc = dir / (name + ".desc");
  d.write(desc);
  return desc;
}

}  // namespace protohg::data
