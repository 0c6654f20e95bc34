//
// Copyright 2026 The dpq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#include "dpq/data.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <random>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"

namespace dpq {
namespace {

absl::string_view CleanField(absl::string_view field) {
  field = absl::StripAsciiWhitespace(field);
  if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
    field = field.substr(1, field.size() - 2);
  }
  return field;
}

struct Draw {
  RandomSource& rng;
  size_t n;

  absl::StatusOr<std::vector<double>> operator()(const SyntheticUniform& s) {
    if (!(s.lo < s.hi)) {
      return absl::InvalidArgumentError("Uniform source needs lo < hi");
    }
    std::vector<double> out(n);
    for (double& v : out) v = s.lo + (s.hi - s.lo) * rng.Uniform();
    return out;
  }

  absl::StatusOr<std::vector<double>> operator()(const SyntheticGaussian& s) {
    if (!(s.stddev > 0.0)) {
      return absl::InvalidArgumentError("Gaussian source needs stddev > 0");
    }
    std::normal_distribution<double> normal(s.mean, s.stddev);
    std::vector<double> out(n);
    for (double& v : out) v = normal(rng);
    return out;
  }

  absl::StatusOr<std::vector<double>> operator()(const CsvColumn& s) {
    absl::StatusOr<std::vector<double>> values =
        ReadCsvColumnFromFile(s.path, s.column);
    if (!values.ok()) return values.status();
    if (values->size() < n) {
      return absl::FailedPreconditionError(
          absl::StrCat(s.path, ": column '", s.column, "' has ",
                       values->size(), " rows, ", n, " requested"));
    }
    std::shuffle(values->begin(), values->end(), rng);
    values->resize(n);
    return values;
  }
};

}  // namespace

absl::StatusOr<SortedDataset> Generate(const DatasetSpec& spec, size_t n,
                                       RandomSource& rng) {
  if (n == 0) return absl::InvalidArgumentError("n must be positive");
  absl::StatusOr<std::vector<double>> raw =
      std::visit(Draw{rng, n}, spec.source);
  if (!raw.ok()) return raw.status();
  return DedupPerturb(ClampToDomain(*raw, spec.clamp), spec.clamp, rng);
}

absl::StatusOr<std::vector<double>> ReadCsvColumn(std::istream& in,
                                                  const std::string& column) {
  std::string line;
  size_t line_number = 0;
  std::optional<size_t> index;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const absl::string_view trimmed = absl::StripAsciiWhitespace(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
    if (!index.has_value()) {
      for (size_t i = 0; i < fields.size(); ++i) {
        if (CleanField(fields[i]) == column) index = i;
      }
      if (!index.has_value()) {
        return absl::NotFoundError(absl::StrCat(
            "line ", line_number, ": header has no column '", column, "'"));
      }
      continue;
    }
    if (fields.size() <= *index) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": expected at least ",
                       *index + 1, " fields, got ", fields.size()));
    }
    double value;
    const absl::string_view field = CleanField(fields[*index]);
    if (!absl::SimpleAtod(field, &value) || !std::isfinite(value)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_number, ": '", field, "' is not a finite number"));
    }
    values.push_back(value);
  }
  if (!index.has_value()) {
    return absl::InvalidArgumentError("CSV input has no header row");
  }
  return values;
}

absl::StatusOr<std::vector<double>> ReadCsvColumnFromFile(
    const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  absl::StatusOr<std::vector<double>> values = ReadCsvColumn(in, column);
  if (!values.ok()) {
    return absl::Status(values.status().code(),
                        absl::StrCat(path, ": ", values.status().message()));
  }
  return values;
}

std::vector<double> ClampToDomain(std::span<const double> points,
                                  const Interval& domain) {
  const double offset = std::min(kClampOffset, domain.width() / 4.0);
  std::vector<double> out(points.begin(), points.end());
  for (double& v : out) {
    if (v <= domain.lo()) v = domain.lo() + offset;
    if (v >= domain.hi()) v = domain.hi() - offset;
  }
  return out;
}

double PerturbationScale(std::span<const double> sorted_points,
                         const Interval& domain) {
  double min_gap = std::numeric_limits<double>::infinity();
  double prev = domain.lo();
  for (double v : sorted_points) {
    if (v > prev) min_gap = std::min(min_gap, v - prev);
    prev = v;
  }
  min_gap = std::min(min_gap, domain.hi() - prev);
  return std::min(kMaxJitter, min_gap / 4.0);
}

absl::StatusOr<SortedDataset> DedupPerturb(std::vector<double> points,
                                           const Interval& domain,
                                           RandomSource& rng) {
  for (double v : points) {
    if (!domain.Contains(v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("Point ", v, " lies outside the domain"));
    }
  }
  std::sort(points.begin(), points.end());
  if (std::adjacent_find(points.begin(), points.end()) == points.end()) {
    return SortedDataset::Create(std::move(points), domain);
  }

  const double eta = PerturbationScale(points, domain);
  const double spacing = eta * kTieBreakSpacing;
  for (size_t begin = 0; begin < points.size();) {
    const double v = points[begin];
    size_t end = begin + 1;
    while (end < points.size() && points[end] == v) ++end;
    const size_t copies = end - begin;
    if (copies > 1) {
      if (static_cast<double>(copies - 1) * spacing >= 1.8 * eta) {
        return absl::ResourceExhaustedError(absl::StrCat(
            copies, " copies of ", v, " do not fit at resolution ", spacing));
      }
      const double top = std::nextafter(v + eta, v);
      const double bottom = std::nextafter(v - eta, v);
      for (size_t i = begin; i < end; ++i) {
        points[i] = v + eta * (2.0 * rng.OpenUniform() - 1.0);
      }
      std::sort(points.begin() + begin, points.begin() + end);
      for (size_t i = begin + 1; i < end; ++i) {
        points[i] = std::max(points[i], points[i - 1] + spacing);
      }
      if (points[end - 1] > top) {
        points[end - 1] = top;
        for (size_t i = end - 1; i-- > begin;) {
          points[i] = std::min(points[i], points[i + 1] - spacing);
        }
      }
      if (points[begin] < bottom) {
        return absl::InternalError(
            absl::StrCat("Tie-break for ", v, " left the jitter window"));
      }
    }
    begin = end;
  }
  return SortedDataset::Create(std::move(points), domain);
}

absl::StatusOr<SortedDataset> Subsample(const SortedDataset& x, size_t k,
                                        RandomSource& rng) {
  if (k > x.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Cannot subsample ", k, " of ", x.size(), " points"));
  }
  std::vector<double> out;
  out.reserve(k);
  std::sample(x.points().begin(), x.points().end(), std::back_inserter(out), k,
              rng);
  return SortedDataset::Create(std::move(out), x.domain());
}

}  // namespace dpq
