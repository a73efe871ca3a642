#include "infoadapt/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "infoadapt/errors.hpp"

namespace infoadapt {

const std::array<std::string, kWdbcFeatures>& wdbc_feature_names() {
  static const auto names = [] {
    const std::array<std::string, 10> base{"radius",    "texture",   "perimeter", "area",
                                           "smoothness", "compactness", "concavity",
                                           "concave_points", "symmetry", "fractal_dimension"};
    const std::array<std::string, 3> group{"mean", "se", "worst"};
    std::array<std::string, kWdbcFeatures> out;
    for (int g = 0; g < 3; ++g)
      for (int b = 0; b < 10; ++b) out[g * 10 + b] = group[g] + "_" + base[b];
    return out;
  }();
  return names;
}

int resolve_feature(const CovariateSelector& selector) {
  if (const auto* i = std::get_if<int>(&selector)) {
    if (*i < 0 || *i >= kWdbcFeatures) throw ConfigError("feature index out of range: " + std::to_string(*i));
    return *i;
  }
  const auto& name = std::get<std::string>(selector);
  const auto& names = wdbc_feature_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ConfigError("unknown feature name: " + name);
  return static_cast<int>(it - names.begin());
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t row) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value))
    throw ParseError(row, "non-numeric feature '" + std::string(field) + "'");
  return value;
}

}  // namespace

std::vector<LabeledSample> ingest_dataset(const std::filesystem::path& path, const CovariateSelector& covariate,
                                          const LabelMapping& labels) {
  const int feature = resolve_feature(covariate);
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset: " + path.string());

  std::vector<LabeledSample> samples;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != 2 + kWdbcFeatures)
      throw ParseError(row, "expected " + std::to_string(2 + kWdbcFeatures) + " fields, found " +
                                std::to_string(fields.size()));
    int label = 0;
    if (fields[1].size() == 1 && fields[1][0] == labels.positive) label = 1;
    else if (fields[1].size() == 1 && fields[1][0] == labels.negative) label = -1;
    else throw ParseError(row, "unknown diagnosis '" + std::string(fields[1]) + "'");
    // Every feature is checked so a malformed row fails regardless of the selection.
    double selected = 0.0;
    for (int j = 0; j < kWdbcFeatures; ++j) {
      const double v = parse_number(fields[2 + j], row);
      if (j == feature) selected = v;
    }
    samples.push_back(LabeledSample{make_vector({selected}), label});
  }
  if (samples.empty()) throw ParseError(0, "dataset is empty: " + path.string());
  return samples;
}

double nearest_rank(std::vector<double> values, double q) {
  if (values.empty()) throw InputError("nearest_rank: no values");
  if (!(q > 0.0 && q <= 1.0)) throw InputError("nearest_rank: q must lie in (0, 1]");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return values[rank - 1];
}

Vector ScalingSpec::apply(const Vector& x) const {
  Vector y = ((x - offset).array() / scale.array()).matrix();
  // Min-max endpoints can land a rounding error outside [-1, 1].
  if (unit_range) y = y.cwiseMax(-1.0).cwiseMin(1.0);
  return y;
}

Vector ScalingSpec::invert(const Vector& x_scaled) const {
  return (x_scaled.array() * scale.array()).matrix() + offset;
}

ScalingSpec fit_scaling(const std::vector<LabeledSample>& samples, ScalingMode mode) {
  if (samples.empty()) throw InputError("fit_scaling: no samples");
  const auto d = samples.front().covariates.size();
  ScalingSpec spec;
  spec.offset = Vector::Zero(d);
  spec.scale = Vector::Ones(d);
  spec.decile_lower.resize(d);
  spec.decile_upper.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    std::vector<double> column;
    for (const auto& s : samples) {
      if (s.covariates.size() != d) throw InputError("fit_scaling: inconsistent dimensions");
      column.push_back(s.covariates(j));
    }
    const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
    if (!(*hi > *lo)) throw InputError("fit_scaling: constant column " + std::to_string(j));
    if (mode == ScalingMode::MinMaxToUnit) {
      spec.unit_range = true;
      spec.offset(j) = 0.5 * (*lo + *hi);
      spec.scale(j) = 0.5 * (*hi - *lo);
    }
    for (auto& v : column) {
      v = (v - spec.offset(j)) / spec.scale(j);
      if (spec.unit_range) v = std::clamp(v, -1.0, 1.0);
    }
    spec.decile_lower(j) = nearest_rank(column, 0.1);
    spec.decile_upper(j) = nearest_rank(column, 0.9);
  }
  return spec;
}

std::vector<LabeledSample> apply_scaling(const ScalingSpec& spec, std::vector<LabeledSample> samples) {
  for (auto& s : samples) s.covariates = spec.apply(s.covariates);
  return samples;
}

}  // namespace infoadapt
