#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "infoadapt/bayes_logistic.hpp"

namespace infoadapt {

inline constexpr int kWdbcFeatures = 30;

/// Feature names in file order: mean_<base>, se_<base>, worst_<base> for the
/// ten base measurements (radius, texture, ..., fractal_dimension).
const std::array<std::string, kWdbcFeatures>& wdbc_feature_names();

/// Zero-based feature index, or a name from wdbc_feature_names().
using CovariateSelector = std::variant<int, std::string>;

int resolve_feature(const CovariateSelector& selector);

struct LabelMapping {
  char positive = 'M';  // mapped to +1
  char negative = 'B';  // mapped to -1
};

/// Parses a WDBC-layout file: id, diagnosis letter, 30 numeric features per
/// row. Returns one single-covariate sample per row. ParseError carries the
/// 1-based row number (0 for an empty file).
std::vector<LabeledSample> ingest_dataset(const std::filesystem::path& path,
                                          const CovariateSelector& covariate = 24,
                                          const LabelMapping& labels = {});

enum class ScalingMode { MinMaxToUnit, None };

struct ScalingSpec {
  Vector offset;  // x_scaled = (x - offset) / scale
  Vector scale;
  Vector decile_lower;  // nearest-rank deciles of the scaled sample
  Vector decile_upper;
  bool unit_range = false;  // min-max mode: outputs clamped to [-1, 1]

  Vector apply(const Vector& x) const;
  Vector invert(const Vector& x_scaled) const;
};

ScalingSpec fit_scaling(const std::vector<LabeledSample>& samples, ScalingMode mode);

std::vector<LabeledSample> apply_scaling(const ScalingSpec& spec, std::vector<LabeledSample> samples);

/// Nearest-rank percentile: the ceil(q n)-th smallest value, q in (0, 1].
double nearest_rank(std::vector<double> values, double q);

}  // namespace infoadapt
