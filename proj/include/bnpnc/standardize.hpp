#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bnpnc/dataset.hpp"

namespace bnpnc {

// Exact affine map v -> (v - offset) / scale and its inverse.
struct AffineTransform {
  double offset = 0.0;
  double scale = 1.0;

  double apply(double v) const { return (v - offset) / scale; }
  double invert(double v) const { return offset + scale * v; }
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& v) const {
    return (v.array() - offset) / scale;
  }
  Eigen::VectorXd invert(const Eigen::Ref<const Eigen::VectorXd>& v) const {
    return offset + scale * v.array();
  }
  static AffineTransform identity() { return {0.0, 1.0}; }
};

// Per-column transforms for a standardized dataset (sample mean 0, sample SD
// 1 with the n-1 denominator). Constructed by standardize().
struct Standardization {
  AffineTransform y;
  AffineTransform x;
  AffineTransform z;
  AffineTransform w;
  std::vector<AffineTransform> covariates;
  AffineTransform u;
  bool enabled = true;

  static Standardization identity(Eigen::Index n_covariates);
};

struct StandardizedData {
  Dataset data;
  Standardization transforms;
};

// Centers and scales every column (including covariates and, when present,
// the hidden confounder). Throws ValidationError on a zero-variance column.
StandardizedData standardize(const Dataset& data);

// Pass-through with identity transforms, for standardize=false runs.
StandardizedData no_standardize(const Dataset& data);

}  // namespace bnpnc
