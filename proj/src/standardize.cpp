#include "bnpnc/standardize.hpp"

#include "bnpnc/errors.hpp"
#include "bnpnc/math.hpp"

namespace bnpnc {

namespace {

AffineTransform column_transform(const Eigen::Ref<const Eigen::VectorXd>& v,
                                 const std::string& name) {
  const double sd = sample_sd(v);
  if (!(sd > 0.0)) {
    throw ValidationError("column '" + name + "' has zero variance and cannot be standardized");
  }
  return {v.mean(), sd};
}

}  // namespace

Standardization Standardization::identity(Eigen::Index n_covariates) {
  Standardization s;
  s.y = s.x = s.z = s.w = s.u = AffineTransform::identity();
  s.covariates.assign(static_cast<size_t>(n_covariates), AffineTransform::identity());
  s.enabled = false;
  return s;
}

StandardizedData standardize(const Dataset& data) {
  validate(data);
  StandardizedData out;
  out.transforms.enabled = true;
  out.transforms.y = column_transform(data.y, "y");
  out.transforms.x = column_transform(data.x, "x");
  out.transforms.z = column_transform(data.z, "z");
  out.transforms.w = column_transform(data.w, "w");

  out.data.y = out.transforms.y.apply(data.y);
  out.data.x = out.transforms.x.apply(data.x);
  out.data.z = out.transforms.z.apply(data.z);
  out.data.w = out.transforms.w.apply(data.w);

  out.data.covariates.resize(data.covariates.rows(), data.covariates.cols());
  out.data.covariate_names = data.covariate_names;
  for (Eigen::Index j = 0; j < data.n_covariates(); ++j) {
    const AffineTransform t =
        column_transform(data.covariates.col(j), data.covariate_names[static_cast<size_t>(j)]);
    out.transforms.covariates.push_back(t);
    out.data.covariates.col(j) = t.apply(data.covariates.col(j));
  }
  if (data.has_u()) {
    out.transforms.u = column_transform(data.u_hidden, "u");
    out.data.u_hidden = out.transforms.u.apply(data.u_hidden);
  }
  return out;
}

StandardizedData no_standardize(const Dataset& data) {
  validate(data);
  StandardizedData out;
  out.data = data;
  out.transforms = Standardization::identity(data.n_covariates());
  return out;
}

}  // namespace bnpnc
