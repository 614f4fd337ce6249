#pragma once

#include <Eigen/Dense>

#include "odos/models.hpp"

namespace odos {

struct InformationMatrix {
  enum class Tag { ExpectedNewData, Observed };
  Eigen::MatrixXd value;
  Tag tag = Tag::ExpectedNewData;
};

// Fisher information of the data a plan would collect, at theta. The CTMC sums
// the information of one transition observation per consecutive time pair,
// with the row state marginalized over the chain law at the earlier time.
InformationMatrix expected_information(const ModelSpec& model, const MeasurementPlan& plan,
                                       const ParameterDraw& theta);

// Negative Hessian of the log-likelihood at theta; analytic for the Gaussian
// models, central finite differences for the CTMC.
InformationMatrix observed_information(const ModelSpec& model, const Dataset& data,
                                       const ParameterDraw& theta);

}  // namespace odos
