#pragma once

#include <string>
#include <vector>

#include "gridcast/util/random.hpp"

namespace gridcast::testing {

/// One randomly drawn instance per call; returns the largest relative error
/// between analytic and central-difference gradients over every input and
/// parameter entry of that instance.
double gradcheck_sigmoid(util::Rng& rng);
double gradcheck_tanh(util::Rng& rng);
double gradcheck_relu(util::Rng& rng);
double gradcheck_conv1d(util::Rng& rng);
double gradcheck_lstm_cell(util::Rng& rng);
double gradcheck_lstm_sequence(util::Rng& rng);
double gradcheck_dense(util::Rng& rng);
double gradcheck_mse(util::Rng& rng);
double gradcheck_mae(util::Rng& rng);
/// Full model at L 3, conv out 4, hidden 5, train mode with a fixed dropout mask.
double gradcheck_convlstm(util::Rng& rng);

struct GradcheckTarget {
  std::string name;
  double (*check)(util::Rng&);
};

const std::vector<GradcheckTarget>& gradcheck_targets();

}  // namespace gridcast::testing
