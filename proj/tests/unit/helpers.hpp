#pragma once

#include <Eigen/Dense>
#include <random>

#include "sbmase/sbm_core.hpp"

namespace testing {

// Two-block simulation model: P = [[.42, .42], [.42, .5]], rho = (.6, .4).
inline sbmase::BlockModel simulation_model() {
  Eigen::MatrixXd P(2, 2);
  P << 0.42, 0.42, 0.42, 0.5;
  Eigen::VectorXd rho(2);
  rho << 0.6, 0.4;
  return sbmase::BlockModel::make(P, rho, false);
}

inline Eigen::MatrixXd random_binary(int rows, int cols, std::mt19937_64& gen, double p = 0.5) {
  std::bernoulli_distribution coin(p);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = coin(gen) ? 1.0 : 0.0;
  }
  return m;
}

inline Eigen::MatrixXd random_gaussian(int rows, int cols, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = g(gen);
  }
  return m;
}

inline Eigen::MatrixXd random_orthogonal(int m, std::mt19937_64& gen) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_gaussian(m, m, gen));
  return qr.householderQ();
}

// Complete graph adjacency J - I.
inline Eigen::MatrixXd complete(int n) {
  return Eigen::MatrixXd::Ones(n, n) - Eigen::MatrixXd::Identity(n, n);
}

}  // namespace testing
