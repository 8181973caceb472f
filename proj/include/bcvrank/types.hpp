#ifndef BCVRANK_TYPES_HPP
#define BCVRANK_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace bcvrank {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// All stochastic operations take an explicit engine; nothing reads global state.
using Rng = std::mt19937_64;

}  // namespace bcvrank

#endif  // BCVRANK_TYPES_HPP
