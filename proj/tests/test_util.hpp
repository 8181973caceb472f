#ifndef BCVRANK_TEST_UTIL_HPP
#define BCVRANK_TEST_UTIL_HPP

#include "bcvrank/rng.hpp"
#include "bcvrank/types.hpp"

namespace testutil {

inline bcvrank::Matrix gaussian(bcvrank::Rng& rng, bcvrank::Index rows,
                                bcvrank::Index cols, double sd = 1.0) {
    std::normal_distribution<double> nd(0.0, sd);
    bcvrank::Matrix m(rows, cols);
    for (bcvrank::Index j = 0; j < cols; ++j) {
        for (bcvrank::Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
    }
    return m;
}

}  // namespace testutil

#endif
