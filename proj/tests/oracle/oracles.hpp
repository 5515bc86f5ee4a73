#pragma once

// Independent reference implementations used only by the tests.

#include <complex>
#include <span>
#include <vector>

#include "faup/facegeo.hpp"
#include "faup/mlcore.hpp"

namespace oracle {

struct QpSolution {
    std::vector<double> weights;
    double bias = 0.0;
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
    std::size_t iterations = 0;
};

// Accelerated projected gradient on the soft-margin dual; the projection onto
// {0 <= a <= C, y.a = 0} is found by bisection on the multiplier. The bias
// minimizes the primal for the final w. Throws for more than 12 samples or 3
// features.
QpSolution qp_oracle_train(std::span<const faup::SvmSample> samples, double C, double target_gap = 1e-10);

struct DenseEigen {
    std::vector<double> values;                // descending
    std::vector<std::vector<double>> vectors;  // unit, paired with values
};

// Eigen's self-adjoint solver on a dense symmetric matrix.
DenseEigen dense_symmetric_eigen(const std::vector<std::vector<double>>& m);

// Sample covariance (divided by n - 1) of row samples.
std::vector<std::vector<double>> covariance(std::span<const faup::Vector> samples);

// Similarity normalization via complex arithmetic: z -> (z - m) / (2 (r - m)),
// m the inner-eye-corner midpoint, r the right inner corner.
inline faup::FaceModel complex_normalize(const faup::FaceModel& f) {
    using C = std::complex<double>;
    const C l(f[faup::FeaturePointId::el1].x, f[faup::FeaturePointId::el1].y);
    const C r(f[faup::FeaturePointId::er1].x, f[faup::FeaturePointId::er1].y);
    const C m = (l + r) / 2.0;
    const C denom = (r - m) * 2.0;
    faup::FaceModel out = f;
    for (auto id : faup::all_points()) {
        const C z = (C(f[id].x, f[id].y) - m) / denom;
        out[id] = {z.real(), z.imag()};
    }
    return out;
}

}  // namespace oracle
