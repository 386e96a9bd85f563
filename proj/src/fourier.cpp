// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdt/error.hpp"
#include "tdt/predict.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numbers>

namespace tdt {

double fourier_eval(const FourierSeries& series, double theta) {
    double v = series.a0();
    const auto a = series.a();
    const auto b = series.b();
    for (std::size_t n = 1; n <= series.order(); ++n) {
        const double arg = static_cast<double>(n) * theta;
        v += a[n - 1] * std::cos(arg) + b[n - 1] * std::sin(arg);
    }
    return v;
}

FourierSeries fourier_fit(std::span<const double> theta, std::span<const double> values, std::size_t order) {
    if (theta.size() != values.size()) {
        throw DataError(DataFault::shape, "angle and value sample counts differ");
    }
    const std::size_t m = theta.size();
    const std::size_t cols = 2 * order + 1;
    if (m < cols) {
        throw DataError(DataFault::shape, "Fourier fit of order " + std::to_string(order) + " needs at least " +
                                              std::to_string(cols) + " samples, got " + std::to_string(m));
    }
    if (!all_finite(theta) || !all_finite(values)) {
        throw DataError(DataFault::non_finite, "Fourier fit sample is not finite");
    }
    Eigen::MatrixXd design(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(cols));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        design(r, 0) = 1.0;
        for (std::size_t n = 1; n <= order; ++n) {
            const double arg = static_cast<double>(n) * theta[i];
            design(r, static_cast<Eigen::Index>(n)) = std::cos(arg);
            design(r, static_cast<Eigen::Index>(order + n)) = std::sin(arg);
        }
        rhs(r) = values[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < static_cast<Eigen::Index>(cols)) {
        throw DataError(DataFault::shape, "rank-deficient Fourier design: samples determine only " +
                                              std::to_string(qr.rank()) + " of " + std::to_string(cols) +
                                              " coefficients");
    }
    const Eigen::VectorXd c = qr.solve(rhs);
    std::vector<double> a(order), b(order);
    for (std::size_t n = 1; n <= order; ++n) {
        a[n - 1] = c(static_cast<Eigen::Index>(n));
        b[n - 1] = c(static_cast<Eigen::Index>(order + n));
    }
    return FourierSeries(c(0), std::move(a), std::move(b));
}

double l2_surface_error(const FourierSeries& pred, const FourierSeries& ref) {
    if (pred.order() != ref.order()) {
        throw DataError(DataFault::dimension_mismatch, "Fourier orders differ: " + std::to_string(pred.order()) +
                                                           " vs " + std::to_string(ref.order()));
    }
    const double d0 = pred.a0() - ref.a0();
    double s = 0.0;
    for (std::size_t n = 0; n < pred.order(); ++n) {
        const double da = pred.a()[n] - ref.a()[n];
        const double db = pred.b()[n] - ref.b()[n];
        s += da * da + db * db;
    }
    return std::sqrt(2.0 * std::numbers::pi * d0 * d0 + std::numbers::pi * s);
}

} // namespace tdt
