#pragma once

#include <unsupported/Eigen/FFT>

#include "pcs/common.hpp"

namespace pcs::detail {

/// Unnormalized forward DFT: X_k = sum_j x_j exp(-2 pi i jk / N).
inline CVector fft(const CVector& x) {
    if (x.size() <= 1) return x;  // kissfft faults on length 1
    thread_local Eigen::FFT<double> engine;
    CVector out(x.size());
    engine.fwd(out, x);
    return out;
}

/// Inverse of fft(): x_j = N^{-1} sum_k X_k exp(2 pi i jk / N).
inline CVector ifft(const CVector& x) {
    if (x.size() <= 1) return x;
    thread_local Eigen::FFT<double> engine;
    CVector out(x.size());
    engine.inv(out, x);
    return out;
}

} // namespace pcs::detail
