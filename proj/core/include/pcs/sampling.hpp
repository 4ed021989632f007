#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcs/common.hpp"
#include "pcs/profiles.hpp"

namespace pcs {

enum class RowLaw { gaussian, bernoulli_pm1, subsampled_dft, random_convolution };

std::string_view to_string(RowLaw law);
RowLaw row_law_from_string(std::string_view name);

/// An isotropic distribution G of sensing vectors in C^N.
struct RowDistribution {
    RowLaw law = RowLaw::gaussian;
    Index dimension = 0;

    /// alpha in E exp(theta <Y, x>) <= exp(alpha theta^2); defined for the real
    /// subgaussian laws (gaussian, bernoulli_pm1), both 1/2.
    std::optional<double> subgaussian_parameter() const;

    /// mu(G) in the sup-norm sense: the a.s. bound on ||a||_inf^2. Empty for
    /// gaussian rows, which are unbounded.
    std::optional<double> coherence() const;
};

/// Draws `count` sensing rows (the rows of A~, i.e. a~_i^*) as a count x N
/// matrix. Deterministic in `seed`. Gaussian and Bernoulli rows are real with
/// unit-variance entries; Fourier rows are sqrt(N)-scaled unitary DFT rows at
/// frequencies drawn uniformly with replacement; random_convolution shares one
/// random sign diagonal across the call and subsamples the DFT after it.
CMatrix draw_rows(const RowDistribution& dist, Index count, std::uint64_t seed);

/// Serializable description of an assembled operator (not its entries).
struct OperatorSpec {
    Scenario scenario = Scenario::distinct;
    std::vector<RowLaw> laws;  // one per sensor (distinct) or a single shared law
    Index m = 0;
    Index sensors = 1;
    Index n = 0;
    std::uint64_t seed = 0;
    std::string profile_reference;
    std::string transform = "identity";
};

/// The stacked measurement matrix A = scale * [A_1; ...; A_C], A_c = A~_c H_c.
/// Stored densely; immutable after assembly, so apply/adjoint_apply are safe to
/// call concurrently.
class MeasurementOperator {
public:
    /// Wraps an explicit matrix as a single-block operator (tests, CLI input).
    static MeasurementOperator from_matrix(CMatrix a);

    MeasurementOperator(OperatorSpec spec, CMatrix matrix, std::vector<Index> block_rows, double scale);

    const OperatorSpec& spec() const { return spec_; }
    Scenario scenario() const { return spec_.scenario; }
    Index rows() const { return matrix_.rows(); }
    Index cols() const { return matrix_.cols(); }
    Index sensors() const { return static_cast<Index>(block_rows_.size()); }
    const std::vector<Index>& block_rows() const { return block_rows_; }
    double scale() const { return scale_; }

    /// The scaled stacked matrix A.
    const CMatrix& matrix() const { return matrix_; }
    /// Unscaled block A_c = A~_c H_c.
    CMatrix block(Index c) const;

    CVector apply(const CVector& x) const;
    CVector adjoint_apply(const CVector& y) const;

private:
    OperatorSpec spec_;
    CMatrix matrix_;
    std::vector<Index> block_rows_;
    double scale_;
};

/// Distinct sampling: sensor c draws m/C rows from its own law on an
/// independent substream; A = m^{-1/2} [A~_1 H_1; ...; A~_C H_C].
MeasurementOperator assemble_distinct(const SensorProfileSet& profiles, const std::vector<RowDistribution>& dists,
                                      Index m, std::uint64_t seed);
MeasurementOperator assemble_distinct(const SensorProfileSet& profiles, const RowDistribution& dist, Index m,
                                      std::uint64_t seed);

/// Identical sampling: one shared A~ of m/C rows; A = sqrt(C/m) [A~ H_1; ...; A~ H_C].
MeasurementOperator assemble_identical(const SensorProfileSet& profiles, const RowDistribution& dist, Index m,
                                       std::uint64_t seed);

/// Dispatches on the profile scenario with one law for all sensors.
MeasurementOperator assemble(const SensorProfileSet& profiles, const RowDistribution& dist, Index m,
                             std::uint64_t seed);

/// A synthesis transform U with U^* U = I, as a forward/adjoint pair.
struct OrthogonalTransform {
    std::string name;
    Index dimension = 0;
    std::function<CVector(const CVector&)> forward;
    std::function<CVector(const CVector&)> adjoint;

    static OrthogonalTransform identity(Index n);
    /// Orthonormal DCT-II synthesis (columns are the DCT basis vectors).
    static OrthogonalTransform dct(Index n);
    /// Orthonormal Haar wavelet synthesis; N must be a power of two.
    static OrthogonalTransform haar(Index n);
    static OrthogonalTransform from_name(std::string_view name, Index n);
};

/// The composed operator A U for transform-sparse recovery. Rejects U when
/// ||U^* U p - p|| > 1e-8 ||p|| on random probes.
MeasurementOperator sparsify_in_transform(const MeasurementOperator& op, const OrthogonalTransform& transform);

} // namespace pcs
