#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pcs/common.hpp"
#include "pcs/signals.hpp"

namespace pcs {

enum class ProfileKind { diagonal, circulant };

std::string_view to_string(ProfileKind k);
ProfileKind profile_kind_from_string(std::string_view name);

/// The C sensor profile matrices H_1..H_C in compact form: diagonal entries
/// h_c, or the symbol (first column) h_c of a circulant matrix, so that
/// (H_c x)_j = sum_k h_c[(j - k) mod N] x_k. Immutable once built.
///
/// Circulant eigenvalues use lambda_c = sqrt(N) * Phi * h_c with Phi the unitary
/// DFT, i.e. the unnormalized FFT of the symbol.
class SensorProfileSet {
public:
    SensorProfileSet(ProfileKind kind, Scenario scenario, std::vector<CVector> vectors);

    ProfileKind kind() const { return kind_; }
    Scenario scenario() const { return scenario_; }
    Index sensors() const { return static_cast<Index>(vectors_.size()); }
    Index dimension() const { return vectors_.front().size(); }

    /// h_c (0-based sensor index).
    const CVector& vector(Index c) const { return vectors_[checked(c)]; }
    const std::vector<CVector>& vectors() const { return vectors_; }
    /// Spectrum of H_c: h_c itself for diagonal profiles, FFT(h_c) for circulant.
    const CVector& eigenvalues(Index c) const { return spectra_[checked(c)]; }

    /// Dense N x N matrix H_c.
    CMatrix dense(Index c) const;
    /// H_c x.
    CVector apply(Index c, const CVector& x) const;
    /// H_c^* x.
    CVector apply_adjoint(Index c, const CVector& x) const;
    /// rows * H_c for a stack of row vectors.
    CMatrix right_multiply(Index c, const CMatrix& rows) const;

    /// True when every H_c is a real matrix.
    bool is_real(double tol = 1e-14) const;

    /// Joint-isometry target for the Gram sum: C (distinct) or 1 (identical).
    double gram_target() const;

private:
    std::size_t checked(Index c) const;

    ProfileKind kind_;
    Scenario scenario_;
    std::vector<CVector> vectors_;
    std::vector<CVector> spectra_;
};

enum class ProfileFamily { banded, piecewise_constant, oscillatory, circulant_unit_modulus, custom };
enum class BandWindow { raised_cosine, boxcar };

std::string_view to_string(ProfileFamily f);
ProfileFamily profile_family_from_string(std::string_view name);
BandWindow band_window_from_string(std::string_view name);

struct ProfileFamilySpec {
    ProfileFamily family = ProfileFamily::oscillatory;

    // banded: sensor c is supported on levels c - band_below .. c + band_above.
    Index band_below = 1;
    Index band_above = 1;
    BandWindow window = BandWindow::raised_cosine;

    // piecewise_constant: C x D isometry V.
    CMatrix isometry;

    // circulant_unit_modulus: i.i.d. uniform eigenvalue phases; optionally
    // conjugate-symmetric so the symbols are real.
    bool conjugate_symmetric = false;
    std::uint64_t seed = 0;

    // custom: explicit vectors, normalized on construction.
    ProfileKind custom_kind = ProfileKind::diagonal;
    std::vector<CVector> custom_vectors;
};

/// Builds the requested family and returns it normalized to the scenario's
/// joint isometry condition. Level-based families (banded, piecewise_constant)
/// default to equal contiguous levels (D = C, resp. D = columns of V) when no
/// partition is given.
SensorProfileSet make_profiles(const ProfileFamilySpec& spec, Index sensors, Index n, Scenario scenario,
                               const std::optional<LevelPartition>& partition = std::nullopt);

/// Rescales each diagonal column (or each circulant eigenvalue stack) across
/// sensors so that the scenario's Gram sum is exactly the identity. Directions
/// across sensors are preserved. Throws DegenerateProfileError on a zero stack.
SensorProfileSet normalize_joint_isometry(const SensorProfileSet& profiles);

/// Max-entry deviation of C^{-1} sum H_c^* H_c (distinct) or sum H_c^* H_c
/// (identical) from the identity, evaluated in the diagonalizing basis.
double verify_joint_isometry(const SensorProfileSet& profiles);

struct ProfileNorms {
    double norm_1to1 = 0.0;
    double norm_2to2 = 0.0;
};

/// Closed-form induced norms per sensor: diagonal ||h||_inf for both;
/// circulant ||h||_1 and ||lambda||_inf.
std::vector<ProfileNorms> profile_norms(const SensorProfileSet& profiles);

/// H_c x with a 0-based sensor index; throws DimensionError on size mismatch.
CVector apply_profile(const SensorProfileSet& profiles, Index c, const CVector& x);

/// First D columns of the unitary C x C DFT: an isometry with coherence 1/C.
CMatrix dft_isometry(Index c, Index d);

/// mu(V) = max |V_{c,d}|^2.
double isometry_coherence(const CMatrix& v);

} // namespace pcs
