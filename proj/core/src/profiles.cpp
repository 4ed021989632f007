#include "pcs/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"

namespace pcs {

std::string_view to_string(ProfileKind k) {
    return k == ProfileKind::diagonal ? "diagonal" : "circulant";
}

ProfileKind profile_kind_from_string(std::string_view name) {
    if (name == "diagonal") return ProfileKind::diagonal;
    if (name == "circulant") return ProfileKind::circulant;
    throw ConfigError("unknown profile kind '" + std::string(name) + "'");
}

std::string_view to_string(ProfileFamily f) {
    switch (f) {
    case ProfileFamily::banded: return "banded";
    case ProfileFamily::piecewise_constant: return "piecewise_constant";
    case ProfileFamily::oscillatory: return "oscillatory";
    case ProfileFamily::circulant_unit_modulus: return "circulant_unit_modulus";
    case ProfileFamily::custom: return "custom";
    }
    return "custom";
}

ProfileFamily profile_family_from_string(std::string_view name) {
    for (auto f : {ProfileFamily::banded, ProfileFamily::piecewise_constant, ProfileFamily::oscillatory,
                   ProfileFamily::circulant_unit_modulus, ProfileFamily::custom})
        if (to_string(f) == name) return f;
    throw ConfigError("unknown profile family '" + std::string(name) + "'");
}

BandWindow band_window_from_string(std::string_view name) {
    if (name == "raised_cosine") return BandWindow::raised_cosine;
    if (name == "boxcar") return BandWindow::boxcar;
    throw ConfigError("unknown band window '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

SensorProfileSet::SensorProfileSet(ProfileKind kind, Scenario scenario, std::vector<CVector> vectors)
    : kind_(kind), scenario_(scenario), vectors_(std::move(vectors)) {
    if (vectors_.empty()) throw ConfigError("profiles: at least one sensor required");
    const Index n = vectors_.front().size();
    if (n < 1) throw ConfigError("profiles: N must be at least 1");
    for (const auto& v : vectors_)
        if (v.size() != n) throw DimensionError("profiles: all sensor vectors must have length N");
    spectra_.reserve(vectors_.size());
    for (const auto& v : vectors_) spectra_.push_back(kind_ == ProfileKind::diagonal ? v : detail::fft(v));
}

std::size_t SensorProfileSet::checked(Index c) const {
    if (c < 0 || c >= sensors()) throw DimensionError("profiles: sensor index " + std::to_string(c) + " out of range");
    return static_cast<std::size_t>(c);
}

CMatrix SensorProfileSet::dense(Index c) const {
    const CVector& h = vector(c);
    const Index n = dimension();
    if (kind_ == ProfileKind::diagonal) return h.asDiagonal();
    CMatrix out(n, n);
    for (Index k = 0; k < n; ++k)
        for (Index j = 0; j < n; ++j) out(j, k) = h((j - k + n) % n);
    return out;
}

CVector SensorProfileSet::apply(Index c, const CVector& x) const {
    if (x.size() != dimension()) throw DimensionError("apply_profile: vector length differs from N");
    if (kind_ == ProfileKind::diagonal) return vector(c).cwiseProduct(x);
    return detail::ifft(eigenvalues(c).cwiseProduct(detail::fft(x)));
}

CVector SensorProfileSet::apply_adjoint(Index c, const CVector& x) const {
    if (x.size() != dimension()) throw DimensionError("apply_profile: vector length differs from N");
    if (kind_ == ProfileKind::diagonal) return vector(c).conjugate().cwiseProduct(x);
    return detail::ifft(eigenvalues(c).conjugate().cwiseProduct(detail::fft(x)));
}

CMatrix SensorProfileSet::right_multiply(Index c, const CMatrix& rows) const {
    if (rows.cols() != dimension()) throw DimensionError("right_multiply: row length differs from N");
    if (kind_ == ProfileKind::diagonal) return rows * vector(c).asDiagonal();
    return rows * dense(c);
}

bool SensorProfileSet::is_real(double tol) const {
    return std::all_of(vectors_.begin(), vectors_.end(),
                       [tol](const CVector& v) { return v.imag().cwiseAbs().maxCoeff() <= tol; });
}

double SensorProfileSet::gram_target() const {
    return scenario_ == Scenario::distinct ? static_cast<double>(sensors()) : 1.0;
}

// ---------------------------------------------------------------------------

namespace {

// Squared column sums sum_c |v_{c,i}|^2 over the diagonalizing basis.
RVector gram_diagonal(const SensorProfileSet& profiles) {
    RVector sum = RVector::Zero(profiles.dimension());
    for (Index c = 0; c < profiles.sensors(); ++c) sum += profiles.eigenvalues(c).cwiseAbs2();
    return sum;
}

std::vector<CVector> banded_vectors(const ProfileFamilySpec& spec, Index sensors, const LevelPartition& partition) {
    if (spec.band_below < 0 || spec.band_above < 0) throw ConfigError("banded: band radii must be nonnegative");
    if (partition.levels() != sensors)
        throw ConfigError("banded: the partition must have D = C levels (got D = " +
                          std::to_string(partition.levels()) + ")");
    const Index n = partition.size();
    std::vector<CVector> out;
    for (Index c = 0; c < sensors; ++c) {
        CVector h = CVector::Zero(n);
        // Levels outside 0..C-1 are dropped, but they still occupy their
        // virtual width (taken as |I_c|) so the taper stays centred on level c.
        const auto own_width = static_cast<Index>(partition.level(c).size());
        Index extent = 0;
        std::vector<std::pair<Index, Index>> placed;  // (level, virtual offset)
        for (Index d = c - spec.band_below; d <= c + spec.band_above; ++d) {
            if (d < 0 || d >= sensors) {
                extent += own_width;
                continue;
            }
            placed.emplace_back(d, extent);
            extent += static_cast<Index>(partition.level(d).size());
        }
        for (const auto& [d, offset] : placed) {
            const auto& level = partition.level(d);
            for (std::size_t r = 0; r < level.size(); ++r) {
                double w = 1.0;
                if (spec.window == BandWindow::raised_cosine) {
                    const double pos = static_cast<double>(offset + static_cast<Index>(r) + 1);
                    const double s = std::sin(std::numbers::pi * pos / static_cast<double>(extent + 1));
                    w = s * s;
                }
                h(level[r]) = w;
            }
        }
        out.push_back(std::move(h));
    }
    return out;
}

std::vector<CVector> piecewise_vectors(const ProfileFamilySpec& spec, Index sensors, Scenario scenario,
                                       const LevelPartition& partition) {
    const CMatrix& v = spec.isometry;
    if (v.rows() != sensors) throw ConfigError("piecewise_constant: V must have C rows");
    if (v.cols() > v.rows()) throw ConfigError("piecewise_constant: D > C, V cannot be an isometry");
    if (v.cols() != partition.levels()) throw ConfigError("piecewise_constant: V must have D = levels columns");
    const CMatrix gram = v.adjoint() * v;
    if ((gram - CMatrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff() > 1e-10)
        throw ConfigError("piecewise_constant: V is not an isometry (V^* V != I)");
    const double m = scenario == Scenario::distinct ? 1.0 : static_cast<double>(sensors);
    const double scale = std::sqrt(static_cast<double>(sensors) / m);
    const Index n = partition.size();
    std::vector<CVector> out;
    for (Index c = 0; c < sensors; ++c) {
        CVector h(n);
        for (Index i = 0; i < n; ++i) h(i) = scale * v(c, partition.level_of(i));
        out.push_back(std::move(h));
    }
    return out;
}

std::vector<CVector> oscillatory_vectors(Index sensors, Index n, Scenario scenario) {
    const double m = scenario == Scenario::distinct ? 1.0 : static_cast<double>(sensors);
    const double amp = 1.0 / std::sqrt(m);
    std::vector<CVector> out;
    for (Index c = 1; c <= sensors; ++c) {
        CVector h(n);
        for (Index i = 1; i <= n; ++i) {
            // Reduce c*i mod N before scaling so the phase stays exact.
            const double phase = 2.0 * std::numbers::pi * static_cast<double>((c * i) % n) / static_cast<double>(n);
            h(i - 1) = std::polar(amp, phase);
        }
        out.push_back(std::move(h));
    }
    return out;
}

std::vector<CVector> circulant_vectors(const ProfileFamilySpec& spec, Index sensors, Index n, Scenario scenario) {
    const double m = scenario == Scenario::distinct ? 1.0 : static_cast<double>(sensors);
    const double amp = 1.0 / std::sqrt(m);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::bernoulli_distribution coin(0.5);
    std::vector<CVector> out;
    for (Index c = 0; c < sensors; ++c) {
        Rng rng = substream(spec.seed, {0xC1C, static_cast<std::uint64_t>(c)});
        CVector lambda(n);
        if (!spec.conjugate_symmetric) {
            for (Index k = 0; k < n; ++k) lambda(k) = std::polar(amp, phase(rng));
        } else {
            lambda(0) = coin(rng) ? amp : -amp;
            for (Index k = 1; 2 * k < n; ++k) {
                lambda(k) = std::polar(amp, phase(rng));
                lambda(n - k) = std::conj(lambda(k));
            }
            if (n % 2 == 0) lambda(n / 2) = coin(rng) ? amp : -amp;
        }
        CVector h = detail::ifft(lambda);
        if (spec.conjugate_symmetric) h = h.real().cast<Complex>();
        out.push_back(std::move(h));
    }
    return out;
}

} // namespace

SensorProfileSet make_profiles(const ProfileFamilySpec& spec, Index sensors, Index n, Scenario scenario,
                               const std::optional<LevelPartition>& partition) {
    if (sensors < 1) throw ConfigError("profiles: C must be at least 1");
    if (n < 1) throw ConfigError("profiles: N must be at least 1");
    if (partition && partition->size() != n) throw DimensionError("profiles: partition size differs from N");

    switch (spec.family) {
    case ProfileFamily::banded: {
        if (!partition && sensors > n) throw ConfigError("banded: C exceeds N");
        const LevelPartition levels = partition ? *partition : LevelPartition::equal(n, sensors);
        return normalize_joint_isometry(
            SensorProfileSet(ProfileKind::diagonal, scenario, banded_vectors(spec, sensors, levels)));
    }
    case ProfileFamily::piecewise_constant: {
        if (spec.isometry.cols() < 1) throw ConfigError("piecewise_constant: isometry V required");
        const LevelPartition levels = partition ? *partition : LevelPartition::equal(n, spec.isometry.cols());
        // Exact by construction; normalization only removes rounding.
        return normalize_joint_isometry(
            SensorProfileSet(ProfileKind::diagonal, scenario, piecewise_vectors(spec, sensors, scenario, levels)));
    }
    case ProfileFamily::oscillatory:
        return SensorProfileSet(ProfileKind::diagonal, scenario, oscillatory_vectors(sensors, n, scenario));
    case ProfileFamily::circulant_unit_modulus:
        return SensorProfileSet(ProfileKind::circulant, scenario, circulant_vectors(spec, sensors, n, scenario));
    case ProfileFamily::custom: {
        if (static_cast<Index>(spec.custom_vectors.size()) != sensors)
            throw ConfigError("custom profiles: expected C vectors");
        SensorProfileSet raw(spec.custom_kind, scenario, spec.custom_vectors);
        if (raw.dimension() != n) throw DimensionError("custom profiles: vector length differs from N");
        return normalize_joint_isometry(raw);
    }
    }
    throw ConfigError("unsupported profile family");
}

SensorProfileSet normalize_joint_isometry(const SensorProfileSet& profiles) {
    const RVector sum = gram_diagonal(profiles);
    const double target = profiles.gram_target();
    for (Index i = 0; i < sum.size(); ++i)
        if (!(sum(i) > 0.0))
            throw DegenerateProfileError(std::string("joint isometry: zero ") +
                                         (profiles.kind() == ProfileKind::diagonal ? "column " : "eigenvalue stack ") +
                                         std::to_string(i) + " across all sensors");
    const RVector scale = (target / sum.array()).sqrt().matrix();
    std::vector<CVector> out;
    out.reserve(static_cast<std::size_t>(profiles.sensors()));
    for (Index c = 0; c < profiles.sensors(); ++c) {
        CVector spectrum = profiles.eigenvalues(c).cwiseProduct(scale.cast<Complex>());
        if (profiles.kind() == ProfileKind::diagonal) {
            out.push_back(std::move(spectrum));
        } else {
            CVector h = detail::ifft(spectrum);
            // Real symbols have conjugate-symmetric spectra; keep them real.
            if (profiles.vector(c).imag().cwiseAbs().maxCoeff() == 0.0) h = h.real().cast<Complex>();
            out.push_back(std::move(h));
        }
    }
    return SensorProfileSet(profiles.kind(), profiles.scenario(), std::move(out));
}

double verify_joint_isometry(const SensorProfileSet& profiles) {
    const RVector sum = gram_diagonal(profiles);
    return (sum.array() / profiles.gram_target() - 1.0).abs().maxCoeff();
}

std::vector<ProfileNorms> profile_norms(const SensorProfileSet& profiles) {
    std::vector<ProfileNorms> out;
    for (Index c = 0; c < profiles.sensors(); ++c) {
        const CVector& h = profiles.vector(c);
        if (profiles.kind() == ProfileKind::diagonal) {
            const double sup = h.cwiseAbs().maxCoeff();
            out.push_back({sup, sup});
        } else {
            out.push_back({h.cwiseAbs().sum(), profiles.eigenvalues(c).cwiseAbs().maxCoeff()});
        }
    }
    return out;
}

CVector apply_profile(const SensorProfileSet& profiles, Index c, const CVector& x) {
    return profiles.apply(c, x);
}

CMatrix dft_isometry(Index c, Index d) {
    if (c < 1 || d < 1 || d > c) throw ConfigError("dft_isometry: need 1 <= D <= C");
    CMatrix v(c, d);
    const double amp = 1.0 / std::sqrt(static_cast<double>(c));
    for (Index r = 0; r < c; ++r)
        for (Index k = 0; k < d; ++k)
            v(r, k) = std::polar(amp, -2.0 * std::numbers::pi * static_cast<double>((r * k) % c) / static_cast<double>(c));
    return v;
}

double isometry_coherence(const CMatrix& v) {
    return v.cwiseAbs2().maxCoeff();
}

} // namespace pcs
