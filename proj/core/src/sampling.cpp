#include "pcs/sampling.hpp"

#include <cmath>
#include <memory>
#include <numbers>

namespace pcs {

namespace {
constexpr std::uint64_t kRowTag = 0x4157;
constexpr std::uint64_t kSensorTag = 0x5E45;
constexpr std::uint64_t kSharedTag = 0x5AAE;
} // namespace

std::string_view to_string(RowLaw law) {
    switch (law) {
    case RowLaw::gaussian: return "gaussian";
    case RowLaw::bernoulli_pm1: return "bernoulli_pm1";
    case RowLaw::subsampled_dft: return "subsampled_dft";
    case RowLaw::random_convolution: return "random_convolution";
    }
    return "gaussian";
}

RowLaw row_law_from_string(std::string_view name) {
    for (auto law : {RowLaw::gaussian, RowLaw::bernoulli_pm1, RowLaw::subsampled_dft, RowLaw::random_convolution})
        if (to_string(law) == name) return law;
    throw ConfigError("unsupported row law '" + std::string(name) + "'");
}

std::optional<double> RowDistribution::subgaussian_parameter() const {
    if (law == RowLaw::gaussian || law == RowLaw::bernoulli_pm1) return 0.5;
    return std::nullopt;
}

std::optional<double> RowDistribution::coherence() const {
    if (law == RowLaw::gaussian) return std::nullopt;
    return 1.0;
}

CMatrix draw_rows(const RowDistribution& dist, Index count, std::uint64_t seed) {
    const Index n = dist.dimension;
    if (count < 1) throw ConfigError("draw_rows: count must be at least 1");
    if (n < 1) throw ConfigError("draw_rows: dimension must be at least 1");
    Rng rng = substream(seed, {kRowTag});
    CMatrix rows(count, n);
    switch (dist.law) {
    case RowLaw::gaussian: {
        std::normal_distribution<double> normal;
        for (Index i = 0; i < count; ++i)
            for (Index j = 0; j < n; ++j) rows(i, j) = normal(rng);
        break;
    }
    case RowLaw::bernoulli_pm1: {
        std::bernoulli_distribution coin(0.5);
        for (Index i = 0; i < count; ++i)
            for (Index j = 0; j < n; ++j) rows(i, j) = coin(rng) ? 1.0 : -1.0;
        break;
    }
    case RowLaw::subsampled_dft:
    case RowLaw::random_convolution: {
        RVector signs = RVector::Ones(n);
        if (dist.law == RowLaw::random_convolution) {
            std::bernoulli_distribution coin(0.5);
            for (Index j = 0; j < n; ++j) signs(j) = coin(rng) ? 1.0 : -1.0;
        }
        std::uniform_int_distribution<Index> freq(0, n - 1);
        for (Index i = 0; i < count; ++i) {
            const Index k = freq(rng);
            for (Index j = 0; j < n; ++j) {
                const double phase = -2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / static_cast<double>(n);
                rows(i, j) = signs(j) * std::polar(1.0, phase);
            }
        }
        break;
    }
    }
    return rows;
}

// ---------------------------------------------------------------------------

MeasurementOperator MeasurementOperator::from_matrix(CMatrix a) {
    OperatorSpec spec;
    spec.m = a.rows();
    spec.n = a.cols();
    spec.profile_reference = "explicit";
    std::vector<Index> block{a.rows()};
    return MeasurementOperator(std::move(spec), std::move(a), std::move(block), 1.0);
}

MeasurementOperator::MeasurementOperator(OperatorSpec spec, CMatrix matrix, std::vector<Index> block_rows,
                                         double scale)
    : spec_(std::move(spec)), matrix_(std::move(matrix)), block_rows_(std::move(block_rows)), scale_(scale) {
    Index total = 0;
    for (Index r : block_rows_) total += r;
    if (total != matrix_.rows()) throw DimensionError("operator: block rows do not add up to m");
}

CMatrix MeasurementOperator::block(Index c) const {
    if (c < 0 || c >= sensors()) throw DimensionError("operator: block index out of range");
    Index start = 0;
    for (Index k = 0; k < c; ++k) start += block_rows_[static_cast<std::size_t>(k)];
    return matrix_.middleRows(start, block_rows_[static_cast<std::size_t>(c)]) / scale_;
}

CVector MeasurementOperator::apply(const CVector& x) const {
    if (x.size() != cols()) throw DimensionError("apply: vector length differs from N");
    return matrix_ * x;
}

CVector MeasurementOperator::adjoint_apply(const CVector& y) const {
    if (y.size() != rows()) throw DimensionError("adjoint_apply: vector length differs from m");
    return matrix_.adjoint() * y;
}

// ---------------------------------------------------------------------------

namespace {

Index rows_per_sensor(Index m, Index sensors) {
    if (m < 1) throw ConfigError("assemble: m must be at least 1");
    if (m % sensors != 0)
        throw ConfigError("assemble: m = " + std::to_string(m) + " is not divisible by C = " + std::to_string(sensors));
    return m / sensors;
}

void require_scenario(const SensorProfileSet& profiles, Scenario expected) {
    if (profiles.scenario() != expected)
        throw ConfigError(std::string("assemble: profiles are normalized for ") +
                          std::string(to_string(profiles.scenario())) + " sampling, not " +
                          std::string(to_string(expected)));
}

} // namespace

MeasurementOperator assemble_distinct(const SensorProfileSet& profiles, const std::vector<RowDistribution>& dists,
                                      Index m, std::uint64_t seed) {
    require_scenario(profiles, Scenario::distinct);
    const Index sensors = profiles.sensors();
    const Index n = profiles.dimension();
    if (static_cast<Index>(dists.size()) != sensors) throw ConfigError("assemble_distinct: need one law per sensor");
    const Index per = rows_per_sensor(m, sensors);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));

    CMatrix a(m, n);
    OperatorSpec spec{Scenario::distinct, {}, m, sensors, n, seed, {}, "identity"};
    for (Index c = 0; c < sensors; ++c) {
        const auto& dist = dists[static_cast<std::size_t>(c)];
        if (dist.dimension != n) throw DimensionError("assemble_distinct: law dimension differs from N");
        spec.laws.push_back(dist.law);
        const CMatrix rows = draw_rows(dist, per, derive_seed(seed, {kSensorTag, static_cast<std::uint64_t>(c)}));
        a.middleRows(c * per, per) = scale * profiles.right_multiply(c, rows);
    }
    return MeasurementOperator(std::move(spec), std::move(a), std::vector<Index>(static_cast<std::size_t>(sensors), per),
                               scale);
}

MeasurementOperator assemble_distinct(const SensorProfileSet& profiles, const RowDistribution& dist, Index m,
                                      std::uint64_t seed) {
    return assemble_distinct(profiles, std::vector<RowDistribution>(static_cast<std::size_t>(profiles.sensors()), dist),
                             m, seed);
}

MeasurementOperator assemble_identical(const SensorProfileSet& profiles, const RowDistribution& dist, Index m,
                                       std::uint64_t seed) {
    require_scenario(profiles, Scenario::identical);
    const Index sensors = profiles.sensors();
    const Index n = profiles.dimension();
    if (dist.dimension != n) throw DimensionError("assemble_identical: law dimension differs from N");
    const Index per = rows_per_sensor(m, sensors);
    const double scale = std::sqrt(static_cast<double>(sensors) / static_cast<double>(m));

    const CMatrix shared = draw_rows(dist, per, derive_seed(seed, {kSharedTag}));
    CMatrix a(m, n);
    for (Index c = 0; c < sensors; ++c) a.middleRows(c * per, per) = scale * profiles.right_multiply(c, shared);
    OperatorSpec spec{Scenario::identical, {dist.law}, m, sensors, n, seed, {}, "identity"};
    return MeasurementOperator(std::move(spec), std::move(a), std::vector<Index>(static_cast<std::size_t>(sensors), per),
                               scale);
}

MeasurementOperator assemble(const SensorProfileSet& profiles, const RowDistribution& dist, Index m,
                             std::uint64_t seed) {
    return profiles.scenario() == Scenario::distinct ? assemble_distinct(profiles, dist, m, seed)
                                                     : assemble_identical(profiles, dist, m, seed);
}

// ---------------------------------------------------------------------------

namespace {

OrthogonalTransform from_dense(std::string name, CMatrix u) {
    auto shared = std::make_shared<const CMatrix>(std::move(u));
    OrthogonalTransform t;
    t.name = std::move(name);
    t.dimension = shared->cols();
    t.forward = [shared](const CVector& x) -> CVector { return *shared * x; };
    t.adjoint = [shared](const CVector& x) -> CVector { return shared->adjoint() * x; };
    return t;
}

CVector haar_analysis(const CVector& x) {
    CVector out = x;
    CVector tmp(x.size());
    const double r = std::numbers::sqrt2 / 2.0;
    for (Index len = x.size(); len > 1; len /= 2) {
        const Index half = len / 2;
        for (Index k = 0; k < half; ++k) {
            tmp(k) = r * (out(2 * k) + out(2 * k + 1));
            tmp(half + k) = r * (out(2 * k) - out(2 * k + 1));
        }
        out.head(len) = tmp.head(len);
    }
    return out;
}

CVector haar_synthesis(const CVector& c) {
    CVector out = c;
    CVector tmp(c.size());
    const double r = std::numbers::sqrt2 / 2.0;
    for (Index len = 2; len <= c.size(); len *= 2) {
        const Index half = len / 2;
        for (Index k = 0; k < half; ++k) {
            tmp(2 * k) = r * (out(k) + out(half + k));
            tmp(2 * k + 1) = r * (out(k) - out(half + k));
        }
        out.head(len) = tmp.head(len);
    }
    return out;
}

} // namespace

OrthogonalTransform OrthogonalTransform::identity(Index n) {
    OrthogonalTransform t;
    t.name = "identity";
    t.dimension = n;
    t.forward = [](const CVector& x) { return x; };
    t.adjoint = [](const CVector& x) { return x; };
    return t;
}

OrthogonalTransform OrthogonalTransform::dct(Index n) {
    if (n < 1) throw ConfigError("dct: N must be at least 1");
    CMatrix u(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k) {
            const double w = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
            u(j, k) = w * std::cos(std::numbers::pi * static_cast<double>((2 * j + 1) * k) / static_cast<double>(2 * n));
        }
    return from_dense("dct", std::move(u));
}

OrthogonalTransform OrthogonalTransform::haar(Index n) {
    if (n < 1 || (n & (n - 1)) != 0) throw ConfigError("haar: N must be a power of two");
    OrthogonalTransform t;
    t.name = "haar";
    t.dimension = n;
    t.forward = haar_synthesis;
    t.adjoint = haar_analysis;
    return t;
}

OrthogonalTransform OrthogonalTransform::from_name(std::string_view name, Index n) {
    if (name == "identity") return identity(n);
    if (name == "dct") return dct(n);
    if (name == "haar") return haar(n);
    throw ConfigError("unknown transform '" + std::string(name) + "'");
}

MeasurementOperator sparsify_in_transform(const MeasurementOperator& op, const OrthogonalTransform& transform) {
    const Index n = op.cols();
    if (transform.dimension != n) throw DimensionError("sparsify_in_transform: transform dimension differs from N");
    Rng rng = substream(0x0D7B, {static_cast<std::uint64_t>(n)});
    std::normal_distribution<double> normal;
    for (int probe = 0; probe < 4; ++probe) {
        CVector p(n);
        for (Index i = 0; i < n; ++i) p(i) = Complex(normal(rng), normal(rng));
        const CVector back = transform.adjoint(transform.forward(p));
        if ((back - p).norm() > 1e-8 * p.norm())
            throw ConfigError("sparsify_in_transform: '" + transform.name + "' is not orthogonal");
    }
    if (transform.name == "identity") return op;

    CMatrix u(n, n);
    for (Index k = 0; k < n; ++k) u.col(k) = transform.forward(CVector::Unit(n, k));
    OperatorSpec spec = op.spec();
    spec.transform = transform.name;
    return MeasurementOperator(std::move(spec), op.matrix() * u, op.block_rows(), op.scale());
}

} // namespace pcs
