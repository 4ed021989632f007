#include "pcs/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcs/parallel.hpp"

namespace pcs {

std::string_view to_string(CoherenceSource s) {
    switch (s) {
    case CoherenceSource::exact: return "exact";
    case CoherenceSource::gaussian_proxy: return "gaussian_proxy (non-rigorous)";
    case CoherenceSource::user_supplied: return "user_supplied";
    case CoherenceSource::missing: return "missing";
    }
    return "missing";
}

double zeta(double alpha_min, double alpha_max, double xi_dist) {
    if (!(alpha_min > 0.0) || !(alpha_max > 0.0)) throw ConfigError("zeta: subgaussian parameters must be positive");
    if (alpha_min > alpha_max) throw ConfigError("zeta: alpha_min exceeds alpha_max");
    if (!(xi_dist >= 1.0)) throw ConfigError("zeta: Xi_dist must be at least 1");
    const double beta = std::max(2.0, std::exp(1.0 / (4.0 * alpha_min)));
    return 1.0 / (32.0 * alpha_max * alpha_max * xi_dist * xi_dist * beta + 8.0 * alpha_max * xi_dist);
}

namespace {

void require_diagonal(const SensorProfileSet& profiles, const char* what) {
    if (profiles.kind() != ProfileKind::diagonal)
        throw ConfigError(std::string(what) + ": defined for diagonal sensor profiles only");
}

void require_partition(const SensorProfileSet& profiles, const LevelPartition& partition, const char* what) {
    if (partition.size() != profiles.dimension())
        throw DimensionError(std::string(what) + ": partition size differs from N");
}

} // namespace

double upsilon_dist(const SensorProfileSet& profiles, const LevelPartition& partition) {
    require_diagonal(profiles, "upsilon_dist");
    require_partition(profiles, partition, "upsilon_dist");
    double best = 0.0;
    for (Index c = 0; c < profiles.sensors(); ++c) {
        const RVector mag = profiles.vector(c).cwiseAbs();
        const double sup = mag.maxCoeff();
        double sum = 0.0;
        for (const auto& level : partition.all()) {
            double level_sup = 0.0;
            for (Index i : level) level_sup = std::max(level_sup, mag(i));
            sum += sup * level_sup;
        }
        best = std::max(best, sum);
    }
    return best / static_cast<double>(partition.levels());
}

double upsilon_idt(const SensorProfileSet& profiles, const LevelPartition& partition) {
    require_diagonal(profiles, "upsilon_idt");
    require_partition(profiles, partition, "upsilon_idt");
    const Index n = profiles.dimension();
    CMatrix h(profiles.sensors(), n);
    for (Index c = 0; c < profiles.sensors(); ++c) h.row(c) = profiles.vector(c).transpose();
    // g(i, j) = sum_c conj(h_{c,i}) h_{c,j}
    const RMatrix g = (h.adjoint() * h).cwiseAbs();
    double best = 0.0;
    for (Index i = 0; i < n; ++i) {
        double sum = 0.0;
        for (const auto& level : partition.all()) {
            double level_max = 0.0;
            for (Index j : level) level_max = std::max(level_max, g(i, j));
            sum += level_max;
        }
        best = std::max(best, sum);
    }
    return static_cast<double>(profiles.sensors()) / static_cast<double>(partition.levels()) * best;
}

BoundReport make_bound_report(const SensorProfileSet& profiles, const std::vector<RowDistribution>& dists,
                              const ReportOptions& options) {
    if (dists.empty()) throw ConfigError("bound report: at least one row law required");
    if (dists.size() != 1 && static_cast<Index>(dists.size()) != profiles.sensors())
        throw ConfigError("bound report: need one row law, or one per sensor");

    BoundReport r;
    r.sensors = profiles.sensors();
    r.n = profiles.dimension();

    const auto norms = profile_norms(profiles);
    for (const auto& nrm : norms) {
        r.norm1_max = std::max(r.norm1_max, nrm.norm_1to1 * nrm.norm_1to1);
        r.xi_dist = std::max(r.xi_dist, nrm.norm_2to2 * nrm.norm_2to2);
    }

    if (options.mu_override) {
        r.mu_max = *options.mu_override;
        r.mu_source = CoherenceSource::user_supplied;
    } else {
        double mu = 0.0;
        bool exact = true;
        for (const auto& d : dists) {
            if (auto coh = d.coherence()) {
                mu = std::max(mu, *coh);
            } else if (options.m_for_gaussian_proxy > 0) {
                exact = false;
                mu = std::max(mu, 2.0 * std::log(2.0 * static_cast<double>(r.n) *
                                                  static_cast<double>(options.m_for_gaussian_proxy)));
            } else {
                exact = false;
                mu = -1.0;
                break;
            }
        }
        if (mu >= 0.0) {
            r.mu_max = mu;
            r.mu_source = exact ? CoherenceSource::exact : CoherenceSource::gaussian_proxy;
        }
    }

    bool subgaussian = true;
    double amin = 0.0, amax = 0.0;
    for (const auto& d : dists) {
        const auto a = d.subgaussian_parameter();
        if (!a) {
            subgaussian = false;
            break;
        }
        amin = amin == 0.0 ? *a : std::min(amin, *a);
        amax = std::max(amax, *a);
    }
    if (subgaussian) {
        r.alpha_min = amin;
        r.alpha_max = amax;
        if (profiles.scenario() == Scenario::distinct && r.xi_dist >= 1.0 - 1e-12)
            r.zeta = zeta(amin, amax, std::max(1.0, r.xi_dist));
    }

    if (options.partition && profiles.kind() == ProfileKind::diagonal) {
        r.levels = options.partition->levels();
        if (profiles.scenario() == Scenario::distinct)
            r.upsilon_dist = upsilon_dist(profiles, *options.partition);
        else
            r.upsilon_idt = upsilon_idt(profiles, *options.partition);
    }
    if (options.isometry) r.mu_v = isometry_coherence(*options.isometry);

    const double logn = std::log(static_cast<double>(r.n));
    r.log_factor = options.log_factor.value_or(logn * logn);
    r.log_factor_label = options.log_factor ? "user" : "log(N)^2";
    return r;
}

namespace {

double require_mu(const BoundReport& report, const char* what) {
    if (!report.mu_max)
        throw ConfigError(std::string(what) + ": coherence mu unavailable (gaussian law without a proxy)");
    return *report.mu_max;
}

std::string mu_note(const BoundReport& report) {
    std::string note = "scaling quantity; absolute constant unknown";
    if (report.mu_source == CoherenceSource::gaussian_proxy) note += "; mu is a non-rigorous gaussian proxy";
    return note;
}

} // namespace

ScalingQuantity condition_thm1(const BoundReport& report, double s, std::optional<double> log_factor) {
    const double mu = require_mu(report, "condition_thm1");
    return {s * mu * report.norm1_max * log_factor.value_or(report.log_factor), true, mu_note(report)};
}

ScalingQuantity condition_thm2(const BoundReport& report, double s, double delta, double epsilon, Index n) {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("condition_thm2: delta must lie in (0, 1)");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("condition_thm2: epsilon must lie in (0, 1)");
    if (!(s > 0.0) || s > static_cast<double>(n)) throw ConfigError("condition_thm2: need 0 < s <= N");
    const double xi2 = report.xi_dist * report.xi_dist;
    const double value = xi2 / (delta * delta) *
                         (s * std::log(2.0 * static_cast<double>(n) / s) + std::log(2.0 / epsilon));
    return {value, true, "scaling quantity; absolute constant depends on alpha_min, alpha_max"};
}

ScalingQuantity condition_cor1(const BoundReport& report, double s, double lambda, std::optional<double> log_factor) {
    const double mu = require_mu(report, "condition_cor1");
    if (!report.upsilon_dist) throw ConfigError("condition_cor1: Upsilon_dist unavailable (needs diagonal distinct profiles and a partition)");
    return {lambda * s * mu * *report.upsilon_dist * log_factor.value_or(report.log_factor), true, mu_note(report)};
}

ScalingQuantity condition_cor2(const BoundReport& report, double s, double lambda, std::optional<double> log_factor) {
    const double mu = require_mu(report, "condition_cor2");
    if (!report.upsilon_idt) throw ConfigError("condition_cor2: Upsilon_idt unavailable (needs diagonal identical profiles and a partition)");
    return {lambda * s * mu * *report.upsilon_idt * log_factor.value_or(report.log_factor), true, mu_note(report)};
}

CoherenceCheck coherence_bound_check(const SensorProfileSet& profiles, const RowDistribution& dist, long trials,
                                     std::uint64_t seed) {
    const auto mu = dist.coherence();
    if (!mu) throw ConfigError("coherence_bound_check: unbounded row law");
    if (dist.dimension != profiles.dimension()) throw DimensionError("coherence_bound_check: law dimension differs from N");
    if (trials < 1) throw ConfigError("coherence_bound_check: trials must be positive");
    const auto norms = profile_norms(profiles);
    CoherenceCheck out;
    out.draws = trials;
    constexpr long chunk = 2048;
    for (Index c = 0; c < profiles.sensors(); ++c) {
        const double n1 = norms[static_cast<std::size_t>(c)].norm_1to1;
        const double bound = *mu * n1 * n1;
        double worst = 0.0;
        for (long start = 0, batch = 0; start < trials; start += chunk, ++batch) {
            const long count = std::min(chunk, trials - start);
            const CMatrix rows = draw_rows(dist, count, derive_seed(seed, {static_cast<std::uint64_t>(c),
                                                                           static_cast<std::uint64_t>(batch)}));
            // Row i of rows * H_c is a_{c,i}^* with a_{c,i} = H_c^* a~_{c,i}.
            const RMatrix mags = profiles.right_multiply(c, rows).cwiseAbs2();
            for (Index i = 0; i < mags.rows(); ++i) {
                const double sup = mags.row(i).maxCoeff();
                worst = std::max(worst, sup);
                if (sup > bound * (1.0 + 1e-12)) ++out.violations;
            }
        }
        out.empirical.push_back(worst);
        out.bound.push_back(bound);
    }
    return out;
}

ConcentrationResult empirical_concentration(const OperatorRecipe& recipe, const CVector& x,
                                            const std::vector<double>& ts, long trials, std::uint64_t seed,
                                            unsigned threads) {
    const auto& profiles = recipe.profiles;
    const auto alpha = recipe.dist.subgaussian_parameter();
    if (!alpha) throw ConfigError("empirical_concentration: needs a real subgaussian law (gaussian, bernoulli_pm1)");
    if (profiles.scenario() != Scenario::distinct)
        throw ConfigError("empirical_concentration: the concentration inequality covers distinct sampling");
    if (!profiles.is_real()) throw ConfigError("empirical_concentration: profiles must be real");
    if (x.size() != profiles.dimension()) throw DimensionError("empirical_concentration: x length differs from N");
    if (x.imag().cwiseAbs().maxCoeff() > 0.0) throw ConfigError("empirical_concentration: x must be real");
    if (x.norm() == 0.0) throw ConfigError("empirical_concentration: x must be nonzero");
    if (trials < 1) throw ConfigError("empirical_concentration: trials must be positive");
    for (double t : ts)
        if (!(t > 0.0 && t < 1.0)) throw ConfigError("empirical_concentration: t must lie in (0, 1)");

    double xi = 0.0;
    for (const auto& nrm : profile_norms(profiles)) xi = std::max(xi, nrm.norm_2to2 * nrm.norm_2to2);

    std::vector<double> deviation(static_cast<std::size_t>(trials));
    const double x2 = x.squaredNorm();
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t k) {
        const auto op = assemble_distinct(profiles, recipe.dist, recipe.m, derive_seed(seed, {k}));
        deviation[k] = std::abs(op.apply(x).squaredNorm() / x2 - 1.0);
    });

    ConcentrationResult out;
    out.zeta = zeta(*alpha, *alpha, std::max(1.0, xi));
    out.trials = trials;
    out.m = recipe.m;
    for (double t : ts) {
        const auto hits = std::count_if(deviation.begin(), deviation.end(), [t](double d) { return d >= t; });
        out.points.push_back({t, static_cast<double>(hits) / static_cast<double>(trials),
                              2.0 * std::exp(-out.zeta * t * t * static_cast<double>(recipe.m))});
    }
    return out;
}

double restricted_isometry_constant(const CMatrix& a, Index s) {
    const Index n = a.cols();
    if (s < 1 || s > n) throw ConfigError("restricted_isometry_constant: need 1 <= s <= N");
    if (n > 24) throw ConfigError("restricted_isometry_constant: exhaustive enumeration limited to N <= 24");
    const CMatrix gram = a.adjoint() * a;
    std::vector<Index> support(static_cast<std::size_t>(s));
    std::iota(support.begin(), support.end(), Index{0});
    CMatrix sub(s, s);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig;
    double delta = 0.0;
    for (;;) {
        for (Index p = 0; p < s; ++p)
            for (Index q = 0; q < s; ++q)
                sub(p, q) = gram(support[static_cast<std::size_t>(p)], support[static_cast<std::size_t>(q)]);
        eig.compute(sub, Eigen::EigenvaluesOnly);
        const auto& ev = eig.eigenvalues();
        delta = std::max({delta, ev(s - 1) - 1.0, 1.0 - ev(0)});
        // Next combination in lexicographic order.
        Index k = s - 1;
        while (k >= 0 && support[static_cast<std::size_t>(k)] == n - s + k) --k;
        if (k < 0) break;
        ++support[static_cast<std::size_t>(k)];
        for (Index j = k + 1; j < s; ++j)
            support[static_cast<std::size_t>(j)] = support[static_cast<std::size_t>(j - 1)] + 1;
    }
    return delta;
}

RicEstimate empirical_ric(const OperatorRecipe& recipe, Index s, long trials, std::uint64_t seed, unsigned threads) {
    if (trials < 1) throw ConfigError("empirical_ric: trials must be positive");
    if (recipe.profiles.dimension() > 24) throw ConfigError("empirical_ric: exhaustive enumeration limited to N <= 24");
    RicEstimate out;
    out.per_trial.assign(static_cast<std::size_t>(trials), 0.0);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t k) {
        const auto op = assemble(recipe.profiles, recipe.dist, recipe.m, derive_seed(seed, {k}));
        out.per_trial[k] = restricted_isometry_constant(op.matrix(), s);
    });
    out.max = *std::max_element(out.per_trial.begin(), out.per_trial.end());
    out.mean = std::accumulate(out.per_trial.begin(), out.per_trial.end(), 0.0) / static_cast<double>(trials);
    return out;
}

} // namespace pcs
