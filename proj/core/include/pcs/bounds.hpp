#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcs/common.hpp"
#include "pcs/profiles.hpp"
#include "pcs/sampling.hpp"
#include "pcs/signals.hpp"

namespace pcs {

/// Where the coherence value mu in a report came from.
enum class CoherenceSource {
    exact,           // bounded law, mu(G) known in closed form
    gaussian_proxy,  // high-probability sup-norm proxy 2 log(2 N m); not rigorous
    user_supplied,
    missing,
};

std::string_view to_string(CoherenceSource s);

/// Theoretical quantities for one profile set / row law pair.
struct BoundReport {
    Index sensors = 0;
    Index n = 0;
    Index levels = 0;

    std::optional<double> mu_max;  // max_c mu(G_c)
    CoherenceSource mu_source = CoherenceSource::missing;
    double norm1_max = 0.0;  // max_c ||H_c||_{1->1}^2
    double xi_dist = 0.0;    // max_c ||H_c||_{2->2}^2
    std::optional<double> alpha_min;
    std::optional<double> alpha_max;
    std::optional<double> zeta;
    std::optional<double> upsilon_dist;  // diagonal, distinct
    std::optional<double> upsilon_idt;   // diagonal, identical
    std::optional<double> mu_v;          // piecewise-constant isometry coherence

    double log_factor = 0.0;  // L
    std::string log_factor_label = "log(N)^2";
};

/// A measurement-condition right-hand side with the absolute constant hidden
/// by the asymptotic inequality left out: usable for scaling comparisons only,
/// never as an m threshold.
struct ScalingQuantity {
    double value = 0.0;
    bool unknown_constant = true;
    std::string note;
};

/// Concentration constant zeta = (32 a_max^2 Xi^2 max{2, exp(1/(4 a_min))} + 8 a_max Xi)^{-1}.
double zeta(double alpha_min, double alpha_max, double xi_dist);

/// Upsilon_dist = D^{-1} max_c sum_d ||h_c||_inf ||P_{I_d} h_c||_inf.
double upsilon_dist(const SensorProfileSet& profiles, const LevelPartition& partition);

/// Upsilon_idt = (C/D) max_i sum_d max_{j in I_d} |sum_c conj(h_{c,i}) h_{c,j}|.
double upsilon_idt(const SensorProfileSet& profiles, const LevelPartition& partition);

struct ReportOptions {
    std::optional<LevelPartition> partition;   // enables the Upsilon entries
    std::optional<double> log_factor;          // default log(N)^2
    std::optional<double> mu_override;         // user-supplied coherence
    std::optional<CMatrix> isometry;           // piecewise-constant V, for mu(V)
    Index m_for_gaussian_proxy = 0;            // m used in the gaussian proxy
};

/// Assembles a BoundReport. `dists` holds one law per sensor (or a single one).
BoundReport make_bound_report(const SensorProfileSet& profiles, const std::vector<RowDistribution>& dists,
                              const ReportOptions& options = {});

/// s * mu * max_c ||H_c||_{1->1}^2 * L. Throws ConfigError when mu is missing.
ScalingQuantity condition_thm1(const BoundReport& report, double s, std::optional<double> log_factor = std::nullopt);

/// delta^{-2} Xi_dist^2 (s log(2N/s) + log(2/eps)), for 0 < delta, eps < 1.
ScalingQuantity condition_thm2(const BoundReport& report, double s, double delta, double epsilon, Index n);

/// lambda * s * mu * Upsilon_dist * L.
ScalingQuantity condition_cor1(const BoundReport& report, double s, double lambda,
                               std::optional<double> log_factor = std::nullopt);

/// lambda * s * mu * Upsilon_idt * L.
ScalingQuantity condition_cor2(const BoundReport& report, double s, double lambda,
                               std::optional<double> log_factor = std::nullopt);

struct CoherenceCheck {
    std::vector<double> empirical;  // per sensor: max over draws of ||a_c||_inf^2
    std::vector<double> bound;      // per sensor: mu(G_c) ||H_c||_{1->1}^2
    long draws = 0;                 // per sensor
    long violations = 0;            // draws exceeding the bound (relative slack 1e-12)
};

/// Samples a_c = H_c^* a~_c and records the largest ||a_c||_inf^2 against
/// mu(G_c) ||H_c||_{1->1}^2. Requires a bounded law.
CoherenceCheck coherence_bound_check(const SensorProfileSet& profiles, const RowDistribution& dist, long trials,
                                     std::uint64_t seed);

/// Operator recipe for the empirical probes: a fresh draw per trial.
struct OperatorRecipe {
    SensorProfileSet profiles;
    RowDistribution dist;
    Index m = 0;
};

struct ConcentrationPoint {
    double t = 0.0;
    double empirical_tail = 0.0;  // fraction of trials with | ||Ax||^2 - ||x||^2 | >= t ||x||^2
    double bound = 0.0;           // 2 exp(-zeta t^2 m)
};

struct ConcentrationResult {
    double zeta = 0.0;
    long trials = 0;
    Index m = 0;
    std::vector<ConcentrationPoint> points;
};

/// Monte-Carlo tail of the concentration inequality for distinct sampling with
/// real subgaussian rows and real profiles; all t values share the draws.
ConcentrationResult empirical_concentration(const OperatorRecipe& recipe, const CVector& x,
                                            const std::vector<double>& ts, long trials, std::uint64_t seed,
                                            unsigned threads = 1);

/// Exact restricted isometry constant of a fixed matrix: max over size-s
/// supports S of the extreme eigenvalue deviation of A_S^* A_S from I.
/// Supports are enumerated lexicographically; N <= 24.
double restricted_isometry_constant(const CMatrix& a, Index s);

struct RicEstimate {
    double mean = 0.0;
    double max = 0.0;
    std::vector<double> per_trial;
};

RicEstimate empirical_ric(const OperatorRecipe& recipe, Index s, long trials, std::uint64_t seed,
                          unsigned threads = 1);

} // namespace pcs
