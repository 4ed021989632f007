#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pcs/io.hpp"
#include "pcs/profiles.hpp"
#include "pcs/sampling.hpp"
#include "pcs/solver.hpp"

namespace pcs {

enum class ExperimentKind { phase, bounds_sweep, concentration, solve, profile_check };

std::string_view to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(std::string_view name);

/// Level count rule for level-based profiles and the Upsilon quantities.
struct LevelRule {
    bool follow_sensors = true;  // D = C
    Index fixed = 1;             // used when follow_sensors is false

    Index resolve(Index sensors) const { return follow_sensors ? sensors : fixed; }
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::phase;
    Index n = 64;
    std::vector<Index> sensors{1};
    std::vector<Scenario> scenarios{Scenario::distinct};
    json profile = json{{"family", "banded"}};  // family block, see family_from_json
    LevelRule levels;
    RowLaw law = RowLaw::gaussian;
    ValueLaw value_law = ValueLaw::unit_complex_phase;

    // phase grid: m/N on one axis, s/m on the other
    Index resolution = 16;
    std::vector<double> m_fractions;  // empty: k / resolution, k = 1..resolution
    std::vector<double> s_fractions;  // empty: k / resolution, k = 1..resolution
    bool per_sensor_axis = false;     // m counts rows per sensor; total is C * m
    long trials = 50;
    double threshold = 1e-3;
    BpConfig bp;

    // concentration
    std::vector<Index> m_values;
    std::vector<double> t_values;

    // bounds sweep
    bool include_upsilon_dist = false;

    std::uint64_t seed = 1;
    std::string output = "out";
    unsigned threads = 0;

    json source;  // the parsed document, for metadata
};

/// Parses and validates a configuration document; throws ConfigError.
ExperimentConfig config_from_json(const json& j);

/// Stable fingerprint of the configuration (FNV-1a over the canonical dump).
std::string config_hash(const ExperimentConfig& config);

/// ||x_hat - x|| <= threshold ||x||; for x = 0, ||x_hat|| <= threshold.
bool success_criterion(const CVector& x_hat, const CVector& x, double threshold);

struct PhaseGrid {
    Index n = 0;
    Index sensors = 1;
    Scenario scenario = Scenario::distinct;
    std::vector<Index> m_values;                  // columns
    Index m_scale = 1;                            // total measurements = m_scale * m
    std::vector<std::vector<Index>> s_values;     // [column][row], nondecreasing in row
    std::vector<std::vector<long>> successes;     // [column][row]
    long trials = 0;                              // per cell
    std::string config_hash;
    std::uint64_t seed = 0;

    double probability(std::size_t col, std::size_t row) const {
        return static_cast<double>(successes[col][row]) / static_cast<double>(trials);
    }
};

/// m values of the grid: round(f * N) down to a multiple of every C, deduplicated.
/// With a per-sensor axis the values are round(f * N), at least 1.
std::vector<Index> phase_m_values(const ExperimentConfig& config);

/// One phase-transition grid for a given sensor count and scenario: every cell
/// draws fresh (A, x) pairs, solves equality-constrained BP and counts
/// successes. Signals depend only on (cell, trial), so grids for different C
/// or scenarios share their test signals.
PhaseGrid run_phase_transition(const ExperimentConfig& config, Index sensors, Scenario scenario);

/// All grids of a configuration, ordered by scenario then C.
std::vector<PhaseGrid> run_phase_experiment(const ExperimentConfig& config);

struct CurvePoint {
    double m_over_n = 0.0;
    double s_over_m = 0.0;
    bool open_ended = false;  // the column never drops below 0.5
};

/// Weighted pool-adjacent-violators fit of a nonincreasing sequence.
std::vector<double> isotonic_nonincreasing(const std::vector<double>& values, const std::vector<double>& weights);

/// Per column: isotonic smoothing of the success profile over s/m (with
/// s = 0 anchored at probability 1), then linear interpolation to the 0.5
/// crossing. Columns that never drop below 0.5 sit at their top s/m.
std::vector<CurvePoint> extract_half_curve(const PhaseGrid& grid);

/// Fraction of columns where `upper` is at or above `lower`.
double dominance_fraction(const std::vector<CurvePoint>& upper, const std::vector<CurvePoint>& lower);

struct SweepRow {
    Index sensors = 0;
    Index levels = 0;
    std::string quantity;
    double value = 0.0;
};

/// Upsilon_idt (identical) or Upsilon_dist (distinct) per C, plus Xi_dist and
/// norm1_max, for a diagonal profile family.
std::vector<SweepRow> run_bounds_sweep(const ExperimentConfig& config);

struct ConcentrationRow {
    double t = 0.0;
    Index m = 0;
    double empirical_tail = 0.0;
    double bound = 0.0;
    double zeta = 0.0;
};

/// Empirical concentration over the (t, m) grid for the first C in the config
/// and a fixed random real unit vector x.
std::vector<ConcentrationRow> run_concentration(const ExperimentConfig& config);

/// Builds the profile set of a configuration for a sensor count and scenario.
SensorProfileSet build_profiles(const ExperimentConfig& config, Index sensors, Scenario scenario);
LevelPartition build_partition(const ExperimentConfig& config, Index sensors);

/// Output writers. Every experiment emits its CSV, a long-format plot CSV
/// (x, y, series) and a JSON metadata sidecar.
void write_phase_csv(std::ostream& os, const std::vector<PhaseGrid>& grids);
void write_curves_csv(std::ostream& os, const std::vector<PhaseGrid>& grids);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_sweep_plot_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_concentration_csv(std::ostream& os, const std::vector<ConcentrationRow>& rows);
void write_concentration_plot_csv(std::ostream& os, const std::vector<ConcentrationRow>& rows);
json metadata_json(const ExperimentConfig& config);

/// Solve request: builds (or reads) the operator and data and returns the
/// result document.
json run_solve(const json& request, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Profile diagnostics per (C, scenario): joint-isometry residual, norms,
/// bound report, and the profiles themselves.
json run_profile_check(const ExperimentConfig& config);

} // namespace pcs
