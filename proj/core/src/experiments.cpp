#include "pcs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "pcs/bounds.hpp"
#include "pcs/parallel.hpp"

namespace pcs {

namespace {
constexpr std::uint64_t kSignalTag = 0x516;
constexpr std::uint64_t kOperatorTag = 0x0B5;
constexpr std::uint64_t kProfileTag = 0x9F0;
constexpr std::uint64_t kVectorTag = 0x7EC;
constexpr std::uint64_t kConcentrationTag = 0xC0C;
constexpr std::uint64_t kNoiseTag = 0x401;

template <class T>
std::vector<T> scalar_or_list(const json& j) {
    if (j.is_array()) return j.get<std::vector<T>>();
    return {j.get<T>()};
}

std::vector<double> default_fractions(Index resolution) {
    std::vector<double> out;
    for (Index k = 1; k <= resolution; ++k) out.push_back(static_cast<double>(k) / static_cast<double>(resolution));
    return out;
}

} // namespace

std::string_view to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::phase: return "phase";
    case ExperimentKind::bounds_sweep: return "bounds_sweep";
    case ExperimentKind::concentration: return "concentration";
    case ExperimentKind::solve: return "solve";
    case ExperimentKind::profile_check: return "profile-check";
    }
    return "phase";
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
    if (name == "phase") return ExperimentKind::phase;
    if (name == "bounds_sweep" || name == "bounds") return ExperimentKind::bounds_sweep;
    if (name == "concentration") return ExperimentKind::concentration;
    if (name == "solve") return ExperimentKind::solve;
    if (name == "profile-check" || name == "profile_check") return ExperimentKind::profile_check;
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    ExperimentConfig c;
    try {
        c.source = j;
        if (j.contains("experiment")) c.experiment = experiment_kind_from_string(j.at("experiment").get<std::string>());
        c.n = j.value("N", c.n);
        if (j.contains("C")) c.sensors = scalar_or_list<Index>(j.at("C"));
        if (j.contains("scenario")) {
            c.scenarios.clear();
            for (const auto& s : scalar_or_list<std::string>(j.at("scenario")))
                c.scenarios.push_back(scenario_from_string(s));
        }
        if (j.contains("profile")) c.profile = j.at("profile");
        if (j.contains("levels")) {
            const auto& lv = j.at("levels");
            if (lv.is_string()) {
                if (lv.get<std::string>() != "C") throw ConfigError("levels must be \"C\" or an integer");
                c.levels.follow_sensors = true;
            } else {
                c.levels.follow_sensors = false;
                c.levels.fixed = lv.get<Index>();
            }
        }
        if (j.contains("law")) c.law = row_law_from_string(j.at("law").get<std::string>());
        if (j.contains("value_law")) c.value_law = value_law_from_string(j.at("value_law").get<std::string>());
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            c.resolution = g.value("resolution", c.resolution);
            if (g.contains("m_over_N")) c.m_fractions = g.at("m_over_N").get<std::vector<double>>();
            if (g.contains("s_over_m")) c.s_fractions = g.at("s_over_m").get<std::vector<double>>();
            if (g.contains("m_axis")) {
                const auto axis = g.at("m_axis").get<std::string>();
                if (axis != "total" && axis != "per_sensor") throw ConfigError("m_axis must be total or per_sensor");
                c.per_sensor_axis = axis == "per_sensor";
            }
        }
        c.trials = j.value("trials", c.trials);
        c.threshold = j.value("threshold", c.threshold);
        if (j.contains("bp")) {
            const auto& b = j.at("bp");
            c.bp.max_iterations = b.value("max_iterations", c.bp.max_iterations);
            c.bp.tol_rel = b.value("tol_rel", c.bp.tol_rel);
            c.bp.tol_feas = b.value("tol_feas", c.bp.tol_feas);
            c.bp.relaxation = b.value("relaxation", c.bp.relaxation);
        }
        if (j.contains("m_values")) c.m_values = j.at("m_values").get<std::vector<Index>>();
        if (j.contains("t_values")) c.t_values = j.at("t_values").get<std::vector<double>>();
        c.include_upsilon_dist = j.value("include_upsilon_dist", false);
        c.seed = j.value("seed", c.seed);
        c.output = j.value("output", c.output);
        c.threads = j.value("threads", c.threads);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("configuration: ") + e.what());
    }

    if (c.n < 1) throw ConfigError("N must be at least 1");
    if (c.sensors.empty()) throw ConfigError("C list must be nonempty");
    for (Index s : c.sensors)
        if (s < 1) throw ConfigError("every C must be at least 1");
    if (c.scenarios.empty()) throw ConfigError("scenario list must be nonempty");
    if (c.trials < 1) throw ConfigError("trials must be at least 1");
    if (!(c.threshold > 0.0)) throw ConfigError("threshold must be positive");
    if (c.resolution < 1) throw ConfigError("grid resolution must be at least 1");
    if (!c.levels.follow_sensors && c.levels.fixed < 1) throw ConfigError("levels must be at least 1");
    if (c.m_fractions.empty()) c.m_fractions = default_fractions(c.resolution);
    if (c.s_fractions.empty()) c.s_fractions = default_fractions(c.resolution);
    for (double f : c.m_fractions)
        if (!(f > 0.0)) throw ConfigError("m/N fractions must be positive");
    for (double f : c.s_fractions)
        if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("s/m fractions must lie in [0, 1]");
    std::sort(c.s_fractions.begin(), c.s_fractions.end());
    if (!c.profile.is_object() || !c.profile.contains("family")) throw ConfigError("profile block needs a 'family'");
    return c;
}

std::string config_hash(const ExperimentConfig& config) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(config.source.dump());
    return os.str();
}

bool success_criterion(const CVector& x_hat, const CVector& x, double threshold) {
    if (!(threshold > 0.0)) throw ConfigError("success_criterion: threshold must be positive");
    if (x_hat.size() != x.size()) throw DimensionError("success_criterion: length mismatch");
    const double xnorm = x.norm();
    if (xnorm == 0.0) return x_hat.norm() <= threshold;
    return (x_hat - x).norm() <= threshold * xnorm;
}

LevelPartition build_partition(const ExperimentConfig& config, Index sensors) {
    return LevelPartition::equal(config.n, config.levels.resolve(sensors));
}

SensorProfileSet build_profiles(const ExperimentConfig& config, Index sensors, Scenario scenario) {
    ProfileFamilySpec spec = family_from_json(config.profile, sensors);
    if (spec.family == ProfileFamily::circulant_unit_modulus && !config.profile.contains("seed"))
        spec.seed = derive_seed(config.seed, {kProfileTag, static_cast<std::uint64_t>(sensors)});
    std::optional<LevelPartition> partition;
    if (spec.family == ProfileFamily::banded) partition = build_partition(config, sensors);
    return make_profiles(spec, sensors, config.n, scenario, partition);
}

std::vector<Index> phase_m_values(const ExperimentConfig& config) {
    Index step = 1;
    if (!config.per_sensor_axis)
        for (Index c : config.sensors) step = std::lcm(step, c);
    std::vector<Index> out;
    for (double f : config.m_fractions) {
        const auto target = static_cast<Index>(std::llround(f * static_cast<double>(config.n)));
        const Index m = std::max(step, target / step * step);
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    std::sort(out.begin(), out.end());
    return out;
}

PhaseGrid run_phase_transition(const ExperimentConfig& config, Index sensors, Scenario scenario) {
    PhaseGrid grid;
    grid.n = config.n;
    grid.sensors = sensors;
    grid.scenario = scenario;
    grid.m_values = phase_m_values(config);
    grid.m_scale = config.per_sensor_axis ? sensors : 1;
    grid.trials = config.trials;
    grid.config_hash = config_hash(config);
    grid.seed = config.seed;
    for (Index m : grid.m_values) {
        if (m * grid.m_scale % sensors != 0) throw ConfigError("phase: m = " + std::to_string(m) + " not divisible by C");
        std::vector<Index> col;
        for (double f : config.s_fractions) {
            const auto s = static_cast<Index>(std::llround(f * static_cast<double>(m)));
            if (s > config.n) throw ConfigError("phase: s = " + std::to_string(s) + " exceeds N");
            col.push_back(s);
        }
        grid.s_values.push_back(std::move(col));
    }

    const SensorProfileSet profiles = build_profiles(config, sensors, scenario);
    const RowDistribution dist{config.law, config.n};
    BpConfig bp = config.bp;
    bp.eta = 0.0;

    const std::size_t cols = grid.m_values.size();
    const std::size_t rows = config.s_fractions.size();
    const auto trials = static_cast<std::size_t>(config.trials);
    std::vector<char> hit(cols * rows * trials, 0);
    parallel_for(hit.size(), config.threads, [&](std::size_t k) {
        const std::size_t trial = k % trials;
        const std::size_t row = (k / trials) % rows;
        const std::size_t col = k / (trials * rows);
        const Index m = grid.m_values[col];
        const Index s = grid.s_values[col][row];
        const auto um = static_cast<std::uint64_t>(m);
        const auto us = static_cast<std::uint64_t>(s);
        if (s == 0) {
            hit[k] = 1;
            return;
        }
        const SparseSignal signal = draw_sparse(config.n, s, derive_seed(config.seed, {kSignalTag, um, us, trial}),
                                                config.value_law);
        const auto op = assemble(profiles, dist, m * grid.m_scale,
                                 derive_seed(config.seed, {kOperatorTag, static_cast<std::uint64_t>(sensors),
                                                           static_cast<std::uint64_t>(scenario), um, us, trial}));
        const BpResult result = solve_bp(op, op.apply(signal.x), bp);
        hit[k] = success_criterion(result.x, signal.x, config.threshold) ? 1 : 0;
    });

    grid.successes.assign(cols, std::vector<long>(rows, 0));
    for (std::size_t k = 0; k < hit.size(); ++k)
        grid.successes[k / (trials * rows)][(k / trials) % rows] += hit[k];
    return grid;
}

std::vector<PhaseGrid> run_phase_experiment(const ExperimentConfig& config) {
    std::vector<PhaseGrid> out;
    for (Scenario scenario : config.scenarios)
        for (Index c : config.sensors) out.push_back(run_phase_transition(config, c, scenario));
    return out;
}

std::vector<double> isotonic_nonincreasing(const std::vector<double>& values, const std::vector<double>& weights) {
    if (values.size() != weights.size()) throw DimensionError("isotonic: weights and values differ in length");
    struct Block {
        double mean;
        double weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < values.size(); ++i) {
        blocks.push_back({values[i], weights[i], 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean < blocks.back().mean) {
            const Block last = blocks.back();
            blocks.pop_back();
            Block& prev = blocks.back();
            const double w = prev.weight + last.weight;
            prev.mean = w > 0.0 ? (prev.mean * prev.weight + last.mean * last.weight) / w
                                : 0.5 * (prev.mean + last.mean);
            prev.weight = w;
            prev.count += last.count;
        }
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean);
    return out;
}

std::vector<CurvePoint> extract_half_curve(const PhaseGrid& grid) {
    std::vector<CurvePoint> curve;
    for (std::size_t col = 0; col < grid.m_values.size(); ++col) {
        const double m = static_cast<double>(grid.m_values[col]);
        const auto& s = grid.s_values[col];
        std::vector<double> p(s.size());
        for (std::size_t r = 0; r < s.size(); ++r) p[r] = grid.probability(col, r);
        const auto smooth = isotonic_nonincreasing(p, std::vector<double>(p.size(), 1.0));

        // Anchor: the zero signal is always recovered.
        std::vector<double> xs{0.0};
        std::vector<double> ps{1.0};
        for (std::size_t r = 0; r < s.size(); ++r) {
            xs.push_back(static_cast<double>(s[r]) / m);
            ps.push_back(smooth[r]);
        }
        CurvePoint point{m / static_cast<double>(grid.n), xs.back(), true};
        for (std::size_t k = 1; k < xs.size(); ++k) {
            if (ps[k] < 0.5) {
                const double frac = (ps[k - 1] - 0.5) / (ps[k - 1] - ps[k]);
                point.s_over_m = xs[k - 1] + frac * (xs[k] - xs[k - 1]);
                point.open_ended = false;
                break;
            }
        }
        curve.push_back(point);
    }
    return curve;
}

double dominance_fraction(const std::vector<CurvePoint>& upper, const std::vector<CurvePoint>& lower) {
    if (upper.size() != lower.size() || upper.empty()) throw DimensionError("dominance: curves differ in length");
    std::size_t hits = 0;
    for (std::size_t k = 0; k < upper.size(); ++k)
        if (upper[k].s_over_m >= lower[k].s_over_m - 1e-12) ++hits;
    return static_cast<double>(hits) / static_cast<double>(upper.size());
}

std::vector<SweepRow> run_bounds_sweep(const ExperimentConfig& config) {
    std::vector<SweepRow> rows;
    const Scenario scenario = config.scenarios.front();
    for (Index c : config.sensors) {
        const auto profiles = build_profiles(config, c, scenario);
        if (profiles.kind() != ProfileKind::diagonal) throw ConfigError("bounds sweep: diagonal profile family required");
        const auto partition = build_partition(config, c);
        const Index d = partition.levels();
        if (scenario == Scenario::identical) {
            rows.push_back({c, d, "Upsilon_idt", upsilon_idt(profiles, partition)});
            if (config.include_upsilon_dist)
                rows.push_back({c, d, "Upsilon_dist",
                                upsilon_dist(build_profiles(config, c, Scenario::distinct), partition)});
        } else {
            rows.push_back({c, d, "Upsilon_dist", upsilon_dist(profiles, partition)});
        }
        double xi = 0.0, n1 = 0.0;
        for (const auto& nrm : profile_norms(profiles)) {
            xi = std::max(xi, nrm.norm_2to2 * nrm.norm_2to2);
            n1 = std::max(n1, nrm.norm_1to1 * nrm.norm_1to1);
        }
        rows.push_back({c, d, "Xi_dist", xi});
        rows.push_back({c, d, "norm1_max", n1});
    }
    return rows;
}

std::vector<ConcentrationRow> run_concentration(const ExperimentConfig& config) {
    if (config.m_values.empty()) throw ConfigError("concentration: m_values required");
    if (config.t_values.empty()) throw ConfigError("concentration: t_values required");
    const Index c = config.sensors.front();
    const auto profiles = build_profiles(config, c, Scenario::distinct);

    Rng rng = substream(config.seed, {kVectorTag});
    std::normal_distribution<double> normal;
    CVector x(config.n);
    for (Index i = 0; i < config.n; ++i) x(i) = normal(rng);
    x.normalize();

    std::vector<ConcentrationRow> rows;
    for (Index m : config.m_values) {
        const OperatorRecipe recipe{profiles, RowDistribution{config.law, config.n}, m};
        const auto result = empirical_concentration(
            recipe, x, config.t_values, config.trials,
            derive_seed(config.seed, {kConcentrationTag, static_cast<std::uint64_t>(m)}), config.threads);
        for (const auto& p : result.points) rows.push_back({p.t, m, p.empirical_tail, p.bound, result.zeta});
    }
    return rows;
}

// ---------------------------------------------------------------------------

namespace {

std::ostream& precise(std::ostream& os) {
    os << std::setprecision(12);
    return os;
}

} // namespace

void write_phase_csv(std::ostream& os, const std::vector<PhaseGrid>& grids) {
    precise(os) << "C,scenario,m,m_over_N,s,s_over_m,successes,trials,probability\n";
    for (const auto& g : grids)
        for (std::size_t col = 0; col < g.m_values.size(); ++col)
            for (std::size_t row = 0; row < g.s_values[col].size(); ++row) {
                const double m = static_cast<double>(g.m_values[col]);
                os << g.sensors << ',' << to_string(g.scenario) << ',' << g.m_values[col] << ','
                   << m / static_cast<double>(g.n) << ',' << g.s_values[col][row] << ','
                   << static_cast<double>(g.s_values[col][row]) / m << ',' << g.successes[col][row] << ','
                   << g.trials << ',' << g.probability(col, row) << '\n';
            }
}

void write_curves_csv(std::ostream& os, const std::vector<PhaseGrid>& grids) {
    precise(os) << "x,y,series\n";
    for (const auto& g : grids) {
        const std::string series = std::string(to_string(g.scenario)) + " C=" + std::to_string(g.sensors);
        for (const auto& p : extract_half_curve(g)) os << p.m_over_n << ',' << p.s_over_m << ",\"" << series << "\"\n";
    }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    precise(os) << "C,D,quantity,value\n";
    for (const auto& r : rows) os << r.sensors << ',' << r.levels << ',' << r.quantity << ',' << r.value << '\n';
}

void write_sweep_plot_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    precise(os) << "x,y,series\n";
    for (const auto& r : rows) os << r.sensors << ',' << r.value << ',' << r.quantity << '\n';
}

void write_concentration_csv(std::ostream& os, const std::vector<ConcentrationRow>& rows) {
    precise(os) << "t,m,empirical_tail,bound,zeta\n";
    for (const auto& r : rows)
        os << r.t << ',' << r.m << ',' << r.empirical_tail << ',' << r.bound << ',' << r.zeta << '\n';
}

void write_concentration_plot_csv(std::ostream& os, const std::vector<ConcentrationRow>& rows) {
    precise(os) << "x,y,series\n";
    for (const auto& r : rows) {
        os << r.t << ',' << r.empirical_tail << ",\"empirical m=" << r.m << "\"\n";
        os << r.t << ',' << r.bound << ",\"bound m=" << r.m << "\"\n";
    }
}

json metadata_json(const ExperimentConfig& config) {
    return {{"experiment", to_string(config.experiment)},
            {"config", config.source},
            {"config_hash", config_hash(config)},
            {"seed", config.seed},
            {"success_criterion", {{"rule", "||x_hat - x||_2 <= threshold * ||x||_2"}, {"threshold", config.threshold}}},
            {"bp", {{"eta", 0.0},
                    {"max_iterations", config.bp.max_iterations},
                    {"tol_rel", config.bp.tol_rel},
                    {"tol_feas", config.bp.tol_feas}}},
            {"log_factor", "log(N)^2 unless supplied"},
            {"note", "measurement-condition values are scaling quantities without their absolute constants"}};
}

// ---------------------------------------------------------------------------

json run_solve(const json& request, std::optional<std::uint64_t> seed_override) {
    if (!request.is_object()) throw ConfigError("solve request must be a JSON object");
    json doc = request;
    if (seed_override) doc["seed"] = *seed_override;
    if (!doc.contains("profile")) doc["profile"] = json{{"family", "oscillatory"}};
    const ExperimentConfig config = config_from_json(doc);
    const std::uint64_t seed = config.seed;

    std::optional<MeasurementOperator> op;
    std::string profile_ref;
    if (doc.contains("matrix")) {
        op = MeasurementOperator::from_matrix(matrix_from_json(doc.at("matrix")));
    } else {
        const Index c = config.sensors.front();
        const auto profiles = build_profiles(config, c, config.scenarios.front());
        const Index m = doc.value("m", Index{0});
        op = assemble(profiles, RowDistribution{config.law, config.n}, m, seed);
        const std::string transform = doc.value("transform", std::string("identity"));
        op = sparsify_in_transform(*op, OrthogonalTransform::from_name(transform, config.n));
        profile_ref = config.profile.dump();
    }
    OperatorSpec spec = op->spec();
    if (!profile_ref.empty()) spec.profile_reference = profile_ref;

    const double eta = doc.value("eta", 0.0);
    std::optional<CVector> truth;
    CVector y;
    if (doc.contains("y")) {
        y = vector_from_json(doc.at("y"));
    } else {
        if (doc.contains("x")) {
            truth = vector_from_json(doc.at("x"));
        } else if (doc.contains("signal")) {
            const auto& sig = doc.at("signal");
            const Index s = sig.value("sparsity", Index{1});
            truth = draw_sparse(op->cols(), s, derive_seed(seed, {kSignalTag}), config.value_law).x;
        } else {
            throw ConfigError("solve: one of 'y', 'x' or 'signal' is required");
        }
        if (truth->size() != op->cols()) throw DimensionError("solve: x length differs from N");
        y = op->apply(*truth);
        const double noise = doc.value("noise_norm", 0.0);
        if (noise > 0.0) {
            Rng rng = substream(seed, {kNoiseTag});
            std::normal_distribution<double> normal;
            CVector e(y.size());
            for (Index i = 0; i < e.size(); ++i) e(i) = Complex(normal(rng), normal(rng));
            y += e * (noise / e.norm());
        }
    }

    BpConfig bp = config.bp;
    bp.eta = eta;
    const BpResult result = solve_bp(*op, y, bp);
    json out = {{"operator", operator_spec_to_json(spec)}, {"eta", eta}, {"result", result_to_json(result)}};
    if (truth) {
        const Index s = static_cast<Index>(support_of(*truth).size());
        const auto err = recovery_error(result.x, *truth, s, eta);
        out["truth"] = vector_to_json(*truth);
        out["recovery"] = {{"l2_error", err.l2_error},
                           {"relative_error", truth->norm() > 0 ? err.l2_error / truth->norm() : err.l2_error},
                           {"bound_rhs", err.bound_rhs},
                           {"success", success_criterion(result.x, *truth, config.threshold)}};
    }
    return out;
}

json run_profile_check(const ExperimentConfig& config) {
    json entries = json::array();
    for (Scenario scenario : config.scenarios)
        for (Index c : config.sensors) {
            const auto profiles = build_profiles(config, c, scenario);
            json norms = json::array();
            for (const auto& nrm : profile_norms(profiles))
                norms.push_back({{"norm_1to1", nrm.norm_1to1}, {"norm_2to2", nrm.norm_2to2}});
            ReportOptions options;
            if (profiles.kind() == ProfileKind::diagonal) options.partition = build_partition(config, c);
            const auto spec = family_from_json(config.profile, c);
            if (spec.family == ProfileFamily::piecewise_constant) options.isometry = spec.isometry;
            const auto report = make_bound_report(profiles, {RowDistribution{config.law, config.n}}, options);
            entries.push_back({{"C", c},
                               {"scenario", to_string(scenario)},
                               {"joint_isometry_residual", verify_joint_isometry(profiles)},
                               {"norms", std::move(norms)},
                               {"report", report_to_json(report)},
                               {"profiles", profiles_to_json(profiles)}});
        }
    return {{"N", config.n}, {"family", config.profile}, {"entries", std::move(entries)}};
}

} // namespace pcs
