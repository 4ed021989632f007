#include "pcs/io.hpp"

namespace pcs {

namespace {

template <class T>
T require(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

Complex complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) throw ConfigError("complex values must be [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

json vector_to_json(const CVector& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
    return out;
}

CVector vector_from_json(const json& j) {
    if (!j.is_array()) throw ConfigError("complex vector must be an array");
    CVector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i]);
    return v;
}

json matrix_to_json(const CMatrix& m) {
    json out = json::array();
    for (Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
    return out;
}

CMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a nonempty array of rows");
    const auto cols = static_cast<Index>(j[0].size());
    CMatrix m(static_cast<Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const CVector row = vector_from_json(j[r]);
        if (row.size() != cols) throw ConfigError("matrix rows differ in length");
        m.row(static_cast<Index>(r)) = row.transpose();
    }
    return m;
}

json profiles_to_json(const SensorProfileSet& profiles) {
    json vectors = json::array();
    for (const auto& v : profiles.vectors()) vectors.push_back(vector_to_json(v));
    return {{"kind", to_string(profiles.kind())},
            {"scenario", to_string(profiles.scenario())},
            {"C", profiles.sensors()},
            {"N", profiles.dimension()},
            {"vectors", std::move(vectors)}};
}

SensorProfileSet profiles_from_json(const json& j) {
    const auto kind = profile_kind_from_string(require<std::string>(j, "kind"));
    const auto scenario = scenario_from_string(require<std::string>(j, "scenario"));
    const auto c = require<Index>(j, "C");
    const auto n = require<Index>(j, "N");
    std::vector<CVector> vectors;
    for (const auto& v : require<json>(j, "vectors")) vectors.push_back(vector_from_json(v));
    if (static_cast<Index>(vectors.size()) != c) throw ConfigError("profiles: C does not match the vector count");
    for (const auto& v : vectors)
        if (v.size() != n) throw DimensionError("profiles: vector length does not match N");
    return SensorProfileSet(kind, scenario, std::move(vectors));
}

json partition_to_json(const LevelPartition& partition) {
    return partition.all();
}

LevelPartition partition_from_json(const json& j, Index n) {
    try {
        return LevelPartition(n, j.get<std::vector<std::vector<Index>>>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("partition: ") + e.what());
    }
}

json signal_to_json(const SparseSignal& signal) {
    json out = {{"x", vector_to_json(signal.x)}, {"support", signal.support}, {"sparsity", signal.sparsity}};
    if (signal.model == SignalModel::distributed) {
        out["model"] = "distributed";
        out["lambda"] = signal.lambda;
        out["level_counts"] = signal.level_counts;
    } else {
        out["model"] = signal.model == SignalModel::plain ? "plain" : "in_levels";
    }
    return out;
}

json operator_spec_to_json(const OperatorSpec& spec) {
    json law;
    const bool shared = std::all_of(spec.laws.begin(), spec.laws.end(),
                                    [&](RowLaw l) { return l == spec.laws.front(); });
    if (!spec.laws.empty() && shared) {
        law = to_string(spec.laws.front());
    } else {
        law = json::array();
        for (auto l : spec.laws) law.push_back(to_string(l));
    }
    return {{"scenario", to_string(spec.scenario)},
            {"law", std::move(law)},
            {"m", spec.m},
            {"C", spec.sensors},
            {"N", spec.n},
            {"seed", spec.seed},
            {"profile", spec.profile_reference},
            {"transform", spec.transform}};
}

OperatorSpec operator_spec_from_json(const json& j) {
    OperatorSpec spec;
    spec.scenario = scenario_from_string(require<std::string>(j, "scenario"));
    const json& law = require<json>(j, "law");
    if (law.is_string()) {
        spec.laws.push_back(row_law_from_string(law.get<std::string>()));
    } else {
        for (const auto& l : law) spec.laws.push_back(row_law_from_string(l.get<std::string>()));
    }
    spec.m = require<Index>(j, "m");
    spec.sensors = require<Index>(j, "C");
    spec.n = require<Index>(j, "N");
    spec.seed = require<std::uint64_t>(j, "seed");
    spec.profile_reference = j.value("profile", std::string{});
    spec.transform = j.value("transform", std::string("identity"));
    return spec;
}

json report_to_json(const BoundReport& r) {
    auto opt = [](const std::optional<double>& v) -> json { return v ? json(*v) : json(nullptr); };
    return {{"C", r.sensors},
            {"N", r.n},
            {"D", r.levels},
            {"mu_max", opt(r.mu_max)},
            {"mu_source", to_string(r.mu_source)},
            {"norm1_max", r.norm1_max},
            {"Xi_dist", r.xi_dist},
            {"alpha_min", opt(r.alpha_min)},
            {"alpha_max", opt(r.alpha_max)},
            {"zeta", opt(r.zeta)},
            {"Upsilon_dist", opt(r.upsilon_dist)},
            {"Upsilon_idt", opt(r.upsilon_idt)},
            {"mu_V", opt(r.mu_v)},
            {"log_factor", r.log_factor},
            {"log_factor_label", r.log_factor_label},
            {"note", "condition values are scaling quantities; absolute constants are unknown"}};
}

json result_to_json(const BpResult& r) {
    return {{"x_hat", vector_to_json(r.x)},
            {"objective", r.objective},
            {"residual", r.residual},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"infeasible", r.infeasible},
            {"certificate_residual", r.certificate_residual}};
}

ProfileFamilySpec family_from_json(const json& j, Index sensors) {
    ProfileFamilySpec spec;
    spec.family = profile_family_from_string(require<std::string>(j, "family"));
    switch (spec.family) {
    case ProfileFamily::banded:
        if (j.contains("band")) {
            const auto band = require<std::vector<Index>>(j, "band");
            if (band.size() != 2) throw ConfigError("banded: 'band' must be [r1, r2]");
            spec.band_below = band[0];
            spec.band_above = band[1];
        }
        spec.window = band_window_from_string(j.value("window", std::string("raised_cosine")));
        break;
    case ProfileFamily::piecewise_constant: {
        const json iso = j.value("isometry", json("dft"));
        const Index levels = j.value("levels", sensors);
        if (iso.is_string()) {
            const auto name = iso.get<std::string>();
            if (name == "identity") {
                if (levels != sensors) throw ConfigError("piecewise_constant: identity isometry needs D = C");
                spec.isometry = CMatrix::Identity(sensors, sensors);
            } else if (name == "dft") {
                spec.isometry = dft_isometry(sensors, levels);
            } else {
                throw ConfigError("piecewise_constant: unknown isometry '" + name + "'");
            }
        } else {
            spec.isometry = matrix_from_json(iso);
        }
        break;
    }
    case ProfileFamily::oscillatory: break;
    case ProfileFamily::circulant_unit_modulus:
        spec.conjugate_symmetric = j.value("conjugate_symmetric", false);
        spec.seed = j.value("seed", std::uint64_t{0});
        break;
    case ProfileFamily::custom:
        spec.custom_kind = profile_kind_from_string(j.value("kind", std::string("diagonal")));
        for (const auto& v : require<json>(j, "vectors")) spec.custom_vectors.push_back(vector_from_json(v));
        break;
    }
    return spec;
}

} // namespace pcs
