#pragma once

#include <nlohmann/json.hpp>

#include "pcs/bounds.hpp"
#include "pcs/profiles.hpp"
#include "pcs/sampling.hpp"
#include "pcs/signals.hpp"
#include "pcs/solver.hpp"

namespace pcs {

using json = nlohmann::json;

/// Complex vectors are arrays of [re, im] pairs.
json vector_to_json(const CVector& v);
CVector vector_from_json(const json& j);

/// Complex matrices are arrays of rows, each an array of [re, im] pairs.
json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

/// {kind, scenario, C, N, vectors}.
json profiles_to_json(const SensorProfileSet& profiles);
/// Validates C and N against the vectors. Does not renormalize.
SensorProfileSet profiles_from_json(const json& j);

/// Partitions are arrays of index arrays (0-based).
json partition_to_json(const LevelPartition& partition);
LevelPartition partition_from_json(const json& j, Index n);

json signal_to_json(const SparseSignal& signal);

/// {scenario, law, m, C, N, seed, profile, transform}; `law` is a string when
/// all sensors share it, otherwise an array.
json operator_spec_to_json(const OperatorSpec& spec);
OperatorSpec operator_spec_from_json(const json& j);

json report_to_json(const BoundReport& report);
json result_to_json(const BpResult& result);

/// Parses a profile family block:
///   {"family": "banded", "band": [r1, r2], "window": "raised_cosine"}
///   {"family": "piecewise_constant", "isometry": "identity" | "dft" | [[...]], "levels": D}
///   {"family": "oscillatory"}
///   {"family": "circulant_unit_modulus", "conjugate_symmetric": false, "seed": 7}
///   {"family": "custom", "kind": "diagonal", "vectors": [...]}
/// `sensors` resolves named isometries.
ProfileFamilySpec family_from_json(const json& j, Index sensors);

} // namespace pcs
