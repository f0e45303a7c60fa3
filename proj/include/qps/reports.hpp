#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "qps/infotools.hpp"
#include "qps/lasserre.hpp"
#include "qps/meanfield.hpp"
#include "qps/measurement.hpp"

namespace qps {

using ordered_json = nlohmann::ordered_json;

const char* version_string(); // e.g. "qpslab 0.1.0"

ordered_json policy_to_json(const NumericPolicy& p);
ordered_json instance_meta(const HamiltonianInstance& h);

// wraps a payload with the reproducibility envelope: version, seed, policy,
// and (when present) the instance hash
ordered_json report_envelope(const ordered_json& payload, std::uint64_t seed,
                             const std::string& instance_hash = "");

ordered_json to_json(const BasicBoundReport& r);
ordered_json to_json(const ClusteredBoundReport& r);
ordered_json to_json(const WeightedBoundReport& r);
ordered_json to_json(const IdentityReport& r);
ordered_json to_json(const SelfDecouplingReport& r);
ordered_json to_json(const BlockDecouplingReport& r);
ordered_json to_json(const ConditionedStateReport& r);
ordered_json to_json(const DeFinettiReport& r);
ordered_json to_json(const SymmetricDeFinettiReport& r);
ordered_json to_json(const DistortionReport& r);
ordered_json to_json(const SandwichReport& r);
ordered_json to_json(const RoundingReport& r, bool include_runs = false);
ordered_json to_json(const ThresholdRankReport& r);
ordered_json to_json(const SweepResult& r);

} // namespace qps
