#pragma once

// JSON wire formats: matrices as row-major [re, im] pair arrays, schedules
// and intensity profiles as tagged objects, chains as plain arrays of times,
// propagator estimates with their method metadata.

#include <string>

#include <json.hpp>

#include "chronon/dilation.hpp"
#include "chronon/guichardet.hpp"
#include "chronon/object_space.hpp"

namespace chronon {

/// Error with the JSON path of the offending field, e.g.
/// "schedule.h0.data[3]: expected [re, im] pair".
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json intensity_to_json(const IntensityProfile& p);
IntensityProfile intensity_from_json(const nlohmann::json& j, const std::string& path);

HamiltonianSchedule schedule_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json chain_to_json(const Chain& c);
Chain chain_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json estimate_to_json(const PropagatorEstimate& e);
PropagatorEstimate estimate_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace chronon
