#pragma once

// Shared JSON (de)serialization of the model file, used by the model
// round-trip functions and by the train/eval commands, which append
// encoder and split sections to the same object.

#include <json.hpp>

#include "mfh/hebbnet.hpp"

namespace mfh::detail {

nlohmann::json model_to_json(const HebbNetwork& net, const TrainConfig& cfg);
LoadedModel model_from_json(const nlohmann::json& j);

} // namespace mfh::detail
