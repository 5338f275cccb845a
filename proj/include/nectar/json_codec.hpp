#pragma once

#include <json.hpp>

#include "nectar/capture.hpp"
#include "nectar/connection.hpp"

namespace nectar {

// JSON encodings used on the wire and in the spool/store. Bytes travel as
// lowercase hex strings; timestamps as the canonical text form.
//
// Decoders throw CodecError on missing or ill-typed fields.

struct CodecError : std::runtime_error {
    explicit CodecError(const std::string &msg) : std::runtime_error(msg) {}
};

nlohmann::json record_to_json(const ConnectionRecord &rec);
ConnectionRecord record_from_json(const nlohmann::json &j);

nlohmann::json intent_to_json(const DownloadIntent &intent);
DownloadIntent intent_from_json(const nlohmann::json &j);

nlohmann::json capture_to_json(const BinaryCapture &cap);
BinaryCapture capture_from_json(const nlohmann::json &j);

nlohmann::json report_to_json(const SensorReport &report);
SensorReport report_from_json(const nlohmann::json &j);

} // namespace nectar
