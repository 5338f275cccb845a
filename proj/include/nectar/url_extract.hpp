#pragma once

#include <optional>
#include <vector>

#include "nectar/connection.hpp"
#include "nectar/intent.hpp"
#include "nectar/service_profile.hpp"

namespace nectar {

// Scans payload bytes for plaintext URLs of the supported schemes. Returns
// maximal matches in payload order, deduplicated on the target tuple.
// Unparseable fragments are skipped, never fatal.
std::vector<DownloadIntent> extract_urls(std::span<const std::uint8_t> payload,
                                         const std::string &source_record);

// Decodes payload under every single-byte XOR key 1..255 and extracts URLs
// from each decoding. An intent is kept only if its host is a syntactically
// valid dotted-quad or hostname and the scheme token is at the buffer start
// or preceded by a non-alphanumeric byte.
std::vector<DownloadIntent> xor_sweep(std::span<const std::uint8_t> payload,
                                      const std::string &source_record);

// Reads a big-endian IPv4 and port out of the record's inbound bytes at the
// offsets the service profile declares. Nothing if the trace is too short.
std::optional<DownloadIntent> detect_connectback(const ConnectionRecord &record,
                                                 const ConnectbackSlot &slot);

// Guard used by xor_sweep: full hostname/dotted-quad label syntax.
bool is_plausible_host(std::string_view host);

} // namespace nectar
