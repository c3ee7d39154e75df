// JSON serialization for fitted surface parameters and solver reports, and
// a binary dump of channel realizations for cross-implementation checks.
#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "rissec/channel.hpp"
#include "rissec/cpdm.hpp"
#include "rissec/pgm.hpp"
#include "rissec/ris_model.hpp"

namespace rissec {

nlohmann::json to_json(const RisParams& p);
RisParams ris_params_from_json(const nlohmann::json& j);

// Report serializations echo the options and seed that produced them so a
// stored report fully identifies its run.
nlohmann::json to_json(const pgm::SolveReport& rep, const pgm::PgmOptions& opts,
                       std::uint64_t seed);
nlohmann::json to_json(const cpdm::CpdmReport& rep, std::uint64_t seed);

// Single-file binary dump: a text header naming each matrix and its shape,
// then row-major interleaved re/im doubles (little-endian host order).
void dump_channels(const ChannelSet& ch, const std::string& path);
ChannelSet load_channels(const std::string& path);

}  // namespace rissec
