#pragma once

#include "json.hpp"

#include "proxweb/registry/registry.hpp"

namespace proxweb::registry {

using json = nlohmann::ordered_json;

// Field order: mac, protocol, owner, venue_id, position, mobility,
// wifi_channel, metadata, registered_at.
json to_json(const WirelessNode& node);
// Missing registered_at decodes as the epoch. Throws Error with the
// appropriate domain code, or BadRequest for shape errors.
WirelessNode node_from_json(const json& j);

json to_json(const InterferencePair& pair);

// Object of key -> string|null, order preserved.
MetadataPatch patch_from_json(const json& j);

}  // namespace proxweb::registry
