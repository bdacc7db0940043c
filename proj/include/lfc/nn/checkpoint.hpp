#pragma once

#include <json.hpp>
#include <string>

#include "lfc/nn/network.hpp"

namespace lfc::nn {

/// Serializes the architecture and flat parameter arrays of a network.
nlohmann::json network_to_json(Network& net);

/// Rebuilds a network and validates every parameter shape against the
/// architecture; throws std::runtime_error on any mismatch.
Network network_from_json(const nlohmann::json& doc);

void save_network(const std::string& path, Network& net,
                  const nlohmann::json& extra = nlohmann::json::object());

struct LoadedNetwork {
  Network net;
  nlohmann::json extra;
};

LoadedNetwork load_network(const std::string& path);

}  // namespace lfc::nn
