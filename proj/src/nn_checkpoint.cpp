#include "lfc/nn/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

namespace lfc::nn {

using nlohmann::json;

json network_to_json(Network& net) {
  json doc;
  doc["format"] = "lfc-net";
  doc["architecture"] = net.architecture();
  json params = json::object();
  for (const auto& p : net.params()) {
    json entry;
    entry["shape"] = {p.value->rows(), p.value->cols()};
    std::vector<double> data(p.value->data(), p.value->data() + p.value->size());
    entry["data"] = std::move(data);
    params[p.name] = std::move(entry);
  }
  doc["params"] = std::move(params);
  return doc;
}

Network network_from_json(const json& doc) {
  if (!doc.contains("architecture") || !doc.contains("params")) {
    throw std::runtime_error("checkpoint: missing architecture or params");
  }
  Rng scratch(0);
  Network net = Network::from_architecture(
      doc.at("architecture").get<std::vector<std::string>>(), scratch);

  const auto& params = doc.at("params");
  for (const auto& p : net.params()) {
    if (!params.contains(p.name)) {
      throw std::runtime_error("checkpoint: missing parameter " + p.name);
    }
    const auto& entry = params.at(p.name);
    const auto shape = entry.at("shape").get<std::vector<long>>();
    if (shape.size() != 2 || shape[0] != p.value->rows() || shape[1] != p.value->cols()) {
      throw std::runtime_error("checkpoint: shape mismatch for " + p.name);
    }
    const auto data = entry.at("data").get<std::vector<double>>();
    if (static_cast<long>(data.size()) != p.value->size()) {
      throw std::runtime_error("checkpoint: element count mismatch for " + p.name);
    }
    std::copy(data.begin(), data.end(), p.value->data());
  }
  return net;
}

void save_network(const std::string& path, Network& net, const json& extra) {
  json doc = network_to_json(net);
  if (!extra.empty()) doc["extra"] = extra;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << doc.dump(2) << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

LoadedNetwork load_network(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  json doc = json::parse(is);
  LoadedNetwork out{network_from_json(doc), json::object()};
  if (doc.contains("extra")) out.extra = doc.at("extra");
  return out;
}

}  // namespace lfc::nn
