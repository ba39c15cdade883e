#include "tilebn/network_io.hpp"

#include <json.hpp>

#include "tilebn/error.hpp"
#include "tilebn/json_writer.hpp"

namespace tilebn {

namespace {

constexpr const char* kNetworkFormat = "tilebn-network/1";

nlohmann::json parse_json(const std::string& text, const std::string& origin) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError, origin + ": " + e.what());
  }
}

NetworkStructure structure_from_json(const nlohmann::json& doc,
                                     const std::string& origin) {
  if (!doc.is_object() || !doc.contains("variables") || !doc.contains("edges")) {
    fail(ErrorCode::ParseError,
         origin + ": expected an object with 'variables' and 'edges'");
  }
  if (doc.contains("format") && doc["format"] != kNetworkFormat) {
    fail(ErrorCode::ParseError,
         origin + ": unsupported format '" + doc["format"].dump() + "'");
  }
  NetworkStructure structure;
  for (const auto& v : doc["variables"]) {
    if (!v.contains("id") || !v.contains("states")) {
      fail(ErrorCode::ParseError, origin + ": variable missing 'id' or 'states'");
    }
    Variable var;
    var.id = v["id"].get<std::string>();
    var.name = v.value("name", var.id);
    for (const auto& s : v["states"]) var.states.push_back(s.get<std::string>());
    structure.variables.push_back(std::move(var));
  }
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 2) {
      fail(ErrorCode::ParseError, origin + ": edge is not a [parent, child] pair");
    }
    structure.parents[e[1].get<std::string>()].push_back(e[0].get<std::string>());
  }
  return structure;
}

}  // namespace

std::string network_to_string(const BayesianNetwork& network) {
  JsonWriter w;
  w.begin_object();
  w.key("format").value(kNetworkFormat);

  w.key("variables").begin_array();
  for (const auto& v : network.variables()) {
    w.begin_object();
    w.key("id").value(v.id);
    w.key("name").value(v.name);
    w.key("states").begin_array();
    for (const auto& s : v.states) w.value(s);
    w.end_array();
    w.end_object();
  }
  w.end_array();

  w.key("edges").begin_array();
  for (int child = 0; child < network.size(); ++child) {
    for (int parent : network.parents(child)) {
      w.begin_array();
      w.value(network.variable(parent).id);
      w.value(network.variable(child).id);
      w.end_array();
    }
  }
  w.end_array();

  w.key("cpds").begin_array();
  for (int child = 0; child < network.size(); ++child) {
    w.begin_object();
    w.key("child").value(network.variable(child).id);
    w.key("parent_order").begin_array();
    for (int parent : network.parents(child)) w.value(network.variable(parent).id);
    w.end_array();
    w.key("table").begin_array();
    for (const auto& row : network.cpd(child)) {
      w.begin_array();
      for (double p : row) w.value(p);
      w.end_array();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();

  w.end_object();
  return w.str();
}

BayesianNetwork network_from_string(const std::string& text,
                                    const std::string& origin) {
  const nlohmann::json doc = parse_json(text, origin);
  NetworkStructure structure = structure_from_json(doc, origin);
  if (!doc.contains("cpds")) {
    fail(ErrorCode::MissingCpd, origin + ": no 'cpds' section");
  }
  std::vector<Cpd> cpds;
  for (const auto& c : doc["cpds"]) {
    if (!c.contains("child") || !c.contains("table")) {
      fail(ErrorCode::ParseError, origin + ": CPD missing 'child' or 'table'");
    }
    Cpd cpd;
    cpd.child = c["child"].get<std::string>();
    if (c.contains("parent_order")) {
      for (const auto& p : c["parent_order"]) {
        cpd.parent_order.push_back(p.get<std::string>());
      }
    }
    for (const auto& row : c["table"]) {
      std::vector<double> values;
      for (const auto& p : row) values.push_back(p.get<double>());
      cpd.table.push_back(std::move(values));
    }
    cpds.push_back(std::move(cpd));
  }
  return build_network(structure, cpds);
}

void save_network(const BayesianNetwork& network, const std::string& path) {
  write_file_atomic(path, network_to_string(network));
}

BayesianNetwork load_network(const std::string& path) {
  return network_from_string(read_file(path), path);
}

NetworkStructure load_structure(const std::string& path) {
  const std::string text = read_file(path);
  NetworkStructure structure = structure_from_json(parse_json(text, path), path);
  validate_structure(structure);
  return structure;
}

}  // namespace tilebn
