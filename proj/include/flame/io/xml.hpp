#pragma once

#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "flame/error.hpp"
#include "flame/io/text.hpp"
#include "flame/model.hpp"
#include "flame/state.hpp"
#include "flame/value.hpp"

namespace flame::io {

struct SnapshotAgent {
  std::string type;
  Record memory;

  friend bool operator==(const SnapshotAgent& a, const SnapshotAgent& b) {
    return a.type == b.type && bit_equal(a.memory, b.memory);
  }
};

/// Contents of one `<iteration>.xml` state file, agents in file order.
struct SnapshotDoc {
  std::int64_t iteration_number = 0;
  std::vector<SnapshotAgent> agents;

  friend bool operator==(const SnapshotDoc&, const SnapshotDoc&) = default;
};

namespace detail {

using boost::property_tree::ptree;

inline bool is_meta(const std::string& key) { return key == "<xmlattr>" || key == "<xmlcomment>"; }

inline ptree parse_xml(std::string_view text) {
  ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::read_xml(in, tree,
                                   boost::property_tree::xml_parser::trim_whitespace |
                                       boost::property_tree::xml_parser::no_comments);
  } catch (const boost::property_tree::xml_parser_error& e) {
    fail(ErrorCode::XmlSyntax, "line " + std::to_string(e.line()) + ": " + e.message());
  }
  return tree;
}

/// An element plus its path from the document root, for diagnostics.
struct Element {
  const ptree& tree;
  std::string path;

  const ptree* find(std::string_view key) const {
    const ptree* found = nullptr;
    for (const auto& [k, child] : tree)
      if (k == key) {
        if (found) fail(ErrorCode::DuplicateName, path + "/" + std::string(key) + " appears more than once");
        found = &child;
      }
    return found;
  }

  Element child(std::string_view key) const {
    const ptree* c = find(key);
    if (!c) fail(ErrorCode::MissingField, path + "/" + std::string(key));
    return {*c, path + "/" + std::string(key)};
  }

  std::vector<Element> children(std::string_view key) const {
    std::vector<Element> out;
    for (const auto& [k, c] : tree)
      if (k == key) out.push_back({c, path + "/" + k});
    return out;
  }

  /// Rejects any child element outside `allowed`.
  void only(std::initializer_list<std::string_view> allowed) const {
    for (const auto& [k, c] : tree) {
      if (is_meta(k)) continue;
      bool ok = false;
      for (auto a : allowed) ok = ok || k == a;
      if (!ok) fail(ErrorCode::UnknownField, path + "/" + k + " is not expected here");
    }
  }

  const std::string& text() const {
    for (const auto& [k, c] : tree)
      if (!is_meta(k)) fail(ErrorCode::TypeMismatch, path + " must hold text, not elements");
    return tree.data();
  }

  std::string text_of(std::string_view key) const {
    auto t = child(key).text();
    if (t.empty()) fail(ErrorCode::MissingField, path + "/" + std::string(key) + " is empty");
    return t;
  }
};

inline ScalarKind parse_kind(const Element& e) {
  const auto& t = e.text();
  if (t == "int") return ScalarKind::Integer;
  if (t == "double") return ScalarKind::Real;
  fail(ErrorCode::TypeMismatch, e.path + ": unknown type '" + t + "' (expected int or double)");
}

inline Layout parse_layout(const Element& container) {
  container.only({"variable"});
  Layout layout;
  for (const auto& v : container.children("variable")) {
    v.only({"type", "name"});
    layout.push_back({v.text_of("name"), parse_kind(v.child("type"))});
  }
  return layout;
}

inline std::vector<std::string> parse_message_refs(const Element& fn, std::string_view list, std::string_view item) {
  std::vector<std::string> out;
  const ptree* c = fn.find(list);
  if (!c) return out;
  Element e{*c, fn.path + "/" + std::string(list)};
  e.only({item});
  for (const auto& ref : e.children(item)) {
    ref.only({"messageName"});
    out.push_back(ref.text_of("messageName"));
  }
  return out;
}

inline bool parse_bool(const Element& e) {
  const auto& t = e.text();
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  fail(ErrorCode::TypeMismatch, e.path + ": expected true or false");
}

}  // namespace detail

/// Parses a `<xmodel>` document and validates it (name uniqueness, message
/// resolution). Errors carry the element path.
inline ModelDef parse_model(std::string_view text) {
  auto doc = detail::parse_xml(text);
  detail::Element root_holder{doc, ""};
  root_holder.only({"xmodel"});
  auto root = root_holder.child("xmodel");
  root.only({"name", "environment", "agents", "messages"});

  ModelDef model;
  if (root.find("name")) model.name = root.child("name").text();

  if (root.find("environment")) {
    auto env = root.child("environment");
    env.only({"constants"});
    if (env.find("constants")) {
      auto constants = env.child("constants");
      constants.only({"variable"});
      for (const auto& v : constants.children("variable")) {
        v.only({"type", "name", "value"});
        auto kind = detail::parse_kind(v.child("type"));
        auto raw = v.text_of("value");
        auto value = parse_value(raw, kind);
        if (!value) fail(ErrorCode::TypeMismatch, v.path + "/value: '" + raw + "' is not a valid " + std::string(to_string(kind)));
        model.constants.push_back({v.text_of("name"), *value});
      }
    }
  }

  auto agents = root.child("agents");
  agents.only({"xagent"});
  for (const auto& a : agents.children("xagent")) {
    a.only({"name", "memory", "functions"});
    AgentTypeSpec spec;
    spec.name = a.text_of("name");
    spec.memory = detail::parse_layout(a.child("memory"));
    auto fns = a.child("functions");
    fns.only({"function"});
    for (const auto& f : fns.children("function")) {
      f.only({"name", "inputs", "outputs", "may_kill"});
      FunctionSpec fs;
      fs.name = f.text_of("name");
      fs.inputs = detail::parse_message_refs(f, "inputs", "input");
      fs.outputs = detail::parse_message_refs(f, "outputs", "output");
      if (f.find("may_kill")) fs.may_kill = detail::parse_bool(f.child("may_kill"));
      spec.functions.push_back(std::move(fs));
    }
    model.agent_types.push_back(std::move(spec));
  }

  if (root.find("messages")) {
    auto messages = root.child("messages");
    messages.only({"message"});
    for (const auto& m : messages.children("message")) {
      m.only({"name", "variables"});
      model.message_types.push_back({m.text_of("name"), detail::parse_layout(m.child("variables"))});
    }
  }

  validate(model);
  return model;
}

inline std::string format_model(const ModelDef& model) {
  std::ostringstream os;
  auto layout = [&](const Layout& l, const char* indent) {
    for (const auto& f : l)
      os << indent << "<variable><type>" << to_string(f.kind) << "</type><name>" << f.name << "</name></variable>\n";
  };
  os << "<xmodel>\n";
  if (!model.name.empty()) os << "  <name>" << model.name << "</name>\n";
  if (!model.constants.empty()) {
    os << "  <environment>\n    <constants>\n";
    for (const auto& c : model.constants)
      os << "      <variable><type>" << to_string(kind_of(c.value)) << "</type><name>" << c.name << "</name><value>"
         << format_value(c.value) << "</value></variable>\n";
    os << "    </constants>\n  </environment>\n";
  }
  os << "  <agents>\n";
  for (const auto& a : model.agent_types) {
    os << "    <xagent>\n      <name>" << a.name << "</name>\n      <memory>\n";
    layout(a.memory, "        ");
    os << "      </memory>\n      <functions>\n";
    for (const auto& f : a.functions) {
      os << "        <function>\n          <name>" << f.name << "</name>\n";
      if (!f.inputs.empty()) {
        os << "          <inputs>\n";
        for (const auto& m : f.inputs) os << "            <input><messageName>" << m << "</messageName></input>\n";
        os << "          </inputs>\n";
      }
      if (!f.outputs.empty()) {
        os << "          <outputs>\n";
        for (const auto& m : f.outputs) os << "            <output><messageName>" << m << "</messageName></output>\n";
        os << "          </outputs>\n";
      }
      if (f.may_kill) os << "          <may_kill>true</may_kill>\n";
      os << "        </function>\n";
    }
    os << "      </functions>\n    </xagent>\n";
  }
  os << "  </agents>\n  <messages>\n";
  for (const auto& m : model.message_types) {
    os << "    <message>\n      <name>" << m.name << "</name>\n      <variables>\n";
    layout(m.payload, "        ");
    os << "      </variables>\n    </message>\n";
  }
  os << "  </messages>\n</xmodel>\n";
  return os.str();
}

/// Parses a `<states>` document against `model`. Every agent record must
/// carry exactly the fields of its type's memory layout.
inline SnapshotDoc parse_snapshot(std::string_view text, const ModelDef& model) {
  auto doc = detail::parse_xml(text);
  detail::Element root_holder{doc, ""};
  root_holder.only({"states"});
  auto root = root_holder.child("states");
  root.only({"itno", "xagent"});

  SnapshotDoc out;
  auto itno_raw = root.text_of("itno");
  auto itno = parse_int(itno_raw);
  if (!itno) fail(ErrorCode::TypeMismatch, "/states/itno: '" + itno_raw + "' is not an integer");
  if (*itno < 0) fail(ErrorCode::InvalidArgument, "/states/itno must be >= 0");
  out.iteration_number = *itno;

  std::size_t index = 0;
  for (const auto& [key, node] : root.tree) {
    if (key != "xagent") continue;
    detail::Element a{node, "/states/xagent[" + std::to_string(index++) + "]"};
    auto type_name = a.text_of("name");
    auto type_index = model.agent_type_index(type_name);
    if (!type_index) fail(ErrorCode::UnknownAgentType, a.path + ": '" + type_name + "'");
    const auto& layout = model.agent_types[*type_index].memory;

    for (const auto& [k, c] : a.tree) {
      if (detail::is_meta(k) || k == "name") continue;
      if (!find_field(layout, k)) fail(ErrorCode::UnknownField, a.path + "/" + k + " is not a " + type_name + " field");
    }
    SnapshotAgent agent{type_name, {}};
    agent.memory.reserve(layout.size());
    for (const auto& field : layout) {
      if (!a.find(field.name)) fail(ErrorCode::MissingField, a.path + ": missing field '" + field.name + "'");
      auto raw = a.text_of(field.name);
      auto v = parse_value(raw, field.kind);
      if (!v)
        fail(ErrorCode::TypeMismatch,
             a.path + "/" + field.name + ": '" + raw + "' is not a valid " + std::string(to_string(field.kind)));
      agent.memory.push_back(*v);
    }
    out.agents.push_back(std::move(agent));
  }
  return out;
}

/// Serializes a snapshot: one element per memory field in layout order,
/// reals with 17 significant digits. The output is byte-deterministic.
inline std::string format_snapshot(const SnapshotDoc& doc, const ModelDef& model) {
  std::string out;
  out.reserve(64 + doc.agents.size() * 160);
  out += "<states>\n<itno>";
  out += std::to_string(doc.iteration_number);
  out += "</itno>\n";
  for (const auto& a : doc.agents) {
    const auto& spec = model.agent_type(a.type);
    if (!matches_layout(a.memory, spec.memory))
      fail(ErrorCode::PayloadMismatch, "agent record does not match layout of " + a.type);
    out += "<xagent>\n<name>";
    out += a.type;
    out += "</name>\n";
    for (std::size_t i = 0; i < spec.memory.size(); ++i) {
      const auto& name = spec.memory[i].name;
      out += '<';
      out += name;
      out += '>';
      out += format_value(a.memory[i]);
      out += "</";
      out += name;
      out += ">\n";
    }
    out += "</xagent>\n";
  }
  out += "</states>\n";
  return out;
}

inline std::filesystem::path snapshot_path(const std::filesystem::path& dir, std::int64_t iteration) {
  return dir / (std::to_string(iteration) + ".xml");
}

/// Writes `<dir>/<iteration_number>.xml`; returns the path written.
inline std::filesystem::path write_snapshot(const SnapshotDoc& doc, const ModelDef& model,
                                            const std::filesystem::path& dir) {
  auto path = snapshot_path(dir, doc.iteration_number);
  write_file_atomic(path, format_snapshot(doc, model));
  return path;
}

inline ModelDef load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

inline SnapshotDoc load_snapshot(const std::filesystem::path& path, const ModelDef& model) {
  return parse_snapshot(read_file(path), model);
}

/// Agent ids follow file order, starting at 0.
inline SimulationState to_state(const SnapshotDoc& doc, const ModelDef& model, std::uint64_t master_seed) {
  SimulationState sim;
  sim.iteration = doc.iteration_number;
  sim.master_seed = master_seed;
  sim.agents.reserve(doc.agents.size());
  std::int64_t id = 0;
  for (const auto& a : doc.agents) {
    auto type = model.agent_type_index(a.type);
    if (!type) fail(ErrorCode::UnknownAgentType, a.type);
    if (!matches_layout(a.memory, model.agent_types[*type].memory))
      fail(ErrorCode::PayloadMismatch, "agent record does not match layout of " + a.type);
    sim.agents.push_back({*type, id++, a.memory, true});
  }
  return sim;
}

inline SnapshotDoc to_snapshot(const SimulationState& sim, const ModelDef& model) {
  SnapshotDoc doc;
  doc.iteration_number = sim.iteration;
  doc.agents.reserve(sim.agents.size());
  for (const auto& a : sim.agents) doc.agents.push_back({model.agent_types[a.type].name, a.memory});
  return doc;
}

}  // namespace flame::io
