#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flame/error.hpp"
#include "flame/value.hpp"

namespace flame {

/// One transition function of an agent type. `inputs` and `outputs` name
/// message types; `may_kill` allows the function to remove its agent.
struct FunctionSpec {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  bool may_kill = false;

  bool reads(std::string_view message) const {
    return std::find(inputs.begin(), inputs.end(), message) != inputs.end();
  }
  bool writes(std::string_view message) const {
    return std::find(outputs.begin(), outputs.end(), message) != outputs.end();
  }

  friend bool operator==(const FunctionSpec&, const FunctionSpec&) = default;
};

struct AgentTypeSpec {
  std::string name;
  Layout memory;
  std::vector<FunctionSpec> functions;

  const FunctionSpec* find_function(std::string_view fn) const {
    for (const auto& f : functions)
      if (f.name == fn) return &f;
    return nullptr;
  }

  friend bool operator==(const AgentTypeSpec&, const AgentTypeSpec&) = default;
};

/// A message type is positional when it carries real `x` and `y` fields and
/// scene scoped when it carries an integer `scene_id`; both are derived from
/// the payload layout.
struct MessageTypeSpec {
  std::string name;
  Layout payload;

  std::optional<std::size_t> field_of_kind(std::string_view field, ScalarKind kind) const {
    auto i = find_field(payload, field);
    if (i && payload[*i].kind == kind) return i;
    return std::nullopt;
  }
  bool positional() const {
    return field_of_kind("x", ScalarKind::Real) && field_of_kind("y", ScalarKind::Real);
  }
  bool scene_scoped() const { return field_of_kind("scene_id", ScalarKind::Integer).has_value(); }

  friend bool operator==(const MessageTypeSpec&, const MessageTypeSpec&) = default;
};

struct Constant {
  std::string name;
  Value value;

  friend bool operator==(const Constant&, const Constant&) = default;
};

struct ModelDef {
  std::string name;
  std::vector<AgentTypeSpec> agent_types;
  std::vector<MessageTypeSpec> message_types;
  std::vector<Constant> constants;

  std::optional<std::size_t> agent_type_index(std::string_view type) const {
    for (std::size_t i = 0; i < agent_types.size(); ++i)
      if (agent_types[i].name == type) return i;
    return std::nullopt;
  }
  std::optional<std::size_t> message_type_index(std::string_view type) const {
    for (std::size_t i = 0; i < message_types.size(); ++i)
      if (message_types[i].name == type) return i;
    return std::nullopt;
  }
  const AgentTypeSpec& agent_type(std::string_view type) const {
    auto i = agent_type_index(type);
    if (!i) fail(ErrorCode::UnknownAgentType, std::string(type));
    return agent_types[*i];
  }
  const MessageTypeSpec& message_type(std::string_view type) const {
    auto i = message_type_index(type);
    if (!i) fail(ErrorCode::UnknownMessageType, std::string(type));
    return message_types[*i];
  }
  const Constant* find_constant(std::string_view constant) const {
    for (const auto& c : constants)
      if (c.name == constant) return &c;
    return nullptr;
  }
  /// Sets (or adds) a constant, keeping declaration order for existing names.
  void set_constant(std::string_view constant, Value value) {
    for (auto& c : constants)
      if (c.name == constant) {
        c.value = value;
        return;
      }
    constants.push_back({std::string(constant), value});
  }

  friend bool operator==(const ModelDef&, const ModelDef&) = default;
};

namespace detail {

inline void check_unique_fields(const Layout& layout, const std::string& where) {
  std::set<std::string_view> seen;
  for (const auto& f : layout)
    if (!seen.insert(f.name).second) fail(ErrorCode::DuplicateName, where + "/" + f.name);
}

}  // namespace detail

/// Checks name uniqueness, message resolution and the positional/scene field
/// conventions. Throws flame::Error on the first violation.
inline void validate(const ModelDef& model) {
  std::set<std::string_view> names;
  for (const auto& m : model.message_types) {
    const std::string where = "messages/" + m.name;
    if (m.name.empty()) fail(ErrorCode::MissingField, where + "/name");
    if (!names.insert(m.name).second) fail(ErrorCode::DuplicateName, where);
    detail::check_unique_fields(m.payload, where);
  }
  names.clear();
  for (const auto& a : model.agent_types) {
    const std::string where = "agents/" + a.name;
    if (a.name.empty()) fail(ErrorCode::MissingField, where + "/name");
    if (!names.insert(a.name).second) fail(ErrorCode::DuplicateName, where);
    detail::check_unique_fields(a.memory, where + "/memory");
    if (a.functions.empty()) fail(ErrorCode::MissingField, where + "/functions/function");
    std::set<std::string_view> fns;
    for (const auto& f : a.functions) {
      const std::string fwhere = where + "/functions/" + f.name;
      if (!fns.insert(f.name).second) fail(ErrorCode::DuplicateName, fwhere);
      for (const auto* list : {&f.inputs, &f.outputs}) {
        std::set<std::string_view> seen;
        for (const auto& msg : *list) {
          if (!model.message_type_index(msg))
            fail(ErrorCode::UnknownMessage, "function " + a.name + "::" + f.name + " references undeclared message '" + msg + "'");
          if (!seen.insert(msg).second) fail(ErrorCode::DuplicateName, fwhere + "/" + msg);
        }
      }
    }
  }
  names.clear();
  for (const auto& c : model.constants)
    if (!names.insert(c.name).second) fail(ErrorCode::DuplicateName, "environment/" + c.name);
}

}  // namespace flame
