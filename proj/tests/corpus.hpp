#pragma once

#include <bit>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "flame/flame.hpp"

namespace flame::test {

struct MalformedCase {
  std::string name;
  bool is_model;  // model document, otherwise snapshot
  std::string text;
  ErrorCode expected;
};

inline std::string citizen_xml(const std::string& fields) {
  return "<states><itno>0</itno><xagent><name>Citizen</name>" + fields + "</xagent></states>";
}

inline const std::string kCitizenFields =
    "<id>0</id><sugars>0</sugars><x>1.5</x><y>2.5</y><sugars_collected>0</sugars_collected>"
    "<flag_sugar_collected>0</flag_sugar_collected><scene_id>0</scene_id>";

inline std::string model_xml(const std::string& agents, const std::string& messages) {
  return "<xmodel><agents>" + agents + "</agents><messages>" + messages + "</messages></xmodel>";
}

inline const std::string kLocationMsg =
    "<message><name>location</name><variables><variable><type>double</type><name>x</name></variable>"
    "</variables></message>";

inline std::string agent_xml(const std::string& name, const std::string& fn_inputs) {
  return "<xagent><name>" + name +
         "</name><memory><variable><type>int</type><name>id</name></variable></memory>"
         "<functions><function><name>find</name><inputs><input><messageName>" +
         fn_inputs + "</messageName></input></inputs></function></functions></xagent>";
}

/// Broken documents and the error each must produce.
inline std::vector<MalformedCase> malformed_corpus() {
  return {
      {"unclosed element", false, "<states><itno>0</itno><xagent><name>Citizen</name>", ErrorCode::XmlSyntax},
      {"mismatched tags", false, "<states><itno>0</itno></xagent></states>", ErrorCode::XmlSyntax},
      {"not xml", false, "this is not xml at all <<<", ErrorCode::XmlSyntax},
      {"missing itno", false, "<states></states>", ErrorCode::MissingField},
      {"non-numeric itno", false, "<states><itno>zero</itno></states>", ErrorCode::TypeMismatch},
      {"unknown agent type", false,
       "<states><itno>0</itno><xagent><name>Dragon</name></xagent></states>", ErrorCode::UnknownAgentType},
      {"missing y", false, citizen_xml("<id>0</id><sugars>0</sugars><x>1.5</x><sugars_collected>0</sugars_collected>"
                                       "<flag_sugar_collected>0</flag_sugar_collected><scene_id>0</scene_id>"),
       ErrorCode::MissingField},
      {"real in int field", false,
       citizen_xml("<id>0.5</id><sugars>0</sugars><x>1.5</x><y>2.5</y><sugars_collected>0</sugars_collected>"
                   "<flag_sugar_collected>0</flag_sugar_collected><scene_id>0</scene_id>"),
       ErrorCode::TypeMismatch},
      {"text in real field", false,
       citizen_xml("<id>0</id><sugars>0</sugars><x>abc</x><y>2.5</y><sugars_collected>0</sugars_collected>"
                   "<flag_sugar_collected>0</flag_sugar_collected><scene_id>0</scene_id>"),
       ErrorCode::TypeMismatch},
      {"unexpected field", false, citizen_xml(kCitizenFields + "<wings>2</wings>"), ErrorCode::UnknownField},
      {"field twice", false, citizen_xml(kCitizenFields + "<x>3</x>"), ErrorCode::DuplicateName},
      {"agent without name", false, "<states><itno>0</itno><xagent><id>1</id></xagent></states>",
       ErrorCode::MissingField},
      {"undeclared message", true, model_xml(agent_xml("Citizen", "locaton"), kLocationMsg), ErrorCode::UnknownMessage},
      {"duplicate agent type", true,
       model_xml(agent_xml("Citizen", "location") + agent_xml("Citizen", "location"), kLocationMsg),
       ErrorCode::DuplicateName},
      {"unknown scalar type", true,
       model_xml("<xagent><name>A</name><memory><variable><type>float</type><name>v</name></variable></memory>"
                 "<functions><function><name>f</name></function></functions></xagent>",
                 ""),
       ErrorCode::TypeMismatch},
      {"agent without functions", true,
       model_xml("<xagent><name>A</name><memory></memory><functions></functions></xagent>", ""), ErrorCode::MissingField},
      {"model missing agents", true, "<xmodel><messages></messages></xmodel>", ErrorCode::MissingField},
  };
}

/// Random valid snapshot of the built-in model, including awkward reals.
inline io::SnapshotDoc random_snapshot(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> count(0, 12);
  std::uniform_int_distribution<std::int64_t> ints(-1'000'000'000'000LL, 1'000'000'000'000LL);
  std::uniform_real_distribution<double> reals(-1e6, 1e6);
  auto real = [&]() -> double {
    switch (gen() % 6) {
      case 0: return reals(gen) * 1e-300;
      case 1: return std::nextafter(reals(gen), 0.0);
      case 2: return 0.1 * static_cast<double>(gen() % 1000);
      case 3: return -0.0;
      case 4: return std::bit_cast<double>(gen() & 0x7fefffffffffffffULL);  // any finite positive
      default: return reals(gen);
    }
  };
  io::SnapshotDoc doc;
  doc.iteration_number = static_cast<std::int64_t>(gen() % 1000);
  const int n = count(gen);
  for (int i = 0; i < n; ++i) {
    switch (gen() % 3) {
      case 0:
        doc.agents.push_back({"Citizen",
                              {Value{ints(gen)}, Value{ints(gen)}, Value{real()}, Value{real()}, Value{ints(gen)},
                               Value{ints(gen)}, Value{ints(gen)}}});
        break;
      case 1: doc.agents.push_back({"Sugar", {Value{ints(gen)}, Value{real()}, Value{real()}, Value{ints(gen)}}}); break;
      default: doc.agents.push_back({"Averager", {Value{ints(gen)}, Value{real()}, Value{ints(gen)}, Value{ints(gen)}}});
    }
  }
  return doc;
}

}  // namespace flame::test
