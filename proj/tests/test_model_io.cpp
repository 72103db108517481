#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "corpus.hpp"
#include "flame/flame.hpp"
#include "test_util.hpp"

using namespace flame;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ParseModel, BasicSugarscapeCounts) {
  const auto model = io::load_model(test::source_dir() / "models" / "sugarscape_basic.xml");
  EXPECT_EQ(model.agent_types.size(), 2u);
  EXPECT_EQ(model.message_types.size(), 3u);
  std::size_t fns = 0;
  for (const auto& a : model.agent_types) fns += a.functions.size();
  EXPECT_EQ(fns, 4u);
  EXPECT_TRUE(model.message_type("location").positional());
  EXPECT_TRUE(model.message_type("location").scene_scoped());
  EXPECT_FALSE(model.message_type("request").positional());
  EXPECT_TRUE(model.agent_type("Sugar").find_function("check_eaten")->may_kill);
}

TEST(ParseModel, ShippedModelFileMatchesBuiltin) {
  EXPECT_EQ(io::load_model(test::source_dir() / "models" / "sugarscape.xml"), sugarscape::builtin_model());
}

TEST(ParseModel, FormatParseRoundtrip) {
  const auto model = sugarscape::builtin_model();
  EXPECT_EQ(io::parse_model(io::format_model(model)), model);
}

TEST(ParseModel, UndeclaredInputNamesTheFunction) {
  const auto text = test::model_xml(test::agent_xml("Citizen", "locaton"), test::kLocationMsg);
  try {
    io::parse_model(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownMessage);
    EXPECT_NE(std::string(e.what()).find("find"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("locaton"), std::string::npos);
  }
}

TEST(ParseModel, DuplicateAgentTypes) {
  const auto text = test::model_xml(test::agent_xml("Citizen", "location") + test::agent_xml("Citizen", "location"),
                                    test::kLocationMsg);
  EXPECT_EQ(code_of([&] { io::parse_model(text); }), ErrorCode::DuplicateName);
}

TEST(ParseModel, EnvironmentConstants) {
  const auto model = sugarscape::builtin_model();
  ASSERT_NE(model.find_constant("run_distance"), nullptr);
  EXPECT_EQ(as_real(model.find_constant("run_distance")->value), 5.5);
  EXPECT_EQ(as_real(model.find_constant("viewing_distance")->value), 200.0);
}

TEST(ParseSnapshot, OneCitizenWithSevenFields) {
  const auto model = sugarscape::builtin_model();
  const auto doc = io::parse_snapshot(test::citizen_xml(test::kCitizenFields), model);
  ASSERT_EQ(doc.agents.size(), 1u);
  EXPECT_EQ(doc.agents[0].type, "Citizen");
  ASSERT_EQ(doc.agents[0].memory.size(), 7u);
  EXPECT_EQ(std::get<double>(doc.agents[0].memory[2]), 1.5);
  EXPECT_EQ(std::get<double>(doc.agents[0].memory[3]), 2.5);
}

TEST(ParseSnapshot, MissingFieldIsNamed) {
  const auto model = sugarscape::builtin_model();
  const auto cases = test::malformed_corpus();
  const auto& missing_y = *std::find_if(cases.begin(), cases.end(), [](auto& c) { return c.name == "missing y"; });
  try {
    io::parse_snapshot(missing_y.text, model);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingField);
    EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos);
  }
}

TEST(ParseSnapshot, FileOrderDefinesIds) {
  const auto model = sugarscape::builtin_model();
  sugarscape::ModelParams p;
  p.n_scenes = 2;
  p.citizens_per_scene = 3;
  p.sugars_per_scene = 4;
  const auto doc = sugarscape::gen_scenario(sugarscape::ScenarioKind::RandomMixed, p, 1);
  const auto state = io::to_state(io::parse_snapshot(io::format_snapshot(doc, model), model), model, 0);
  ASSERT_EQ(state.agents.size(), doc.agents.size());
  for (std::size_t i = 0; i < state.agents.size(); ++i) {
    EXPECT_EQ(state.agents[i].id, static_cast<std::int64_t>(i));
    EXPECT_EQ(model.agent_types[state.agents[i].type].name, doc.agents[i].type);
  }
}

TEST(MalformedCorpus, EveryCaseYieldsItsError) {
  const auto model = sugarscape::builtin_model();
  for (const auto& c : test::malformed_corpus()) {
    SCOPED_TRACE(c.name);
    EXPECT_EQ(code_of([&] {
                if (c.is_model)
                  io::parse_model(c.text);
                else
                  io::parse_snapshot(c.text, model);
              }),
              c.expected);
  }
}

TEST(WriteSnapshot, FileNamedAfterIteration) {
  test::TempDir dir("io");
  const auto model = sugarscape::builtin_model();
  io::SnapshotDoc doc{0, {{"Sugar", test::sugar(0, 5.5, 1.0)}}};
  const auto path = io::write_snapshot(doc, model, dir.path());
  EXPECT_EQ(path.filename(), "0.xml");
  EXPECT_TRUE(std::filesystem::exists(path));
  EXPECT_FALSE(std::filesystem::exists(dir.path() / "0.xml.tmp"));
  const auto back = io::load_snapshot(path, model);
  EXPECT_EQ(back, doc);
  EXPECT_EQ(std::get<double>(back.agents[0].memory[1]), 5.5);

  doc.iteration_number = 12;
  EXPECT_EQ(io::write_snapshot(doc, model, dir.path()).filename(), "12.xml");
}

TEST(WriteSnapshot, EmptyDocument) {
  const auto model = sugarscape::builtin_model();
  io::SnapshotDoc doc{3, {}};
  const auto text = io::format_snapshot(doc, model);
  EXPECT_EQ(text, "<states>\n<itno>3</itno>\n</states>\n");
  EXPECT_EQ(io::parse_snapshot(text, model), doc);
}

TEST(WriteSnapshot, FieldOrderFollowsLayout) {
  const auto model = sugarscape::builtin_model();
  io::SnapshotDoc doc{0, {{"Sugar", test::sugar(9, 1.0, 0.1)}}};
  EXPECT_EQ(io::format_snapshot(doc, model),
            "<states>\n<itno>0</itno>\n<xagent>\n<name>Sugar</name>\n<id>9</id>\n<x>1</x>\n"
            "<y>0.10000000000000001</y>\n<scene_id>0</scene_id>\n</xagent>\n</states>\n");
}

TEST(WriteSnapshot, UnwritableDirectoryIsIoFailure) {
  const auto model = sugarscape::builtin_model();
  EXPECT_EQ(code_of([&] { io::write_snapshot({0, {}}, model, "/nonexistent/dir/for/flame"); }), ErrorCode::IoFailure);
}

TEST(SnapshotRoundtrip, RandomDocumentsAreBitIdentical) {
  const auto model = sugarscape::builtin_model();
  std::mt19937_64 gen(99);
  for (int i = 0; i < 200; ++i) {
    const auto doc = test::random_snapshot(gen);
    const auto back = io::parse_snapshot(io::format_snapshot(doc, model), model);
    ASSERT_EQ(back, doc) << "document " << i;
  }
}

TEST(Text, RealFormattingIsLossless) {
  for (double v : {0.1, 1.0 / 3.0, 5.5, -0.0, 1e-310, 1.7976931348623157e308, 123456789.123456789}) {
    auto back = io::parse_real(io::format_real(v));
    ASSERT_TRUE(back);
    EXPECT_EQ(std::bit_cast<std::uint64_t>(*back), std::bit_cast<std::uint64_t>(v)) << io::format_real(v);
  }
  EXPECT_FALSE(io::parse_int("12x"));
  EXPECT_FALSE(io::parse_int(""));
  EXPECT_FALSE(io::parse_real("1.5.2"));
}
