#include <gtest/gtest.h>

#include <cstdlib>

#include "populace/errors.hpp"
#include "populace/llm.hpp"
#include "support/fixtures.hpp"

using namespace populace;
using namespace populace::llm;
using namespace populace::testing;
using Reply = MockBackend::Reply;

namespace {

const char* kRepairedListing = R"("""
Event to parse:
[Sara] drinks a beverage while sitting in the seat farthest from the reception desk
"""
def parse_event():
    desk = "reception_desk_1"
    chairs = ["chair_1", "chair_2", "chair_3"]
    max_distance = 0
    farthest_chair = chairs[0]
    for chair in chairs:
        distance = get_distance_between(desk, chair)
        if distance > max_distance:
            farthest_chair = chair
            max_distance = distance
    target_area = get_area_to_sit_on(farthest_chair)

    sara = get_character("Sara")
    sara.set_position(target_area)
    sara.set_target_action("drink")
    return [sara]
)";

SceneGraph desk_scene() {
  std::vector<SceneObject> objs{make_box("reception_desk_1", "reception_desk", {5, 5, 0.5}, {0.5, 0.5, 0.5})};
  const double gaps[3] = {2, 5, 3};
  const Vec2 dirs[3] = {{1, 0}, {0, 1}, {-1, 0}};
  for (int i = 0; i < 3; ++i) {
    const Vec2 c = Vec2{5, 5} + dirs[i] * (0.75 + gaps[i]);
    auto chair = make_box("chair_" + std::to_string(i + 1), "chair", {c.x, c.y, 0.45}, {0.25, 0.25, 0.45});
    chair.attributes.sittable = true;
    objs.push_back(chair);
  }
  return build_scene_graph(SceneGraph("desk", rect_floor(12, 12), std::move(objs)));
}

PromptBundle bundle() {
  PromptBundle b;
  b.description = "A small reception area. The desk faces the entrance; three chairs stand around it.";
  b.history = {{"Tom types at the reception desk.", "ongoing", {"Tom"}},
               {"Sara waters the plant by the window.", "completed", {"Sara"}}};
  b.idle = {"Sara"};
  b.characters = {{"Sara", {1, 1}, false}, {"Tom", {5, 4}, true}};
  b.instructions = {"Someone should take a break."};
  return b;
}

std::string code(const std::string& body) { return "```python\n" + body + "```"; }

/// Compares against a golden file; POPULACE_UPDATE_GOLDEN=1 rewrites it instead.
void expect_golden(const std::string& name, const std::string& actual) {
  const auto path = golden_dir() / name;
  if (std::getenv("POPULACE_UPDATE_GOLDEN")) {
    std::ofstream(path) << actual;
    return;
  }
  ASSERT_TRUE(std::filesystem::exists(path)) << path;
  EXPECT_EQ(actual, read_text(path)) << "golden mismatch: " << name;
}

}  // namespace

TEST(Prompts, DescriberGolden) {
  const auto g = build_scene_graph(load_scene(data_dir() / "scenes" / "house.json"));
  const auto regions = cluster_regions(g);
  const auto msgs = describer_messages(g, regions, ExampleLibrary::builtin());
  const std::string text = render_messages(msgs);
  // Regions and the structured graph both reach the model.
  EXPECT_NE(text.find("region"), std::string::npos);
  EXPECT_NE(text.find(regions.front().member_ids.front()), std::string::npos);
  EXPECT_NE(text.find("table_1"), std::string::npos);
  expect_golden("describer_house.txt", text);
}

TEST(Prompts, NarratorGolden) {
  const std::string text = render_messages(narrator_messages(bundle(), ExampleLibrary::builtin()));
  EXPECT_NE(text.find("[ongoing] Tom types"), std::string::npos);
  EXPECT_NE(text.find("[completed] Sara waters"), std::string::npos);
  EXPECT_NE(text.find("Someone should take a break."), std::string::npos);
  expect_golden("narrator_reception.txt", text);
}

TEST(Prompts, ParserGolden) {
  const std::string text =
      render_messages(parser_messages(bundle(), "Sara drinks coffee in the farthest chair", {"chair_1"},
                                      ExampleLibrary::builtin()));
  EXPECT_NE(text.find("get_area_to_sit_on"), std::string::npos);
  EXPECT_NE(text.find("chair_1"), std::string::npos);
  expect_golden("parser_reception.txt", text);
}

TEST(Prompts, ExamplesFollowTags) {
  EXPECT_EQ(ExampleLibrary::keys_for({}), (std::vector<std::string>{"default"}));
  EXPECT_EQ(ExampleLibrary::keys_for({Tag::SS, Tag::PI}), (std::vector<std::string>{"SS", "PI"}));
  auto b = bundle();
  b.example_tags = {Tag::OA};
  const auto lib = ExampleLibrary::builtin();
  const std::string with = render_messages(narrator_messages(b, lib));
  EXPECT_NE(with.find(lib.narrator.at("OA").output), std::string::npos);
  EXPECT_EQ(with.find(lib.narrator.at("default").output), std::string::npos);
}

TEST(Describer, ReturnsScriptedTextVerbatim) {
  const auto g = desk_scene();
  MockBackend mock({{Role::Describer, "  A desk and three chairs.\n"}});
  EXPECT_EQ(describe_scene(g, cluster_regions(g), mock), "  A desk and three chairs.\n");
  EXPECT_EQ(mock.requests().at(0).role, Role::Describer);
}

TEST(Narrator, AcceptsIdleParticipantsFirstPass) {
  MockBackend mock({{Role::Narrator, "Sara is idle, Tom is busy.\nEvent: Sara reads.\nParticipants: Sara"}});
  const auto r = narrate(bundle(), mock);
  EXPECT_EQ(r.event, "Sara reads.");
  EXPECT_EQ(r.participants, (std::vector<std::string>{"Sara"}));
  EXPECT_EQ(r.attempts, 1);
  EXPECT_TRUE(r.feedback.empty());
}

TEST(Narrator, BusyCharacterGetsFeedbackThenAccepted) {
  MockBackend mock({{Role::Narrator, "Event: Sara and Tom chat.\nParticipants: Sara, Tom"},
                    {Role::Narrator, "Event: Sara makes tea.\nParticipants: Sara"}});
  const auto r = narrate(bundle(), mock);
  EXPECT_EQ(r.attempts, 2);
  ASSERT_EQ(r.feedback.size(), 1u);
  EXPECT_NE(r.feedback[0].find("Tom"), std::string::npos);
  // The retry carries the feedback as a user turn after the rejected reply.
  const auto& retry = mock.requests().at(1).messages;
  EXPECT_EQ(retry.back().role, "user");
  EXPECT_EQ(retry.back().content, r.feedback[0]);
  EXPECT_EQ(retry[retry.size() - 2].role, "assistant");
}

TEST(Narrator, BudgetExhaustedRaisesPlanningError) {
  std::vector<Reply> replies(3, {Role::Narrator, "Event: Tom dances.\nParticipants: Tom"});
  MockBackend mock(replies);
  EXPECT_THROW(narrate(bundle(), mock), PlanningError);
  EXPECT_EQ(mock.consumed(), 3u);
}

TEST(Narrator, MalformedReplyCountsAsAnAttempt) {
  MockBackend mock({{Role::Narrator, "I think Sara could read."}, {Role::Narrator, "Event: Sara reads.\nParticipants: Sara."}});
  const auto r = narrate(bundle(), mock);
  EXPECT_EQ(r.attempts, 2);
  EXPECT_EQ(r.participants, (std::vector<std::string>{"Sara"}));
}

TEST(Narrator, ParseNarrationEdgeCases) {
  EXPECT_FALSE(parse_narration("Event: \nParticipants: Sara"));
  EXPECT_FALSE(parse_narration("Event: x"));
  const auto r = parse_narration("reasoning...\nevent: Tom and Mia chat\nparticipants: Tom, Mia, Tom");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->participants, (std::vector<std::string>{"Tom", "Mia"}));
}

TEST(Parser, ListingReplyGroundsSara) {
  const auto g = desk_scene();
  script::ScriptWorld w;
  w.graph = &g;
  w.characters = {{"Sara", {1, 1}}, {"Tom", {2, 1}}};
  MockBackend mock({{Role::Parser, "Here is the plan.\n" + code(kRepairedListing)}});
  const auto r = parse_event(bundle(), "Sara drinks in the farthest seat", w, mock);
  ASSERT_EQ(r.outcome.plans.size(), 1u);
  EXPECT_EQ(*std::get<Area>(r.outcome.plans[0].position).anchor_id, "chair_2");
  EXPECT_EQ(r.attempts, 1);
}

TEST(Parser, UnknownObjectThenCorrected) {
  const auto g = desk_scene();
  script::ScriptWorld w;
  w.graph = &g;
  w.characters = {{"Sara", {1, 1}}};
  const std::string bad = "def parse_event():\n    s = get_character(\"Sara\")\n"
                          "    s.set_position(get_area_to_sit_on(\"armchair_9\"))\n"
                          "    s.set_target_action(\"sit\")\n    return [s]\n";
  const std::string good = "def parse_event():\n    s = get_character(\"Sara\")\n"
                           "    s.set_position(get_area_to_sit_on(\"chair_3\"))\n"
                           "    s.set_target_action(\"sit\")\n    return [s]\n";
  MockBackend mock({{Role::Parser, code(bad)}, {Role::Parser, code(good)}});
  const auto r = parse_event(bundle(), "Sara sits", w, mock);
  EXPECT_EQ(r.attempts, 2);
  ASSERT_EQ(r.feedback.size(), 1u);
  EXPECT_NE(r.feedback[0].find("armchair_9"), std::string::npos);
}

TEST(Parser, FailureClasses) {
  const auto g = desk_scene();
  script::ScriptWorld w;
  w.graph = &g;
  w.characters = {{"Sara", {1, 1}}};
  auto reason = [&](std::string reply) {
    MockBackend mock(std::vector<Reply>(3, {Role::Parser, reply}));
    try {
      parse_event(bundle(), "x", w, mock);
    } catch (const ExecutionError& e) {
      return e.reason();
    }
    ADD_FAILURE() << "no ExecutionError";
    return ExecutionFailure::Grounding;
  };
  EXPECT_EQ(reason("I cannot write code today."), ExecutionFailure::NoScript);
  EXPECT_EQ(reason(code("def parse_event(:\n    return []\n")), ExecutionFailure::Syntax);
  EXPECT_EQ(reason(code("def parse_event():\n    return [get_character(\"Bob\")]\n")), ExecutionFailure::Runtime);
  // A validator rejection (for example a seat that cannot be grounded) is its own class.
  MockBackend mock(std::vector<Reply>(3, {Role::Parser, code(kRepairedListing)}));
  try {
    parse_event(bundle(), "x", w, mock, [](const script::ExecOutcome&) { throw NoFreeSpace("seat taken"); });
    FAIL();
  } catch (const ExecutionError& e) {
    EXPECT_EQ(e.reason(), ExecutionFailure::Grounding);
  }
}

TEST(Mock, StrictRoleMismatchAndExhaustion) {
  MockBackend mock({{Role::Narrator, "x"}});
  ChatRequest req;
  req.role = Role::Parser;
  EXPECT_THROW(mock.send(req), BackendError);
  req.role = Role::Narrator;
  EXPECT_EQ(mock.send(req), "x");
  EXPECT_THROW(mock.send(req), BackendError);
}

TEST(Mock, CyclingServesMatchingRepliesPerRole) {
  const auto doc = nlohmann::json::parse(R"({
    "model": "m", "cycle": true,
    "replies": [
      {"role": "narrator", "text": "n-sara", "match": "Idle characters: Sara"},
      {"role": "narrator", "text": "n-tom", "match": "Idle characters: Tom"},
      {"role": "parser", "text": "p1"},
      {"role": "parser", "text": "p2"}
    ]})");
  MockBackend mock = MockBackend::from_json(doc);
  auto ask = [&](Role r, const std::string& content) {
    ChatRequest req;
    req.role = r;
    req.messages = {{"user", content}};
    return mock.send(req);
  };
  EXPECT_EQ(ask(Role::Narrator, "Idle characters: Tom"), "n-tom");
  EXPECT_EQ(ask(Role::Parser, "any"), "p1");
  EXPECT_EQ(ask(Role::Narrator, "Idle characters: Sara"), "n-sara");
  EXPECT_EQ(ask(Role::Parser, "any"), "p2");
  EXPECT_EQ(ask(Role::Parser, "any"), "p1");
  EXPECT_EQ(mock.model(), "m");
}

TEST(Mock, TrialsSwitchWithBeginTrial) {
  const auto doc = nlohmann::json::parse(R"({"trials": [[{"role": "parser", "text": "a"}], [{"role": "parser", "text": "b"}]]})");
  MockBackend mock = MockBackend::from_json(doc);
  ChatRequest req;
  req.role = Role::Parser;
  mock.begin_trial(1);
  EXPECT_EQ(mock.send(req), "b");
  mock.begin_trial(0);
  EXPECT_EQ(mock.send(req), "a");
  EXPECT_THROW(MockBackend::from_json(nlohmann::json::parse(R"({"replies": [{"role": "oracle", "text": "a"}]})")),
               SchemaError);
}

TEST(Remote, RequestBodyCarriesModelAndTemperature) {
  RemoteConfig cfg;
  cfg.model = "gpt-4o";
  ChatRequest req;
  req.messages = {{"system", "s"}, {"user", "u"}};
  const auto body = RemoteBackend::request_body(cfg, req);
  EXPECT_EQ(body["model"], "gpt-4o");
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.1);
  ASSERT_EQ(body["messages"].size(), 2u);
  EXPECT_EQ(body["messages"][1]["role"], "user");
  EXPECT_EQ(body["messages"][1]["content"], "u");
}

TEST(Remote, ReplyTextExtraction) {
  EXPECT_EQ(RemoteBackend::reply_text(R"({"choices":[{"message":{"role":"assistant","content":"hi"}}]})"), "hi");
  EXPECT_THROW(RemoteBackend::reply_text(R"({"choices":[]})"), BackendError);
  EXPECT_THROW(RemoteBackend::reply_text("not json"), BackendError);
}

TEST(Remote, UnreachableServerIsABackendError) {
  RemoteConfig cfg;
  cfg.url = "http://127.0.0.1:1";
  cfg.max_attempts = 2;
  cfg.timeout_seconds = 2;
  RemoteBackend backend(cfg);
  try {
    backend.send(ChatRequest{});
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.attempts(), 2);
  }
}
