#include <gtest/gtest.h>

#include <regex>

#include "populace/bench.hpp"
#include "populace/errors.hpp"
#include "support/fixtures.hpp"

using namespace populace;
using namespace populace::bench;
using namespace populace::testing;

namespace {

Area rect_area(double x0, double y0, double x1, double y1) {
  Area a;
  a.polygons.push_back(ConvexPolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}));
  return a;
}

const std::vector<std::string> kSceneActions = {"drink", "sit", "read"};

GeneratedPlan area_plan(std::string action, Area area) { return GeneratedPlan{std::move(action), std::move(area)}; }

const SceneGraph& office() {
  static const SceneGraph g = build_scene_graph(load_scene(data_dir() / "scenes" / "office.json"));
  return g;
}

TestCase office_case(const std::string& id) { return load_case(data_dir() / "cases" / (id + ".json")); }

std::string parser_reply(const std::string& body) { return "```python\ndef plan():\n" + body + "```"; }

llm::MockBackend tom_coffee_mock(const std::string& parser_body, int parser_replies) {
  std::vector<llm::MockBackend::Reply> replies;
  replies.push_back({llm::Role::Narrator,
                     "Reasoning: Tom is idle.\nEvent: Tom makes a coffee at the coffee machine.\nParticipants: Tom"});
  for (int i = 0; i < parser_replies; ++i) replies.push_back({llm::Role::Parser, parser_reply(parser_body)});
  return llm::MockBackend(std::move(replies), true);
}

const char* kGoodBody =
    "    tom = get_character(\"Tom\")\n"
    "    tom.set_position(get_area_to_interact_with(\"coffee_machine_1\"))\n"
    "    tom.set_target_action(\"make_coffee\")\n"
    "    return [tom]\n";

CaseContext context_for(llm::ChatBackend& backend, std::vector<std::string> descriptions) {
  CaseContext ctx;
  ctx.graph = &office();
  ctx.descriptions = std::move(descriptions);
  ctx.backend = &backend;
  return ctx;
}

/// Cells of a 0.5 lattice covered by an axis-aligned rectangle with corners on the lattice.
std::set<std::pair<int, int>> lattice_cells(double x0, double y0, double x1, double y1) {
  std::set<std::pair<int, int>> out;
  for (int i = static_cast<int>(std::lround(x0 * 2)); i < std::lround(x1 * 2); ++i)
    for (int j = static_cast<int>(std::lround(y0 * 2)); j < std::lround(y1 * 2); ++j) out.insert({i, j});
  return out;
}

}  // namespace

TEST(Judge, MissingPlanIsNoPlan) {
  const auto r = judge(std::nullopt, {"drink"}, rect_area(0, 0, 1, 1), kSceneActions, false, 0.25);
  EXPECT_TRUE(r.executed);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.failure, Failure::NoPlan);
}

TEST(Judge, ActionMustBeExpectedAndAvailable) {
  const Area target = rect_area(0, 0, 2, 2);
  auto r = judge(area_plan("read", rect_area(0.5, 0.5, 1, 1)), {"drink"}, target, kSceneActions, false, 0.25);
  EXPECT_EQ(r.failure, Failure::BadAction);
  // Expected by the case but missing from the scene vocabulary.
  r = judge(area_plan("dance", rect_area(0.5, 0.5, 1, 1)), {"dance"}, target, kSceneActions, false, 0.25);
  EXPECT_EQ(r.failure, Failure::BadAction);
  EXPECT_TRUE(r.executed);
}

TEST(Judge, AreaPlanMustLieInsideExpectedArea) {
  const Area target = rect_area(0, 0, 2, 2);
  auto r = judge(area_plan("drink", rect_area(0.5, 0.5, 1.5, 1.5)), {"drink", "sit"}, target, kSceneActions, false,
                 0.25);
  EXPECT_TRUE(r.passed);
  EXPECT_FALSE(r.failure.has_value());
  r = judge(area_plan("drink", rect_area(1.5, 1.5, 2.5, 2.5)), {"drink"}, target, kSceneActions, false, 0.25);
  EXPECT_EQ(r.failure, Failure::BadPosition);
}

TEST(Judge, CoordinateLevelNeedsAPoint) {
  const Area target = rect_area(0, 0, 2, 2);
  EXPECT_TRUE(judge(GeneratedPlan{"drink", Vec2{1, 1}}, {"drink"}, target, kSceneActions, true, 0.25).passed);
  EXPECT_EQ(judge(GeneratedPlan{"drink", Vec2{3, 1}}, {"drink"}, target, kSceneActions, true, 0.25).failure,
            Failure::BadPosition);
  EXPECT_EQ(judge(area_plan("drink", rect_area(0.5, 0.5, 1, 1)), {"drink"}, target, kSceneActions, true, 0.25).failure,
            Failure::BadPosition);
}

TEST(AreaSubset, MatchesLatticeOracleAndMonteCarlo) {
  Rng rng(11);
  int positives = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto corner = [&] { return rng.integer(0, 12) * 0.5; };
    auto rect = [&] {
      double x0 = corner(), x1 = corner(), y0 = corner(), y1 = corner();
      if (x0 > x1) std::swap(x0, x1);
      if (y0 > y1) std::swap(y0, y1);
      if (x1 - x0 < 0.5) x1 = x0 + 0.5;
      if (y1 - y0 < 0.5) y1 = y0 + 0.5;
      return std::array<double, 4>{x0, y0, x1, y1};
    };
    const auto in = rect();
    const auto o1 = rect();
    const auto o2 = rect();
    const Area inner = rect_area(in[0], in[1], in[2], in[3]);
    Area outer = rect_area(o1[0], o1[1], o1[2], o1[3]);
    outer.polygons.push_back(rect_area(o2[0], o2[1], o2[2], o2[3]).polygons.front());

    auto covered = lattice_cells(o1[0], o1[1], o1[2], o1[3]);
    for (const auto& c : lattice_cells(o2[0], o2[1], o2[2], o2[3])) covered.insert(c);
    bool oracle = true;
    for (const auto& c : lattice_cells(in[0], in[1], in[2], in[3])) oracle = oracle && covered.contains(c);

    const bool got = area_subset(inner, outer, 0.25);
    ASSERT_EQ(got, oracle) << "trial " << trial;
    positives += got;

    // Monte-Carlo: a subset never has an inner probe outside the outer area.
    int outside = 0;
    for (int k = 0; k < 10000; ++k) {
      const Vec2 p{rng.uniform(in[0], in[2]), rng.uniform(in[1], in[3])};
      outside += !outer.contains(p, 1e-9);
    }
    if (got) {
      ASSERT_EQ(outside, 0) << "trial " << trial;
    } else {
      ASSERT_GT(outside, 0) << "trial " << trial;
    }
  }
  EXPECT_GT(positives, 10);
}

TEST(AreaExpr, JsonRoundTripAndEvaluation) {
  const auto doc = nlohmann::json::parse(R"({"union": [
      {"area": "sit_on", "anchor": "chair_1"},
      {"intersection": [{"area": "close_to", "anchor": "reception_desk_1"},
                        {"area": "in_front_of", "anchor": "reception_desk_1"}]}]})");
  const AreaExpr e = AreaExpr::from_json(doc);
  EXPECT_EQ(e.op, AreaExpr::Op::Union);
  EXPECT_EQ(e.to_json(), doc);
  const Area a = e.evaluate(office());
  EXPECT_TRUE(a.contains(office().at("chair_1").box.center.xy()));
  EXPECT_THROW(AreaExpr::from_json(nlohmann::json::parse(R"({"area": "on_top_of", "anchor": "x"})")), SchemaError);
  EXPECT_THROW(AreaExpr::from_json(nlohmann::json::parse(R"({"union": []})")), SchemaError);
  EXPECT_THROW(
      AreaExpr::from_json(nlohmann::json::parse(R"({"area": "sit_on", "anchor": "piano_9"})")).evaluate(office()),
      UnknownObject);
}

TEST(Cases, LoadRejectsMissingFields) {
  auto doc = nlohmann::json::parse(read_text(data_dir() / "cases" / "office_rc_01.json"));
  EXPECT_EQ(TestCase::from_json(doc).characters.front(), "Tom");
  doc.erase("expected");
  EXPECT_THROW(TestCase::from_json(doc), SchemaError);
}

TEST(Benchmark, ShippedCasesPassEveryRepeat) {
  const auto cases = load_cases(data_dir() / "cases");
  ASSERT_EQ(cases.size(), 12u);
  BenchConfig config;
  const auto results = run_benchmark(cases, config);
  for (const auto& cr : results) {
    ASSERT_EQ(cr.runs.size(), 5u) << cr.id;
    for (const auto& r : cr.runs) EXPECT_TRUE(r.passed) << cr.id << " trial " << r.trial << ": " << r.detail;
  }
  const auto table = report_table(results, "mock");
  EXPECT_EQ(table,
            "Metrics | Total | OA | RC | SS | PI\n"
            "mock | 1.0 (1.0) | 1.0 (1.0) | 1.0 (1.0) | 1.0 (1.0) | 1.0 (1.0)\n");
}

TEST(Benchmark, BrokenMockGivesMixedCell) {
  BenchConfig config;
  const auto results = run_benchmark(load_cases(data_dir() / "cases_flaky"), config);
  ASSERT_EQ(results.size(), 1u);
  const auto t = tally(results).at("Total");
  EXPECT_EQ(format_cell(t), "0.8 (0.8)");
  int failures = 0;
  for (const auto& r : results.front().runs) {
    if (r.passed) continue;
    ++failures;
    EXPECT_FALSE(r.executed);
    EXPECT_EQ(r.failure, Failure::RuntimeError);
  }
  EXPECT_EQ(failures, 1);
}

TEST(Benchmark, UnknownObjectIsAnExecutionFailure) {
  auto mock = tom_coffee_mock(
      "    tom = get_character(\"Tom\")\n"
      "    tom.set_position(get_area_to_interact_with(\"espresso_machine_9\"))\n"
      "    tom.set_target_action(\"make_coffee\")\n"
      "    return [tom]\n",
      3);
  auto ctx = context_for(mock, {"An office."});
  const auto runs = run_case(office_case("office_rc_01"), ctx, 1);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_FALSE(runs[0].executed);
  EXPECT_EQ(runs[0].failure, Failure::RuntimeError);
}

TEST(Benchmark, EventWithoutTargetIsNoPlan) {
  llm::MockBackend mock({{llm::Role::Narrator, "Reasoning: x\nEvent: Mia reads at the desk.\nParticipants: Mia"}},
                        true);
  auto ctx = context_for(mock, {"An office."});
  const auto runs = run_case(office_case("office_rc_01"), ctx, 2);
  for (const auto& r : runs) {
    EXPECT_TRUE(r.executed);
    EXPECT_EQ(r.failure, Failure::NoPlan);
  }
}

TEST(Benchmark, EachTrialUsesItsOwnDescriptionVariant) {
  auto mock = tom_coffee_mock(kGoodBody, 1);
  auto ctx = context_for(mock, {"VARIANT-0 office.", "VARIANT-1 office.", "VARIANT-2 office."});
  const auto runs = run_case(office_case("office_rc_01"), ctx, 5);
  ASSERT_EQ(runs.size(), 5u);
  std::vector<std::string> seen;
  for (const auto& req : mock.requests()) {
    if (req.role != llm::Role::Narrator) continue;
    std::smatch m;
    const std::string& user = req.messages.back().content;
    ASSERT_TRUE(std::regex_search(user, m, std::regex("VARIANT-\\d")));
    seen.push_back(m.str());
  }
  EXPECT_EQ(seen, (std::vector<std::string>{"VARIANT-0", "VARIANT-1", "VARIANT-2", "VARIANT-0", "VARIANT-1"}));
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(runs[static_cast<std::size_t>(k)].trial, k);
    EXPECT_TRUE(runs[static_cast<std::size_t>(k)].passed) << runs[static_cast<std::size_t>(k)].detail;
  }
}

TEST(Report, RatesRoundHalfUp) {
  EXPECT_EQ(format_rate(9, 10), "0.9");
  EXPECT_EQ(format_rate(10, 10), "1.0");
  EXPECT_EQ(format_rate(13, 15), "0.87");
  EXPECT_EQ(format_rate(0, 5), "0.0");
  EXPECT_EQ(format_rate(1, 200), "0.01");
  EXPECT_EQ(format_rate(2, 3), "0.67");
  EXPECT_EQ(format_rate(1, 20), "0.05");
  EXPECT_EQ(format_rate(0, 0), "-");
  EXPECT_EQ(format_cell(Tally{10, 9, 10}), "0.9 (1.0)");
}

TEST(Report, EmptyResultsGiveHeaderOnly) {
  EXPECT_EQ(report_table({}, "mock"), "Metrics | Total | OA | RC | SS | PI\n");
  EXPECT_EQ(report_rows({}), "");
}

TEST(Report, RepeatsAverageAndTagsCountTwice) {
  const auto run = [](bool passed, bool executed) {
    RunResult r;
    r.passed = passed;
    r.executed = executed;
    return r;
  };
  // Five repeats each; the second case carries two tags.
  std::vector<CaseResult> results = {
      {"a", {llm::Tag::OA}, {run(true, true), run(true, true), run(false, true), run(true, true), run(true, true)}},
      {"b",
       {llm::Tag::RC, llm::Tag::PI},
       {run(false, false), run(true, true), run(true, true), run(false, true), run(true, true)}},
  };
  const auto t = tally(results);
  EXPECT_EQ(format_cell(t.at("Total")), "0.7 (0.9)");
  EXPECT_EQ(format_cell(t.at("OA")), "0.8 (1.0)");
  EXPECT_EQ(format_cell(t.at("RC")), "0.6 (0.8)");
  EXPECT_EQ(format_cell(t.at("PI")), "0.6 (0.8)");
  EXPECT_FALSE(t.contains("SS"));
  EXPECT_EQ(report_table(results, "x"),
            "Metrics | Total | OA | RC | SS | PI\nx | 0.7 (0.9) | 0.8 (1.0) | 0.6 (0.8) | - | 0.6 (0.8)\n");

  const auto rows = report_rows(results);
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 10);
  const auto first = nlohmann::json::parse(rows.substr(0, rows.find('\n')));
  EXPECT_EQ(first["case"], "a");
  EXPECT_EQ(first["passed"], true);
}

TEST(Descriptions, LoadsEveryVariant) {
  const auto d = load_descriptions(data_dir() / "descriptions", "office");
  EXPECT_EQ(d.size(), 5u);
  EXPECT_NE(d[0], d[1]);
  EXPECT_THROW(load_descriptions(data_dir() / "descriptions", "castle"), SchemaError);
}
