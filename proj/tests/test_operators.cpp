#include "support.hpp"

#include <httplib.h>

#include <map>
#include <thread>

#include "evoforge/errors.hpp"
#include "evoforge/operators/http_backend.hpp"
#include "evoforge/text.hpp"

using namespace evoforge;
using namespace evoforge::ops;

namespace {

const std::vector<std::string> kFixtures{"soundscape.txt", "echoes.txt", "echoscape.txt",
                                         "echosound_response.txt",
                                         "echoes_in_time_response.txt"};

PromptTemplate example_template(const std::string& family, const std::string& kind) {
  return load_template(testing::source_dir() / "assets" / "templates" / family / (kind + ".txt"));
}

// Reference reader for the "**Label**: text" paragraphs used by the fixtures.
std::vector<std::pair<std::string, std::string>> bold_sections(const std::string& doc) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  while (pos < doc.size()) {
    std::size_t end = doc.find("\n\n", pos);
    if (end == std::string::npos) end = doc.size();
    std::string para = doc.substr(pos, end - pos);
    pos = end + 2;
    while (!para.empty() && (para.back() == '\n' || para.back() == ' ')) para.pop_back();
    if (para.rfind("**", 0) != 0) continue;
    const auto close = para.find("**", 2);
    const std::string label = para.substr(2, close - 2);
    std::size_t body = close + 2;
    while (body < para.size() && (para[body] == ':' || para[body] == ' ')) ++body;
    out.emplace_back(label, para.substr(body));
  }
  return out;
}

std::string lower(std::string s) { return text::to_lower_ascii(s); }

std::string render_variant(const std::vector<std::pair<std::string, std::string>>& sections,
                           int style) {
  std::string out;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const auto& [label, body] = sections[i];
    const std::string n = std::to_string(i + 1);
    switch (style) {
      case 0: out += "**" + label + "**: " + body; break;
      case 1: out += n + ") " + label + ": " + body; break;
      case 2: out += n + ". " + label + " - " + body; break;
      case 3: out += "### " + label + "\n" + body; break;
      case 4: out += label + ": " + body; break;
      case 5: out += "- **" + lower(label) + ":** " + body; break;
    }
    out += "\n\n";
  }
  return out;
}

class ScriptedBackend final : public CompletionBackend {
 public:
  explicit ScriptedBackend(std::vector<std::function<std::string(const CompletionRequest&)>> steps,
                           RetryPolicy retry = {})
      : steps_(std::move(steps)) {
    profile_.name = "scripted";
    profile_.retry = std::move(retry);
  }
  const BackendProfile& profile() const override { return profile_; }
  std::string attempt(const CompletionRequest& request) override {
    attempts.push_back(request.attempt);
    const auto& step = steps_[std::min(calls++, steps_.size() - 1)];
    return step(request);
  }
  std::size_t calls = 0;
  std::vector<int> attempts;

 private:
  std::vector<std::function<std::string(const CompletionRequest&)>> steps_;
  BackendProfile profile_;
};

std::string fail_transient(const CompletionRequest&) { throw TransientBackendError("HTTP 503"); }
std::string fail_timeout(const CompletionRequest&) { throw BackendTimeout("read timeout"); }

}  // namespace

TEST_CASE("shipped templates load with the markers their kind needs") {
  for (const std::string family : {"minimalist", "boardgame", "roots"}) {
    const auto init = example_template(family, "init");
    const auto cross = example_template(family, "crossover");
    const auto mut = example_template(family, "mutation");
    CHECK(init.kind == TemplateKind::kInit);
    CHECK(cross.kind == TemplateKind::kCrossover);
    CHECK(mut.kind == TemplateKind::kMutation);
    CHECK(init.markers.count(Marker::kBrief) == 1);
    CHECK(cross.markers == std::set<Marker>{Marker::kBrief, Marker::kIndividual,
                                            Marker::kIndividual2});
    CHECK(mut.markers == std::set<Marker>{Marker::kBrief, Marker::kIndividual, Marker::kMutation});
    for (const auto* t : {&init, &cross, &mut}) {
      CHECK(template_violations(*t).empty());
      CHECK_FALSE(t->section_schema.empty());
      CHECK(t->section_schema == init.section_schema);
    }
  }
  CHECK(example_template("roots", "init").markers.count(Marker::kInterpretation) == 1);
  CHECK(example_template("minimalist", "init").section_schema[1] ==
        SectionSpec{"game concept", 1000});
}

TEST_CASE("templates with the wrong marker set are rejected") {
  CHECK_THROWS_AS(make_template(TemplateKind::kCrossover, "<BRIEF> <INDIVIDUAL>", {{"name", 0}}),
                  Error);
  CHECK_THROWS_AS(make_template(TemplateKind::kMutation, "<BRIEF> <INDIVIDUAL>", {{"name", 0}}),
                  Error);
  CHECK_NOTHROW(make_template(TemplateKind::kMutation, "<BRIEF> <INDIVIDUAL> <MUTATION>",
                              {{"name", 0}}));
  try {
    load_templates("/nonexistent/init.txt", "/nonexistent/c.txt", "/nonexistent/m.txt");
    FAIL("missing template accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidTemplate);
    CHECK(std::string(e.what()).find("/nonexistent/init.txt") != std::string::npos);
  }
}

TEST_CASE("init prompt draws interpretations uniformly") {
  const auto config = testing::example_config("roots");
  const auto tmpl = example_template("roots", "init");
  REQUIRE(config.interpretations.size() == 4);
  Rng rng(99);
  std::map<std::string, int> counts;
  for (int i = 0; i < 1000; ++i) {
    const auto prompt = render_init_prompt(tmpl, config.brief, config.interpretations, rng);
    CHECK_FALSE(has_unresolved_markers(prompt.text));
    int hits = 0;
    for (const auto& interp : config.interpretations) {
      if (prompt.text.find("roots: " + interp + "\"") != std::string::npos) {
        ++counts[interp];
        ++hits;
      }
    }
    CHECK(hits == 1);
    CHECK(prompt.text.find(config.brief) != std::string::npos);
  }
  for (const auto& interp : config.interpretations) {
    CHECK(counts[interp] >= 200);
    CHECK(counts[interp] <= 300);
  }
  try {
    render_init_prompt(tmpl, config.brief, {}, rng);
    FAIL("missing interpretations accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingInterpretationList);
  }
  CHECK_THROWS_AS(render_init_prompt(tmpl, "  ", config.interpretations, rng), Error);
}

TEST_CASE("crossover prompt embeds both parents and keeps the instructions") {
  const auto config = testing::example_config("minimalist");
  const auto tmpl = example_template("minimalist", "crossover");
  const std::string a = testing::read_text(testing::fixture("soundscape.txt"));
  const std::string b = testing::read_text(testing::fixture("echoes.txt"));
  const auto prompt = render_crossover_prompt(tmpl, config.brief, a, b);
  CHECK(prompt.warnings.empty());
  CHECK(prompt.text.rfind(config.brief, 0) == 0);
  CHECK(testing::count_occurrences(prompt.text, a) == 1);
  CHECK(testing::count_occurrences(prompt.text, b) == 1);
  CHECK(prompt.text.find(a) < prompt.text.find(b));
  CHECK(prompt.text.find("In your response do not include any introduction or final comment.") !=
        std::string::npos);
  CHECK(prompt.text.find("avoid references to the two games recombined") != std::string::npos);
  CHECK_FALSE(has_unresolved_markers(prompt.text));

  const auto empty_brief = render_crossover_prompt(tmpl, "", a, b);
  CHECK(empty_brief.warnings.size() == 1);

  try {
    render_crossover_prompt(tmpl, config.brief, a, a);
    FAIL("identical parents accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIdenticalParents);
  }
  GameConcept p;
  p.id = ConceptId("c-1");
  p.body = a;
  GameConcept q = p;
  q.body = b;
  CHECK_THROWS_AS(render_crossover_prompt(tmpl, config.brief, p, q), Error);
}

TEST_CASE("mutation prompt requires a listed focus") {
  const auto config = testing::example_config("minimalist");
  const auto tmpl = example_template("minimalist", "mutation");
  const std::string body = testing::read_text(testing::fixture("echoscape.txt"));
  const auto prompt = render_mutation_prompt(tmpl, config.brief, body, "the level design",
                                             config.mutation_focus_list);
  CHECK(prompt.text.find("by changing only the level design.") != std::string::npos);
  CHECK(testing::count_occurrences(prompt.text, body) == 1);
  try {
    render_mutation_prompt(tmpl, config.brief, body, "the soundtrack", config.mutation_focus_list);
    FAIL("unlisted focus accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFocusNotInList);
  }
}

TEST_CASE("substituted text never leaves an unresolved marker") {
  const auto cross = example_template("minimalist", "crossover");
  const auto mut = example_template("minimalist", "mutation");
  const std::vector<std::string> pieces{"<BRIEF>", "<INDIVIDUAL>", "<INDIVIDUAL_2>", "<MUTATION>",
                                        "<INTERPRETATION>", "<", ">", "<INDI", "VIDUAL>", "_2>",
                                        "BRIEF", "word ", "\n", "ü"};
  const std::vector<std::string> tokens{"<BRIEF>", "<INDIVIDUAL>", "<INDIVIDUAL_2>", "<MUTATION>",
                                        "<INTERPRETATION>"};
  std::mt19937_64 gen(4);
  auto random_text = [&] {
    std::string s = "x";
    const std::size_t n = gen() % 12;
    for (std::size_t i = 0; i < n; ++i) s += pieces[gen() % pieces.size()];
    return s;
  };
  const std::vector<std::string> focus{"the goal of the game"};
  for (int i = 0; i < 2000; ++i) {
    const std::string brief = random_text();
    const std::string a = random_text() + "a";
    const std::string b = random_text() + "b";
    std::string text = (i % 2 == 0) ? render_crossover_prompt(cross, brief, a, b).text
                                    : render_mutation_prompt(mut, brief, a, focus[0], focus).text;
    for (const auto& t : tokens) CHECK(text.find(t) == std::string::npos);
  }
}

TEST_CASE("complete retries transient failures up to the attempt budget") {
  std::vector<std::chrono::milliseconds> slept;
  auto sleeper = [&](std::chrono::milliseconds d) { slept.push_back(d); };
  {
    ScriptedBackend backend({fail_transient, fail_transient,
                             [](const CompletionRequest&) { return std::string("ok"); }});
    const auto r = complete(backend, CompletionRequest{}, sleeper);
    CHECK(r.text == "ok");
    CHECK(r.attempts == 3);
    CHECK(backend.attempts == std::vector<int>{1, 2, 3});
    CHECK(slept == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(500),
                                                          std::chrono::milliseconds(2000)});
  }
  {
    ScriptedBackend backend({fail_transient});
    try {
      complete(backend, CompletionRequest{}, sleeper);
      FAIL("exhaustion not reported");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kBackendFailure);
    }
    CHECK(backend.calls == 3);
  }
  {
    ScriptedBackend backend({fail_timeout});
    try {
      complete(backend, CompletionRequest{}, sleeper);
      FAIL("exhaustion not reported");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kTimeout);
    }
  }
  {
    ScriptedBackend backend({[](const CompletionRequest&) -> std::string {
      throw Error(ErrorCode::kAuthError, "no key");
    }});
    CHECK_THROWS_AS(complete(backend, CompletionRequest{}, sleeper), Error);
    CHECK(backend.calls == 1);
  }
}

TEST_CASE("http backend speaks the chat completion shape") {
  httplib::Server server;
  std::mutex mu;
  nlohmann::json last_body;
  std::string last_auth;
  std::string mode = "ok";
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    last_body = nlohmann::json::parse(req.body);
    last_auth = req.get_header_value("Authorization");
    if (mode == "ok") {
      res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"Name: X"}}]})",
                      "application/json");
    } else if (mode == "busy") {
      res.status = 503;
    } else if (mode == "denied") {
      res.status = 401;
    } else {
      res.set_content(R"({"unexpected":true})", "application/json");
    }
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  BackendProfile profile;
  profile.name = "fake";
  profile.base_url = "http://127.0.0.1:" + std::to_string(port);
  profile.model = "test-model";
  profile.api_key_env = "FAKE_KEY";
  profile.timeout = std::chrono::milliseconds(5000);
  HttpChatBackend backend(profile, [](const std::string& name) -> std::optional<std::string> {
    if (name == "FAKE_KEY") return std::string("sekrit");
    return std::nullopt;
  });

  CompletionRequest request;
  request.prompt = "describe a game";
  request.temperature = 0.5;
  request.max_length = 321;
  request.variation_seed = 77;
  CHECK(backend.attempt(request) == "Name: X");
  {
    std::lock_guard lock(mu);
    CHECK(last_auth == "Bearer sekrit");
    CHECK(last_body["model"] == "test-model");
    CHECK(last_body["messages"][0]["role"] == "user");
    CHECK(last_body["messages"][0]["content"] == "describe a game");
    CHECK(last_body["temperature"] == 0.5);
    CHECK(last_body["max_tokens"] == 321);
    CHECK(last_body["seed"] == 77);
    mode = "busy";
  }
  CHECK_THROWS_AS(backend.attempt(request), TransientBackendError);
  {
    std::lock_guard lock(mu);
    mode = "denied";
  }
  try {
    backend.attempt(request);
    FAIL("401 not reported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kAuthError);
  }
  {
    std::lock_guard lock(mu);
    mode = "garbage";
  }
  try {
    backend.attempt(request);
    FAIL("bad shape accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBackendFailure);
  }
  server.stop();
  thread.join();

  HttpChatBackend keyless(profile, [](const std::string&) { return std::nullopt; });
  try {
    keyless.attempt(request);
    FAIL("missing credential accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kAuthError);
    CHECK(std::string(e.what()).find("FAKE_KEY") != std::string::npos);
  }
  // Unreachable host is transient.
  profile.base_url = "http://127.0.0.1:1";
  HttpChatBackend dead(profile, [](const std::string&) { return std::string("k"); });
  CHECK_THROWS(dead.attempt(request));
}

TEST_CASE("parser recovers the appendix texts in every header style") {
  const auto schema = example_template("minimalist", "init").section_schema;
  for (const auto& name : kFixtures) {
    const std::string doc = testing::read_text(testing::fixture(name));
    const auto expected = bold_sections(doc);
    REQUIRE(expected.size() == schema.size());
    for (int style = 0; style < 6; ++style) {
      for (const bool noise : {false, true}) {
        std::string raw = render_variant(expected, style);
        if (noise) {
          raw = "Sure! Here is a concept for a new game.\n\n" + raw +
                "I hope you enjoy this game concept! Let me know if you want changes.\n";
        }
        CAPTURE(name);
        CAPTURE(style);
        const auto draft = parse_concept(raw, schema);
        REQUIRE(draft.sections.size() == schema.size());
        for (std::size_t i = 0; i < schema.size(); ++i) {
          CHECK(draft.sections[i].label == schema[i].label);
          CHECK(draft.sections[i].text == expected[i].second);
        }
      }
    }
    const auto direct = parse_concept(doc, schema);
    CHECK(recognized_sections(direct) == schema.size());
  }
}

TEST_CASE("parser rejects responses without enough sections") {
  const auto schema = example_template("minimalist", "init").section_schema;
  for (const std::string raw : {"", "   \n\n", "I cannot help with that request.",
                                "Name of the game: Solo\n\nnothing else here"}) {
    try {
      parse_concept(raw, schema);
      FAIL("malformed response accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kMalformedResponse);
    }
  }
  CHECK_NOTHROW(parse_concept("Name of the game: A\nGame concept: B\nLevel design: C", schema));
}

TEST_CASE("format and parse round trip") {
  const auto config = testing::example_config("boardgame");
  testing::MockOps ops(config);
  const auto& schema = ops.suite.templates().init.section_schema;
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const auto draft = ops.suite.random_individual(rng);
    CHECK(draft.body == format_concept(draft.sections));
    CHECK(parse_concept(draft.body, schema) == draft);
  }
}

TEST_CASE("mock answers are deterministic and follow the merge and mutation rules") {
  const auto config = testing::example_config("minimalist");
  testing::MockOps ops(config);
  Rng rng(5);
  const auto a = ops.suite.random_individual(rng);
  const auto b = ops.suite.random_individual(rng);
  REQUIRE(a != b);

  CompletionRequest req;
  req.variation_seed = 31;
  req.call = OperatorCall{OperatorKind::kCrossover, {a, b}, {}, ops.suite.templates().crossover.section_schema};
  MockBackend other(config.backend.mock_seed);
  CHECK(ops.backend.attempt(req) == other.attempt(req));

  const auto child = ops.suite.recombine(a, b, rng);
  for (std::size_t i = 1; i < child.sections.size(); ++i) {
    CHECK(child.sections[i].text == (i % 2 == 0 ? a : b).sections[i].text);
  }
  for (const auto* parent : {&a, &b}) {
    std::istringstream words(parent->sections[0].text);
    for (std::string w; words >> w;) CHECK(child.sections[0].text.find(w) != std::string::npos);
  }

  for (const auto& focus : config.mutation_focus_list) {
    const auto mutated = ops.suite.mutate(a, focus, rng);
    const std::size_t target = focus_section_index(focus, a.sections);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < a.sections.size(); ++i) {
      if (mutated.sections[i].text != a.sections[i].text) {
        ++changed;
        CHECK(i == target);
      }
    }
    CHECK(changed == 1);
  }
  CHECK(a.sections[focus_section_index("the level design", a.sections)].label == "level design");
}

TEST_CASE("oversized answers are re-prompted once and then truncated") {
  const auto config = testing::example_config("minimalist");
  const auto templates = load_templates(config.templates.init, config.templates.crossover,
                                        config.templates.mutation);
  const std::string huge(2000, 'a');
  const std::string fine = "Name of the game: Tiny\n\nGame concept: Short.\n\nLevel design: Few.";
  std::string oversized = "Name of the game: Big\n\nGame concept: ";
  for (int i = 0; i < 200; ++i) oversized += "A long sentence here. ";
  oversized += "\n\nLevel design: ok.";

  {
    ScriptedBackend backend({[&](const CompletionRequest&) { return oversized; },
                             [&](const CompletionRequest&) { return fine; }});
    OperatorSuite suite(templates, backend, generation_settings(config), [](auto) {});
    Rng rng(1);
    const auto d = suite.random_individual(rng);
    CHECK(backend.calls == 2);
    CHECK(d.sections[0].text == "Tiny");
  }
  {
    ScriptedBackend backend({[&](const CompletionRequest&) { return oversized; }});
    OperatorSuite suite(templates, backend, generation_settings(config), [](auto) {});
    Rng rng(1);
    const auto d = suite.random_individual(rng);
    CHECK(backend.calls == 2);
    CHECK(text::utf8_length(d.sections[1].text) <= 1000);
    CHECK(d.sections[1].text.back() == '.');
    CHECK_FALSE(exceeds_length_band(d));
  }
  {
    ScriptedBackend backend({[&](const CompletionRequest&) { return std::string("nope"); }});
    OperatorSuite suite(templates, backend, generation_settings(config), [](auto) {});
    Rng rng(1);
    try {
      suite.random_individual(rng);
      FAIL("garbage accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kGenerationFailed);
    }
    CHECK(backend.calls == config.malformed_retries + 1);
  }
}

TEST_CASE("free-form seeds keep their text") {
  const auto config = testing::example_config("minimalist");
  testing::MockOps ops(config);
  const auto d = ops.suite.parse_seed("  a game about falling leaves  ");
  CHECK(d.sections[1].text == "a game about falling leaves");
  const auto structured = ops.suite.parse_seed(testing::read_text(testing::fixture("soundscape.txt")));
  CHECK(structured.sections[0].text == "Soundscape");
}
