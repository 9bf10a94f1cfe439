#include "evoforge/operators/mock_backend.hpp"

#include <algorithm>
#include <set>

#include "evoforge/errors.hpp"
#include "evoforge/rng.hpp"
#include "evoforge/text.hpp"

namespace evoforge::ops {

namespace {

constexpr std::string_view kTwistOpen = " [twist: ";

const std::vector<SectionSpec>& default_schema() {
  static const std::vector<SectionSpec> schema{{"name of the game", 0},
                                               {"game concept", 1000},
                                               {"game resources", 0},
                                               {"level design", 300},
                                               {"game instructions", 300}};
  return schema;
}

std::string capitalize(std::string word) {
  if (!word.empty() && word[0] >= 'a' && word[0] <= 'z') {
    word[0] = static_cast<char>(word[0] - 'a' + 'A');
  }
  return word;
}

// Sentence shapes per section slot; {0} and {1} are keywords.
const std::vector<std::string>& phrases() {
  static const std::vector<std::string> p{
      "The player guides a single pixel through a world of {0} and {1}.",
      "Every level mixes {0} with {1} under one-button controls.",
      "Only a {0} sprite, a {1} backdrop and a single tone are needed.",
      "Stages grow from a lone {0} toward a field of {1}.",
      "Press the key to trigger the {0}; release it to calm the {1}.",
      "Win by linking each {0} to a {1} before time runs out.",
  };
  return p;
}

std::string fill_shape(std::string_view shape, std::string_view a, std::string_view b) {
  std::string out(shape);
  auto put = [&](std::string_view slot, std::string_view value) {
    const auto pos = out.find(slot);
    if (pos != std::string::npos) out.replace(pos, slot.size(), value);
  };
  put("{0}", a);
  put("{1}", b);
  return out;
}

std::vector<std::string> stems(std::string_view phrase) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (current.size() > 3 && current.back() == 's') current.pop_back();
    if (current != "the" && current != "of" && current != "a") words.push_back(current);
    current.clear();
  };
  for (char raw : phrase) {
    const char c = (raw >= 'A' && raw <= 'Z') ? static_cast<char>(raw - 'A' + 'a') : raw;
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      current.push_back(c);
    } else if (c != '\'') {
      flush();
    }
  }
  flush();
  return words;
}

std::string focus_slug(std::string_view focus) {
  std::string slug;
  for (const std::string& w : stems(focus)) {
    if (!slug.empty()) slug.push_back('-');
    slug += w;
  }
  return slug;
}

std::string strip_twist(std::string_view text) {
  const auto pos = text.find(kTwistOpen);
  return std::string(pos == std::string_view::npos ? text : text.substr(0, pos));
}

// Lowercased last word of an existing " [twist: ...]" suffix, or "".
std::string twist_keyword(std::string_view text) {
  const auto pos = text.find(kTwistOpen);
  if (pos == std::string_view::npos) return {};
  std::string_view tail = text.substr(pos + kTwistOpen.size());
  if (!tail.empty() && tail.back() == ']') tail.remove_suffix(1);
  const auto space = tail.rfind(' ');
  if (space != std::string_view::npos) tail = tail.substr(space + 1);
  return text::to_lower_ascii(tail);
}

std::vector<Section> sections_for(const ConceptDraft& parent,
                                  const std::vector<SectionSpec>& schema) {
  std::vector<Section> out;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    Section s{schema[i].label, {}, schema[i].char_limit};
    if (i < parent.sections.size()) s.text = parent.sections[i].text;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::size_t focus_section_index(std::string_view focus, std::span<const Section> sections) {
  if (sections.empty()) return 0;
  const auto focus_words = stems(focus);
  const std::set<std::string> focus_set(focus_words.begin(), focus_words.end());
  std::size_t best = sections.size();
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const auto label = stems(sections[i].label);
    if (label.empty()) continue;
    const bool all = std::all_of(label.begin(), label.end(),
                                 [&](const std::string& w) { return focus_set.count(w) > 0; });
    if (all && label.size() > best_len) {
      best = i;
      best_len = label.size();
    }
  }
  if (best < sections.size()) return best;
  if (sections.size() == 1) return 0;
  return 1 + static_cast<std::size_t>(text::fnv1a64(focus) % (sections.size() - 1));
}

MockBackend::MockBackend(std::uint64_t seed, RetryPolicy retry) : seed_(seed) {
  profile_.name = "mock";
  profile_.model = "mock-" + std::to_string(seed);
  profile_.retry = std::move(retry);
}

const std::vector<std::string>& MockBackend::keyword_pool() {
  static const std::vector<std::string> pool{
      "echo",  "shadow", "mirror", "island", "ember",  "tide",   "lantern", "root",
      "orbit", "glyph",  "pulse",  "prism",  "comet",  "moss",   "rune",    "spiral",
      "canyon", "signal", "frost", "bloom",  "thread", "vortex", "beacon",  "quartz"};
  return pool;
}

std::string MockBackend::attempt(const CompletionRequest& request) {
  ++calls_;
  switch (request.call.kind) {
    case OperatorKind::kInit: return init_text(request);
    case OperatorKind::kCrossover: return crossover_text(request);
    case OperatorKind::kMutation: return mutation_text(request);
  }
  throw Error(ErrorCode::kBackendFailure, "mock: unknown operator");
}

std::string MockBackend::init_text(const CompletionRequest& request) const {
  const auto& schema = request.call.schema.empty() ? default_schema() : request.call.schema;
  Rng rng(Rng::derive(seed_, "mock-init", request.variation_seed));
  const auto& pool = keyword_pool();
  auto keyword = [&] { return pool[rng.uniform_index(pool.size())]; };

  std::vector<Section> sections;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    Section s{schema[i].label, {}, schema[i].char_limit};
    if (i == 0) {
      const std::string first = keyword();
      s.text = capitalize(first) + " " + capitalize(keyword());
    } else {
      const std::string& shape = phrases()[rng.uniform_index(phrases().size())];
      const std::string first = keyword();
      s.text = fill_shape(shape, first, keyword());
    }
    sections.push_back(std::move(s));
  }
  return format_concept(sections);
}

std::string MockBackend::crossover_text(const CompletionRequest& request) const {
  const auto& call = request.call;
  if (call.parents.size() != 2) {
    throw Error(ErrorCode::kBackendFailure, "mock crossover needs two parents");
  }
  const auto& schema = call.schema.empty() ? default_schema() : call.schema;
  const auto a = sections_for(call.parents[0], schema);
  const auto b = sections_for(call.parents[1], schema);

  std::vector<Section> out;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const Section& from_a = a[i];
    const Section& from_b = b[i];
    Section s = (i % 2 == 0) ? from_a : from_b;
    if (s.text.empty()) s.text = (i % 2 == 0) ? from_b.text : from_a.text;
    out.push_back(std::move(s));
  }

  // Name: words of A's name, then B's words not already present.
  std::vector<std::string> words;
  std::set<std::string> seen;
  for (const std::string& name : {a[0].text, b[0].text}) {
    std::string word;
    auto flush = [&] {
      if (!word.empty() && seen.insert(text::to_lower_ascii(word)).second) words.push_back(word);
      word.clear();
    };
    for (char c : name) {
      if (c == ' ') flush();
      else word.push_back(c);
    }
    flush();
  }
  std::string name;
  for (const std::string& w : words) {
    if (!name.empty()) name.push_back(' ');
    name += w;
  }
  out[0].text = name;
  return format_concept(out);
}

std::string MockBackend::mutation_text(const CompletionRequest& request) const {
  const auto& call = request.call;
  if (call.parents.size() != 1) {
    throw Error(ErrorCode::kBackendFailure, "mock mutation needs one parent");
  }
  const auto& schema = call.schema.empty() ? default_schema() : call.schema;
  auto sections = sections_for(call.parents[0], schema);
  const std::size_t target = focus_section_index(call.focus, sections);

  Rng rng(Rng::derive(seed_, "mock-mutation",
                      request.variation_seed ^ text::fnv1a64(call.parents[0].body)));
  Section& s = sections[target];
  const std::string previous = twist_keyword(s.text);

  // Draw from the pool minus the current twist keyword so the section always changes.
  std::vector<std::string> choices;
  for (const std::string& k : keyword_pool()) {
    if (k != previous) choices.push_back(k);
  }
  const std::string& keyword = choices[rng.uniform_index(choices.size())];

  std::string base = strip_twist(s.text);
  if (target == 0) {
    s.text = base + std::string(kTwistOpen) + capitalize(keyword) + "]";
  } else {
    s.text = base + std::string(kTwistOpen) + focus_slug(call.focus) + " " + keyword + "]";
  }
  return format_concept(sections);
}

}  // namespace evoforge::ops
