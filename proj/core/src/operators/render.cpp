#include "evoforge/operators/render.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "evoforge/errors.hpp"
#include "evoforge/text.hpp"

namespace evoforge::ops {

namespace {

constexpr std::array<Marker, 5> kMarkers{Marker::kBrief, Marker::kIndividual,
                                         Marker::kIndividual2, Marker::kMutation,
                                         Marker::kInterpretation};

// "<BRIEF>" inside user text becomes "‹BRIEF›". Partial tokens at either end
// ("...<BRI", "EF>...") are broken too, since they could join with adjacent
// template text into a marker.
std::string neutralize(std::string_view value) {
  std::string out(value);
  for (Marker m : kMarkers) {
    const std::string_view token = marker_token(m);
    const std::string inner(token.substr(1, token.size() - 2));
    const std::string replacement = "‹" + inner + "›";
    std::size_t pos = 0;
    while ((pos = out.find(token, pos)) != std::string::npos) {
      out.replace(pos, token.size(), replacement);
      pos += replacement.size();
    }
  }
  for (Marker m : kMarkers) {
    const std::string_view token = marker_token(m);
    for (std::size_t k = 1; k < token.size(); ++k) {
      if (out.size() >= k && std::string_view(out).substr(out.size() - k) == token.substr(0, k)) {
        out.replace(out.size() - k, 1, "‹");
        break;
      }
    }
    for (std::size_t k = 1; k < token.size(); ++k) {
      const std::string_view tail = token.substr(k);
      if (std::string_view(out).starts_with(tail)) {
        out.replace(tail.size() - 1, 1, "›");
        break;
      }
    }
  }
  return out;
}

std::string substitute(std::string_view tmpl, const std::map<Marker, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size() + 256);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool replaced = false;
    if (tmpl[i] == '<') {
      for (const auto& [marker, value] : values) {
        const std::string_view token = marker_token(marker);
        if (tmpl.substr(i, token.size()) == token) {
          out += neutralize(value);
          i += token.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(tmpl[i++]);
  }
  return out;
}

void expect_kind(const PromptTemplate& tmpl, TemplateKind kind) {
  if (tmpl.kind != kind) {
    throw Error(ErrorCode::kInvalidTemplate, "expected a " + std::string(to_string(kind)) +
                                                 " template, got " +
                                                 std::string(to_string(tmpl.kind)));
  }
}

void warn_on_empty_brief(std::string_view brief, RenderedPrompt& prompt) {
  if (text::trim(brief).empty()) prompt.warnings.emplace_back("brief is empty");
}

}  // namespace

bool has_unresolved_markers(std::string_view text) {
  return std::any_of(kMarkers.begin(), kMarkers.end(), [&](Marker m) {
    return text.find(marker_token(m)) != std::string_view::npos;
  });
}

RenderedPrompt render_init_prompt(const PromptTemplate& tmpl, std::string_view brief,
                                  std::span<const std::string> interpretations, Rng& rng) {
  expect_kind(tmpl, TemplateKind::kInit);
  if (text::trim(brief).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "init prompt requires a non-empty brief");
  }
  std::map<Marker, std::string> values{{Marker::kBrief, std::string(brief)}};
  if (tmpl.markers.count(Marker::kInterpretation)) {
    if (interpretations.empty()) {
      throw Error(ErrorCode::kMissingInterpretationList,
                  "template uses <INTERPRETATION> but no interpretations are configured");
    }
    values[Marker::kInterpretation] = interpretations[rng.uniform_index(interpretations.size())];
  }
  return RenderedPrompt{substitute(tmpl.text, values), {}};
}

RenderedPrompt render_crossover_prompt(const PromptTemplate& tmpl, std::string_view brief,
                                       std::string_view body_a, std::string_view body_b) {
  expect_kind(tmpl, TemplateKind::kCrossover);
  if (text::trim(body_a).empty() || text::trim(body_b).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "crossover parents must have non-empty bodies");
  }
  if (body_a == body_b) {
    throw Error(ErrorCode::kIdenticalParents, "crossover parents are identical");
  }
  RenderedPrompt prompt{substitute(tmpl.text, {{Marker::kBrief, std::string(brief)},
                                               {Marker::kIndividual, std::string(body_a)},
                                               {Marker::kIndividual2, std::string(body_b)}}),
                        {}};
  warn_on_empty_brief(brief, prompt);
  return prompt;
}

RenderedPrompt render_crossover_prompt(const PromptTemplate& tmpl, std::string_view brief,
                                       const GameConcept& parent_a,
                                       const GameConcept& parent_b) {
  if (parent_a.id == parent_b.id) {
    throw Error(ErrorCode::kIdenticalParents,
                "crossover parents are the same concept " + parent_a.id.str());
  }
  return render_crossover_prompt(tmpl, brief, parent_a.body, parent_b.body);
}

RenderedPrompt render_mutation_prompt(const PromptTemplate& tmpl, std::string_view brief,
                                      std::string_view body, std::string_view focus,
                                      std::span<const std::string> focus_list) {
  expect_kind(tmpl, TemplateKind::kMutation);
  if (std::find(focus_list.begin(), focus_list.end(), focus) == focus_list.end()) {
    throw Error(ErrorCode::kFocusNotInList,
                "mutation focus '" + std::string(focus) + "' is not in the focus list");
  }
  if (text::trim(body).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "mutation parent must have a non-empty body");
  }
  RenderedPrompt prompt{substitute(tmpl.text, {{Marker::kBrief, std::string(brief)},
                                               {Marker::kIndividual, std::string(body)},
                                               {Marker::kMutation, std::string(focus)}}),
                        {}};
  warn_on_empty_brief(brief, prompt);
  return prompt;
}

RenderedPrompt render_mutation_prompt(const PromptTemplate& tmpl, std::string_view brief,
                                      const GameConcept& parent, std::string_view focus,
                                      std::span<const std::string> focus_list) {
  return render_mutation_prompt(tmpl, brief, parent.body, focus, focus_list);
}

}  // namespace evoforge::ops
