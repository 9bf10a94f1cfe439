#pragma once

// Marker substitution for the three operator prompts. Substitution is a
// single pass over the template; substituted values that themselves contain
// marker tokens are neutralised, so rendered prompts never carry an
// unresolved marker.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evoforge/domain.hpp"
#include "evoforge/operators/template.hpp"
#include "evoforge/rng.hpp"

namespace evoforge::ops {

struct RenderedPrompt {
  std::string text;
  std::vector<std::string> warnings;
};

/// True when `text` still contains any marker token.
bool has_unresolved_markers(std::string_view text);

/// Throws Error(kMissingInterpretationList) when the template uses
/// <INTERPRETATION> and `interpretations` is empty. The interpretation is
/// drawn uniformly with `rng` (no draw when the marker is absent).
RenderedPrompt render_init_prompt(const PromptTemplate& tmpl, std::string_view brief,
                                  std::span<const std::string> interpretations, Rng& rng);

/// Throws Error(kIdenticalParents) when both bodies are the same text.
RenderedPrompt render_crossover_prompt(const PromptTemplate& tmpl, std::string_view brief,
                                       std::string_view body_a, std::string_view body_b);

/// Same as above; parents are identical when their ids match.
RenderedPrompt render_crossover_prompt(const PromptTemplate& tmpl, std::string_view brief,
                                       const GameConcept& parent_a,
                                       const GameConcept& parent_b);

/// Throws Error(kFocusNotInList) when `focus` is not one of `focus_list`.
RenderedPrompt render_mutation_prompt(const PromptTemplate& tmpl, std::string_view brief,
                                      std::string_view body, std::string_view focus,
                                      std::span<const std::string> focus_list);

RenderedPrompt render_mutation_prompt(const PromptTemplate& tmpl, std::string_view brief,
                                      const GameConcept& parent, std::string_view focus,
                                      std::span<const std::string> focus_list);

}  // namespace evoforge::ops
