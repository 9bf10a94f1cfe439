#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evoforge/domain.hpp"
#include "evoforge/operators/template.hpp"

namespace evoforge::ops {

/// Operator output before it gets an identity in a campaign.
struct ConceptDraft {
  std::vector<Section> sections;
  std::string body;

  friend bool operator==(const ConceptDraft&, const ConceptDraft&) = default;
};

ConceptDraft draft_of(const GameConcept& concept_);

/// Canonical text form, one "Label: text" paragraph per non-empty section.
std::string format_concept(std::span<const Section> sections);

/// Builds a draft whose body is the canonical form of `sections`.
ConceptDraft make_draft(std::vector<Section> sections);

/// Splits an LLM response into the sections of `schema`.
///
/// Headers are recognised in the common variants ("1) Name of the game:",
/// "2. Game concept -", "**Level design**:", "### Rules", "Name of the game:")
/// and matched to schema labels by word prefix. Text before the first header
/// and trailing sign-off paragraphs are dropped. Throws
/// Error(kMalformedResponse) when fewer than ceil(|schema|/2) sections have
/// content.
ConceptDraft parse_concept(std::string_view raw, std::span<const SectionSpec> schema);

/// Number of sections with non-empty text.
std::size_t recognized_sections(const ConceptDraft& draft);

}  // namespace evoforge::ops
