#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evoforge/operators/backend.hpp"
#include "evoforge/operators/parse.hpp"
#include "evoforge/operators/render.hpp"
#include "evoforge/operators/template.hpp"
#include "evoforge/rng.hpp"

namespace evoforge::ops {

struct GenerationSettings {
  std::string brief;
  std::vector<std::string> interpretations;
  std::vector<std::string> focus_list;
  std::size_t max_length = 1024;
  double temperature = 1.0;
  /// Re-prompts after a MalformedResponse before GenerationFailed.
  std::size_t malformed_retries = 2;
};

GenerationSettings generation_settings(const CampaignConfig& config);

/// Initialization, recombination and mutation as render -> complete -> parse.
///
/// Oversized sections (beyond 1.25x their limit) trigger one re-prompt;
/// if the second answer still overshoots, those sections are truncated at a
/// sentence boundary.
class OperatorSuite {
 public:
  OperatorSuite(OperatorTemplates templates, CompletionBackend& backend,
                GenerationSettings settings, Sleeper sleep = real_sleeper());

  ConceptDraft random_individual(Rng& rng);
  ConceptDraft recombine(const ConceptDraft& a, const ConceptDraft& b, Rng& rng);
  ConceptDraft mutate(const ConceptDraft& parent, std::string_view focus, Rng& rng);

  /// Parses free text (e.g. a human seed) against the init schema.
  ConceptDraft parse_seed(std::string_view text) const;

  const OperatorTemplates& templates() const noexcept { return templates_; }
  const GenerationSettings& settings() const noexcept { return settings_; }
  std::size_t completions() const noexcept { return completions_; }

 private:
  ConceptDraft generate(const std::string& prompt, OperatorCall call,
                        const std::vector<SectionSpec>& schema, Rng& rng);

  OperatorTemplates templates_;
  CompletionBackend& backend_;
  GenerationSettings settings_;
  Sleeper sleep_;
  std::size_t completions_ = 0;
};

/// True when some section overshoots its limit by more than the tolerance band.
bool exceeds_length_band(const ConceptDraft& draft);

/// Truncates every overshooting section to its char limit.
ConceptDraft enforce_length_limits(ConceptDraft draft);

}  // namespace evoforge::ops
