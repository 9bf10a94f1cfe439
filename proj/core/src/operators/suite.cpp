#include "evoforge/operators/suite.hpp"

#include "evoforge/errors.hpp"
#include "evoforge/text.hpp"

namespace evoforge::ops {

GenerationSettings generation_settings(const CampaignConfig& config) {
  return GenerationSettings{config.brief,
                            config.interpretations,
                            config.mutation_focus_list,
                            config.backend.max_length,
                            config.backend.temperature,
                            config.malformed_retries};
}

bool exceeds_length_band(const ConceptDraft& draft) {
  for (const Section& s : draft.sections) {
    if (s.char_limit == 0) continue;
    if (static_cast<double>(text::utf8_length(s.text)) >
        kSectionLengthTolerance * static_cast<double>(s.char_limit)) {
      return true;
    }
  }
  return false;
}

ConceptDraft enforce_length_limits(ConceptDraft draft) {
  for (Section& s : draft.sections) {
    if (s.char_limit == 0) continue;
    if (static_cast<double>(text::utf8_length(s.text)) >
        kSectionLengthTolerance * static_cast<double>(s.char_limit)) {
      s.text = text::truncate_at_sentence(s.text, s.char_limit);
    }
  }
  return make_draft(std::move(draft.sections));
}

OperatorSuite::OperatorSuite(OperatorTemplates templates, CompletionBackend& backend,
                             GenerationSettings settings, Sleeper sleep)
    : templates_(std::move(templates)),
      backend_(backend),
      settings_(std::move(settings)),
      sleep_(std::move(sleep)) {}

ConceptDraft OperatorSuite::generate(const std::string& prompt, OperatorCall call,
                                     const std::vector<SectionSpec>& schema, Rng& rng) {
  call.schema = schema;
  std::size_t malformed = 0;
  bool length_reprompted = false;
  while (true) {
    CompletionRequest request;
    request.prompt = prompt;
    request.max_length = settings_.max_length;
    request.temperature = settings_.temperature;
    request.variation_seed = rng.next();
    request.call = call;

    const CompletionResult result = complete(backend_, request, sleep_);
    ++completions_;

    ConceptDraft draft;
    try {
      draft = parse_concept(result.text, schema);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMalformedResponse) throw;
      if (++malformed > settings_.malformed_retries) {
        throw Error(ErrorCode::kGenerationFailed,
                    std::string(to_string(call.kind)) + ": " + e.what() + " after " +
                        std::to_string(malformed) + " responses");
      }
      continue;
    }
    if (exceeds_length_band(draft)) {
      if (!length_reprompted) {
        length_reprompted = true;
        continue;
      }
      draft = enforce_length_limits(std::move(draft));
    }
    return draft;
  }
}

ConceptDraft OperatorSuite::random_individual(Rng& rng) {
  const RenderedPrompt prompt = render_init_prompt(templates_.init, settings_.brief,
                                                   settings_.interpretations, rng);
  return generate(prompt.text, OperatorCall{OperatorKind::kInit, {}, {}, {}},
                  templates_.init.section_schema, rng);
}

ConceptDraft OperatorSuite::recombine(const ConceptDraft& a, const ConceptDraft& b, Rng& rng) {
  const RenderedPrompt prompt =
      render_crossover_prompt(templates_.crossover, settings_.brief, a.body, b.body);
  return generate(prompt.text, OperatorCall{OperatorKind::kCrossover, {a, b}, {}, {}},
                  templates_.crossover.section_schema, rng);
}

ConceptDraft OperatorSuite::mutate(const ConceptDraft& parent, std::string_view focus,
                                   Rng& rng) {
  const RenderedPrompt prompt = render_mutation_prompt(
      templates_.mutation, settings_.brief, parent.body, focus, settings_.focus_list);
  return generate(prompt.text,
                  OperatorCall{OperatorKind::kMutation, {parent}, std::string(focus), {}},
                  templates_.mutation.section_schema, rng);
}

ConceptDraft OperatorSuite::parse_seed(std::string_view text) const {
  try {
    return parse_concept(text, templates_.init.section_schema);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMalformedResponse) throw;
  }
  // Free-form seeds without recognisable sections keep their text whole.
  std::vector<Section> sections;
  for (const SectionSpec& spec : templates_.init.section_schema) {
    sections.push_back(Section{spec.label, {}, spec.char_limit});
  }
  const std::size_t slot = sections.size() > 1 ? 1 : 0;
  sections[slot].text = std::string(text::trim(text));
  return make_draft(std::move(sections));
}

}  // namespace evoforge::ops
