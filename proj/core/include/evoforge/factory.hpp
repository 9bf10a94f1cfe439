#pragma once

// Builds backends, templates and channels from configuration.

#include <memory>
#include <istream>
#include <ostream>

#include "evoforge/domain.hpp"
#include "evoforge/feedback/channel.hpp"
#include "evoforge/operators/backend.hpp"
#include "evoforge/operators/template.hpp"

namespace evoforge {

std::unique_ptr<ops::CompletionBackend> make_backend(const BackendSettings& settings);

/// Loads the init/crossover/mutation templates named in the config.
ops::OperatorTemplates load_campaign_templates(const CampaignConfig& config);

/// Console output goes to `out`; console votes are read from `in` when set.
std::unique_ptr<feedback::ChannelAdapter> make_channel(const ChannelSettings& settings,
                                                       std::ostream& out,
                                                       std::istream* in = nullptr);

}  // namespace evoforge
