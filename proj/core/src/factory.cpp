#include "evoforge/factory.hpp"

#include "evoforge/errors.hpp"
#include "evoforge/feedback/console_channel.hpp"
#include "evoforge/feedback/telegram_channel.hpp"
#include "evoforge/feedback/web_channel.hpp"
#include "evoforge/operators/http_backend.hpp"
#include "evoforge/operators/mock_backend.hpp"

namespace evoforge {

std::unique_ptr<ops::CompletionBackend> make_backend(const BackendSettings& settings) {
  if (settings.kind == "mock") {
    return std::make_unique<ops::MockBackend>(settings.mock_seed, settings.retry);
  }
  if (settings.kind == "http") {
    return std::make_unique<ops::HttpChatBackend>(ops::profile_from_settings(settings));
  }
  throw Error(ErrorCode::kInvalidConfig, "backend.kind: unknown backend '" + settings.kind + "'");
}

ops::OperatorTemplates load_campaign_templates(const CampaignConfig& config) {
  const TemplatePaths& t = config.templates;
  if (t.init.empty() || t.crossover.empty() || t.mutation.empty()) {
    throw Error(ErrorCode::kInvalidTemplate,
                "templates.init, templates.crossover and templates.mutation must all be set");
  }
  return ops::load_templates(t.init, t.crossover, t.mutation);
}

std::unique_ptr<feedback::ChannelAdapter> make_channel(const ChannelSettings& settings,
                                                       std::ostream& out, std::istream* in) {
  if (settings.kind == "console") return std::make_unique<feedback::ConsoleChannel>(out, in);
  if (settings.kind == "web") return std::make_unique<feedback::WebChannel>();
  if (settings.kind == "telegram") return std::make_unique<feedback::TelegramChannel>(settings);
  throw Error(ErrorCode::kInvalidConfig, "channel.kind: unknown channel '" + settings.kind + "'");
}

}  // namespace evoforge
