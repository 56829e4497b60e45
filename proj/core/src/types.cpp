#include "heatseq/types.hpp"

namespace heatseq {

std::string_view to_string(RiskLevel r) {
  switch (r) {
    case RiskLevel::Low: return "Low";
    case RiskLevel::Moderate: return "Moderate";
    case RiskLevel::High: return "High";
  }
  return "?";
}

std::optional<RiskLevel> parse_risk_level(std::string_view s) {
  for (RiskLevel r : kAllRiskLevels) {
    if (s == to_string(r)) return r;
  }
  return std::nullopt;
}

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::HR: return "HR";
    case Channel::HRV: return "HRV";
    case Channel::SpO2: return "SpO2";
    case Channel::RespRate: return "RespRate";
    case Channel::Stress: return "Stress";
    case Channel::AmbientTemp: return "AmbientTemp";
    case Channel::Humidity: return "Humidity";
  }
  return "?";
}

std::optional<Channel> parse_channel(std::string_view s) {
  for (Channel c : kAllChannels) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

}  // namespace heatseq
