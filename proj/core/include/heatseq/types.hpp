#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace heatseq {

enum class RiskLevel : std::uint8_t { Low = 0, Moderate = 1, High = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<RiskLevel, kNumClasses> kAllRiskLevels{RiskLevel::Low, RiskLevel::Moderate,
                                                                   RiskLevel::High};

constexpr std::size_t index_of(RiskLevel r) { return static_cast<std::size_t>(r); }

std::string_view to_string(RiskLevel r);
std::optional<RiskLevel> parse_risk_level(std::string_view s);

enum class Channel : std::uint8_t { HR, HRV, SpO2, RespRate, Stress, AmbientTemp, Humidity };

inline constexpr std::size_t kNumChannels = 7;
inline constexpr std::array<Channel, kNumChannels> kAllChannels{
    Channel::HR,     Channel::HRV,         Channel::SpO2,    Channel::RespRate,
    Channel::Stress, Channel::AmbientTemp, Channel::Humidity};
// The five wearable channels the models consume by default.
inline constexpr std::array<Channel, 5> kPhysiologicalChannels{Channel::HR, Channel::HRV, Channel::SpO2,
                                                               Channel::RespRate, Channel::Stress};

constexpr std::size_t index_of(Channel c) { return static_cast<std::size_t>(c); }

std::string_view to_string(Channel c);
std::optional<Channel> parse_channel(std::string_view s);

// Seconds since the Unix epoch (UTC).
using Timestamp = std::int64_t;

}  // namespace heatseq
