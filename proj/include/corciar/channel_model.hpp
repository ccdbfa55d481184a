#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace corciar::channel
{

/// Number of channels in the 2.4 GHz ISM band plan.
inline constexpr int kChannelCount = 11;

/// Separation at and beyond which two channels do not overlap (e.g. 1/6/11).
inline constexpr int kOrthogonalSeparation = 5;

/// A 2.4 GHz channel index in 1..11.
class ChannelId
{
  public:
    constexpr explicit ChannelId(int id)
        : m_id{id}
    {
        if (id < 1 || id > kChannelCount)
        {
            throw std::out_of_range("channel id must be in 1..11");
        }
    }

    constexpr int value() const noexcept
    {
        return m_id;
    }

    friend constexpr auto operator<=>(ChannelId, ChannelId) = default;

  private:
    int m_id;
};

enum class SeparationClass
{
    SelfSame,
    AdjacentSevere,
    PartialAcceptable,
    Orthogonal,
};

std::string_view to_string(SeparationClass cls) noexcept;

/// |a - b|; the band is linear in frequency, so there is no wraparound.
int separation(ChannelId a, ChannelId b) noexcept;

SeparationClass classify_separation(int separation) noexcept;
SeparationClass classify(ChannelId a, ChannelId b) noexcept;

/**
 * Maps channel separation to a dimensionless overlap factor in [0, 1].
 *
 * A profile is a table over separations 0..4; separations of 5 or more are
 * always 0. The table must start at 1 and be nonincreasing.
 */
class InterferenceProfile
{
  public:
    /// max(0, 1 - separation / 5)
    static InterferenceProfile linear();

    static InterferenceProfile from_table(const std::array<double, kOrthogonalSeparation>& overlap);

    double factor(int separation) const noexcept;
    double factor(ChannelId a, ChannelId b) const noexcept;

  private:
    explicit InterferenceProfile(const std::array<double, kOrthogonalSeparation>& table)
        : m_table{table}
    {
    }

    std::array<double, kOrthogonalSeparation> m_table;
};

/// Overlap factor under the default linear profile.
double interference_factor(ChannelId a, ChannelId b) noexcept;

enum class Preference
{
    Low,
    Medium,
    High,
};

std::string_view to_string(Preference pref) noexcept;

/// One channel-usage observation fed to a preferable channel list.
struct ChannelObservation
{
    enum class Kind
    {
        SelfSelected,
        NeighborTook,
        BeaconRollover,
    };

    Kind kind;
    int channel{0}; // ignored for BeaconRollover

    static ChannelObservation self_selected(ChannelId c)
    {
        return {Kind::SelfSelected, c.value()};
    }

    static ChannelObservation neighbor_took(ChannelId c)
    {
        return {Kind::NeighborTook, c.value()};
    }

    static ChannelObservation rollover()
    {
        return {Kind::BeaconRollover, 0};
    }
};

/**
 * Preferable channel list: ranks every channel High, Medium or Low.
 *
 * High marks the channel this node selected in the current beacon interval
 * (at most one), Low marks channels taken by a neighbor in transmission range,
 * everything else is Medium.
 */
class PclTable
{
  public:
    PclTable();

    Preference preference(ChannelId c) const noexcept;
    std::uint64_t beacon_interval_id() const noexcept
    {
        return m_beacon;
    }
    int count(Preference pref) const noexcept;

    void apply(const ChannelObservation& obs);

    /// Best-ranked channel; ties go to the lowest channel id.
    ChannelId select() const noexcept;

  private:
    std::array<Preference, kChannelCount> m_prefs;
    std::uint64_t m_beacon{0};
};

PclTable pcl_update(PclTable table, const ChannelObservation& obs);
ChannelId pcl_select(const PclTable& table) noexcept;

} // namespace corciar::channel
