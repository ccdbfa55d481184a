#include "corciar/channel_model.hpp"

#include <cstdlib>

namespace corciar::channel
{

std::string_view
to_string(SeparationClass cls) noexcept
{
    switch (cls)
    {
    case SeparationClass::SelfSame:
        return "SelfSame";
    case SeparationClass::AdjacentSevere:
        return "AdjacentSevere";
    case SeparationClass::PartialAcceptable:
        return "PartialAcceptable";
    case SeparationClass::Orthogonal:
        return "Orthogonal";
    }
    return "?";
}

std::string_view
to_string(Preference pref) noexcept
{
    switch (pref)
    {
    case Preference::Low:
        return "Low";
    case Preference::Medium:
        return "Medium";
    case Preference::High:
        return "High";
    }
    return "?";
}

int
separation(ChannelId a, ChannelId b) noexcept
{
    return std::abs(a.value() - b.value());
}

SeparationClass
classify_separation(int sep) noexcept
{
    if (sep == 0)
    {
        return SeparationClass::SelfSame;
    }
    if (sep < kOrthogonalSeparation - 1)
    {
        return SeparationClass::AdjacentSevere;
    }
    if (sep == kOrthogonalSeparation - 1)
    {
        return SeparationClass::PartialAcceptable;
    }
    return SeparationClass::Orthogonal;
}

SeparationClass
classify(ChannelId a, ChannelId b) noexcept
{
    return classify_separation(separation(a, b));
}

InterferenceProfile
InterferenceProfile::linear()
{
    std::array<double, kOrthogonalSeparation> table{};
    for (int s = 0; s < kOrthogonalSeparation; ++s)
    {
        table[s] = 1.0 - static_cast<double>(s) / kOrthogonalSeparation;
    }
    return InterferenceProfile{table};
}

InterferenceProfile
InterferenceProfile::from_table(const std::array<double, kOrthogonalSeparation>& overlap)
{
    if (overlap[0] != 1.0)
    {
        throw std::invalid_argument("interference profile must be 1 at separation 0");
    }
    for (std::size_t s = 1; s < overlap.size(); ++s)
    {
        if (overlap[s] < 0.0 || overlap[s] > overlap[s - 1])
        {
            throw std::invalid_argument("interference profile must be nonincreasing within [0,1]");
        }
    }
    return InterferenceProfile{overlap};
}

double
InterferenceProfile::factor(int sep) const noexcept
{
    if (sep < 0)
    {
        sep = -sep;
    }
    return sep >= kOrthogonalSeparation ? 0.0 : m_table[sep];
}

double
InterferenceProfile::factor(ChannelId a, ChannelId b) const noexcept
{
    return factor(separation(a, b));
}

double
interference_factor(ChannelId a, ChannelId b) noexcept
{
    static const InterferenceProfile kLinear = InterferenceProfile::linear();
    return kLinear.factor(a, b);
}

PclTable::PclTable()
{
    m_prefs.fill(Preference::Medium);
}

Preference
PclTable::preference(ChannelId c) const noexcept
{
    return m_prefs[c.value() - 1];
}

int
PclTable::count(Preference pref) const noexcept
{
    int n = 0;
    for (auto p : m_prefs)
    {
        n += p == pref ? 1 : 0;
    }
    return n;
}

void
PclTable::apply(const ChannelObservation& obs)
{
    switch (obs.kind)
    {
    case ChannelObservation::Kind::SelfSelected: {
        const auto idx = ChannelId{obs.channel}.value() - 1;
        for (auto& p : m_prefs)
        {
            if (p == Preference::High)
            {
                p = Preference::Medium;
            }
        }
        m_prefs[idx] = Preference::High;
        break;
    }
    case ChannelObservation::Kind::NeighborTook:
        m_prefs[ChannelId{obs.channel}.value() - 1] = Preference::Low;
        break;
    case ChannelObservation::Kind::BeaconRollover:
        for (auto& p : m_prefs)
        {
            if (p == Preference::High)
            {
                p = Preference::Medium;
            }
        }
        ++m_beacon;
        break;
    }
}

ChannelId
PclTable::select() const noexcept
{
    int best = 0;
    for (int i = 1; i < kChannelCount; ++i)
    {
        if (m_prefs[i] > m_prefs[best])
        {
            best = i;
        }
    }
    return ChannelId{best + 1};
}

PclTable
pcl_update(PclTable table, const ChannelObservation& obs)
{
    table.apply(obs);
    return table;
}

ChannelId
pcl_select(const PclTable& table) noexcept
{
    return table.select();
}

} // namespace corciar::channel
