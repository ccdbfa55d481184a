#include "corciar/channel_model.hpp"
#include "corciar/types.hpp"

#include <doctest.h>

#include <cstdlib>
#include <random>

using namespace corciar::channel;

namespace
{

SeparationClass
oracle_class(int a, int b)
{
    const int d = std::abs(a - b);
    if (d == 0)
    {
        return SeparationClass::SelfSame;
    }
    if (d <= 3)
    {
        return SeparationClass::AdjacentSevere;
    }
    if (d == 4)
    {
        return SeparationClass::PartialAcceptable;
    }
    return SeparationClass::Orthogonal;
}

} // namespace

TEST_CASE("channel ids outside 1..11 are rejected")
{
    CHECK_THROWS_AS(ChannelId{0}, std::out_of_range);
    CHECK_THROWS_AS(ChannelId{12}, std::out_of_range);
    CHECK(ChannelId{11}.value() == 11);
}

TEST_CASE("separation examples")
{
    CHECK(separation(ChannelId{1}, ChannelId{6}) == 5);
    CHECK(separation(ChannelId{4}, ChannelId{4}) == 0);
    CHECK(separation(ChannelId{11}, ChannelId{2}) == 9);
}

TEST_CASE("classify examples")
{
    CHECK(classify(ChannelId{1}, ChannelId{6}) == SeparationClass::Orthogonal);
    CHECK(classify(ChannelId{1}, ChannelId{3}) == SeparationClass::AdjacentSevere);
    CHECK(classify(ChannelId{1}, ChannelId{5}) == SeparationClass::PartialAcceptable);
    CHECK(classify(ChannelId{7}, ChannelId{7}) == SeparationClass::SelfSame);
}

TEST_CASE("separation is symmetric and classify matches the brute-force oracle")
{
    for (int a = 1; a <= 11; ++a)
    {
        for (int b = 1; b <= 11; ++b)
        {
            CAPTURE(a);
            CAPTURE(b);
            CHECK(separation(ChannelId{a}, ChannelId{b}) == separation(ChannelId{b}, ChannelId{a}));
            CHECK(classify(ChannelId{a}, ChannelId{b}) == oracle_class(a, b));
        }
    }
}

TEST_CASE("pseudocode acceptance pairs are orthogonal")
{
    for (int c = 1; c <= 6; ++c)
    {
        if (c + 5 <= 11)
        {
            CHECK(classify(ChannelId{c + 5}, ChannelId{c}) == SeparationClass::Orthogonal);
        }
    }
    for (int c = 7; c <= 11; ++c)
    {
        CHECK(classify(ChannelId{(c + 5) % 11}, ChannelId{c}) == SeparationClass::Orthogonal);
    }
}

TEST_CASE("default interference factor")
{
    CHECK(interference_factor(ChannelId{3}, ChannelId{3}) == doctest::Approx(1.0));
    CHECK(interference_factor(ChannelId{1}, ChannelId{6}) == 0.0);
    CHECK(interference_factor(ChannelId{1}, ChannelId{5}) == doctest::Approx(0.2));
    for (int a = 1; a <= 11; ++a)
    {
        for (int b = 1; b <= 11; ++b)
        {
            const bool orth = classify(ChannelId{a}, ChannelId{b}) == SeparationClass::Orthogonal;
            CHECK((interference_factor(ChannelId{a}, ChannelId{b}) == 0.0) == orth);
        }
    }
}

TEST_CASE("interference profile tables")
{
    const auto p = InterferenceProfile::from_table({1.0, 0.7, 0.4, 0.2, 0.05});
    CHECK(p.factor(3) == doctest::Approx(0.2));
    CHECK(p.factor(5) == 0.0);
    CHECK(p.factor(10) == 0.0);
    CHECK_THROWS(InterferenceProfile::from_table({0.9, 0.7, 0.4, 0.2, 0.1}));
    CHECK_THROWS(InterferenceProfile::from_table({1.0, 0.5, 0.6, 0.2, 0.1}));
}

TEST_CASE("pcl update examples")
{
    PclTable fresh;
    CHECK(fresh.count(Preference::Medium) == 11);

    auto t = pcl_update(fresh, ChannelObservation::self_selected(ChannelId{6}));
    CHECK(t.preference(ChannelId{6}) == Preference::High);
    CHECK(t.count(Preference::Medium) == 10);

    t = pcl_update(t, ChannelObservation::neighbor_took(ChannelId{11}));
    CHECK(t.preference(ChannelId{11}) == Preference::Low);

    t = pcl_update(t, ChannelObservation::self_selected(ChannelId{3}));
    CHECK(t.preference(ChannelId{3}) == Preference::High);
    CHECK(t.preference(ChannelId{6}) == Preference::Medium);

    t = pcl_update(t, ChannelObservation::rollover());
    CHECK(t.count(Preference::High) == 0);
    CHECK(t.beacon_interval_id() == 1);
}

TEST_CASE("pcl select examples")
{
    PclTable t;
    CHECK(pcl_select(t).value() == 1);
    t.apply(ChannelObservation::self_selected(ChannelId{6}));
    CHECK(pcl_select(t).value() == 6);

    PclTable u;
    u.apply(ChannelObservation::neighbor_took(ChannelId{1}));
    u.apply(ChannelObservation::neighbor_took(ChannelId{2}));
    CHECK(pcl_select(u).value() == 3);
}

TEST_CASE("pcl never holds two High entries under random observations")
{
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<int> ch(1, 11);
    PclTable t;
    for (int i = 0; i < 5000; ++i)
    {
        switch (kind(rng))
        {
        case 0:
            t = pcl_update(t, ChannelObservation::self_selected(ChannelId{ch(rng)}));
            break;
        case 1:
            t = pcl_update(t, ChannelObservation::neighbor_took(ChannelId{ch(rng)}));
            break;
        default:
            t = pcl_update(t, ChannelObservation::rollover());
            break;
        }
        REQUIRE(t.count(Preference::High) <= 1);
        const auto pick = pcl_select(t);
        for (int c = 1; c <= 11; ++c)
        {
            CHECK(static_cast<int>(t.preference(ChannelId{c})) <= static_cast<int>(t.preference(pick)));
        }
    }
}
