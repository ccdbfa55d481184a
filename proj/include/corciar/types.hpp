#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace corciar
{

using NodeId = std::uint32_t;

/// Seeded generator used everywhere randomness enters a run.
using Rng = std::mt19937_64;

/// Independent generator per (seed, stream) pair.
inline Rng
make_rng(std::uint64_t seed, std::uint32_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      stream,
                      0x636f72u};
    return Rng(seq);
}

namespace rng_stream
{
inline constexpr std::uint32_t kPlacement = 1;
inline constexpr std::uint32_t kFlows = 2;
inline constexpr std::uint32_t kMac = 3;
} // namespace rng_stream

/// Internal invariant violation inside a run (e.g. time going backwards).
class SimulationFault : public std::logic_error
{
  public:
    explicit SimulationFault(const std::string& what)
        : std::logic_error(what)
    {
    }
};

} // namespace corciar
