#pragma once

#include <cstdint>
#include <random>

namespace tvvar {

/// Seed of the independent stream `stream` derived from a master seed.
/// Streams are keyed by (seed, stream) alone, so replication i produces the
/// same draws regardless of which worker runs it or in what order.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// Engine for one stream.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0);

} // namespace tvvar
