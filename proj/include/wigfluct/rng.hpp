#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace wigfluct {

using Engine = std::mt19937_64;

// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent stream seed from a master seed and a path of
// counters, e.g. stream_seed(master, {n, trial}). Order of the path matters.
std::uint64_t stream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

Engine make_engine(std::uint64_t seed);

}  // namespace wigfluct
