#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>

namespace mnol {

/// Stream tags used when deriving per-index seeds.
enum class Stream : std::uint64_t {
  kAlpha = 1,
  kInput = 2,
  kPoint = 3,
  kNoise = 4,
  kInit = 5,
  kBatch = 6,
  kTest = 7,
  kRun = 8,
  kQuadrature = 9,
};

/// Derives an independent seed from a master seed and an index path.
/// Each (master, stream, path) triple maps to its own generator, so a cell
/// of a hierarchical draw never depends on how many cells precede it.
std::uint64_t stream_seed(std::uint64_t master, Stream stream,
                          std::initializer_list<std::uint64_t> path = {});

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t master, Stream stream,
                    std::initializer_list<std::uint64_t> path = {}) {
  return Rng(stream_seed(master, stream, path));
}

/// Runs `body(i)` for i in [0, count) on up to `threads` workers. Results
/// must be written to pre-sized, index-addressed storage by the caller.
/// threads == 0 selects std::thread::hardware_concurrency().
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace mnol
