#include <doctest.h>

#include <atomic>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "memkit/parallel.hpp"

using memkit::parallel_for;
using memkit::thread_count;

TEST_CASE("thread count is positive") { CHECK(thread_count() >= 1); }

TEST_CASE("every index is visited exactly once") {
  for (std::size_t n : {0u, 1u, 2u, 7u, 100u, 10007u}) {
    for (std::size_t min_chunk : {1u, 16u, 1000u}) {
      std::vector<int> hits(n, 0);
      parallel_for(
          n,
          [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) ++hits[i];
          },
          min_chunk);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(hits[i] == 1);
    }
  }
}

TEST_CASE("chunks are contiguous and respect min_chunk") {
  std::atomic<std::size_t> chunks{0};
  std::atomic<bool> small{false};
  parallel_for(
      1000,
      [&](std::size_t begin, std::size_t end) {
        ++chunks;
        if (end - begin < 100 && end != 1000) small = true;
      },
      100);
  CHECK(chunks >= 1);
  CHECK(chunks <= thread_count());
  CHECK_FALSE(small);
}

TEST_CASE("the lowest failing chunk's exception is rethrown") {
  CHECK_THROWS_AS(parallel_for(100,
                               [](std::size_t begin, std::size_t) {
                                 if (begin == 0) throw std::runtime_error("first");
                               }),
                  std::runtime_error);
  // The pool stays usable afterwards.
  std::atomic<std::size_t> sum{0};
  parallel_for(10, [&](std::size_t b, std::size_t e) { sum += e - b; });
  CHECK(sum == 10);
}
