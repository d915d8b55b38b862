#include <doctest.h>

#include <cmath>
#include <vector>

#include "homsum/parallel.hpp"
#include "homsum/rng.hpp"

using namespace homsum;

TEST_CASE("philox known-answer vectors") {
  using C = Philox4x64::Counter;
  CHECK(Philox4x64::block({0, 0, 0, 0}, {0, 0}) ==
        C{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL});
  CHECK(Philox4x64::block({4, 9, 11, 13}, {5, 7}) ==
        C{0xbe383fe3e3052bc0ULL, 0x69bc0c11de9190c2ULL, 0xde07a1219da07512ULL, 0x1fc6e8708e341618ULL});
  CHECK(Philox4x64::block({1, 0, 0, 0}, {0, 0}) ==
        C{0x2f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL, 0x1c8667a55d902e79ULL, 0x907d7a052fd5b4dcULL});
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 3, 17);
  RngStream b(42, 3, 17);
  RngStream c(42, 4, 17);
  RngStream d(42, 3, 18);
  int same_c = 0;
  int same_d = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    same_c += x == c.next_u64();
    same_d += x == d.next_u64();
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
}

TEST_CASE("uniforms lie in the open unit interval with the right mean") {
  RngStream s(7, 0, 0);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("chunked execution does not depend on worker count") {
  auto run = [](unsigned workers) {
    std::vector<double> out(1000);
    parallel_chunks(out.size(), 64, workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) out[i] = RngStream(5, 0, i).uniform();
    });
    return out;
  };
  CHECK(run(1) == run(3));
  CHECK(run(1) == run(8));
  CHECK_THROWS(parallel_chunks(10, 2, 2, [](std::size_t, std::size_t) { throw std::runtime_error("x"); }));
}
