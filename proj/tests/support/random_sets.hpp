#pragma once
// Seeded generators of symbolic index sets for property tests.

#include <random>
#include <vector>

#include "rt/index_set.hpp"

namespace rt::testing {

inline Generator random_generator(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 9);
  static constexpr Index kSteps[] = {1, 2, 3, 4, 6};
  switch (kind(rng)) {
    case 0:
    case 1:
      return Generator::full();
    case 2:
    case 3:
    case 4: {
      std::uniform_int_distribution<Index> s(1, 4), d(0, 4);
      return Generator::arithmetic(s(rng), kSteps[d(rng)]);
    }
    case 5:
    case 6: {
      std::uniform_int_distribution<Index> b(2, 4);
      return Generator::geometric(b(rng));
    }
    case 7: {
      std::uniform_int_distribution<Index> e(2, 3);
      return Generator::power(e(rng));
    }
    default: {
      std::uniform_int_distribution<Index> count(0, 3), v(0, 30);
      std::vector<Index> values(static_cast<std::size_t>(count(rng)));
      for (auto& x : values) x = v(rng);
      return Generator::finite(values);
    }
  }
}

/// One to three literals, each negated with probability about 1/3.
inline CoordSet random_cube(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 3), neg(0, 2);
  std::vector<Generator> inc, exc;
  const int k = count(rng);
  for (int i = 0; i < k; ++i) (neg(rng) == 0 ? exc : inc).push_back(random_generator(rng));
  return CoordSet(inc, exc);
}

/// Union of `terms` products of single generators.
inline IndexSet random_set(std::mt19937_64& rng, std::size_t n, std::size_t terms) {
  std::vector<Product> ts;
  for (std::size_t t = 0; t < terms; ++t) {
    Product p;
    for (std::size_t j = 0; j < n; ++j) p.emplace_back(random_generator(rng));
    ts.push_back(std::move(p));
  }
  return IndexSet(n, std::move(ts));
}

}  // namespace rt::testing
