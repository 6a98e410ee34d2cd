#pragma once

#include "hcpack/geometry.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace testing_support {

using hcpack::Scalar;

inline Scalar Q(const char* s) { return hcpack::parse_scalar(s); }

inline std::vector<Scalar> Qs(std::initializer_list<const char*> xs) {
  std::vector<Scalar> out;
  for (auto x : xs) out.push_back(Q(x));
  return out;
}

inline hcpack::Item item(int id, const char* side, const char* profit = "1") {
  return hcpack::make_item(id, Q(side), Q(profit));
}

inline std::vector<hcpack::Item> items_of(std::initializer_list<const char*> sides) {
  std::vector<hcpack::Item> out;
  int id = 0;
  for (auto s : sides) out.push_back(item(id++, s));
  return out;
}

inline hcpack::Cuboid unit(std::size_t d) { return hcpack::Cuboid::unit(d); }

}  // namespace testing_support
