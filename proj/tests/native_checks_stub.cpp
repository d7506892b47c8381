#include "native_checks.hpp"

namespace simdrt::testing {

std::vector<std::string> native_figure_suite() { return {"native backend not compiled in"}; }

std::vector<std::string> native_lane_equivalence(std::uint64_t, int) {
  return {"native backend not compiled in"};
}

}  // namespace simdrt::testing
