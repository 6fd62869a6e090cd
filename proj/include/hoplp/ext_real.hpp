#ifndef HOPLP_EXT_REAL_HPP
#define HOPLP_EXT_REAL_HPP

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <string>
#include <vector>

// Extended-real arithmetic. Forbidden configurations are encoded by a large
// finite sentinel instead of IEEE infinity so that message arithmetic never
// produces inf - inf. Everything at or above `forbidden_threshold` is treated
// as "forbidden region": such values are never reported as numeric bounds.

namespace hoplp {

inline constexpr double infinity_sentinel = 1e15;
inline constexpr double forbidden_threshold = 1e14;

inline bool is_forbidden(double v) { return v >= forbidden_threshold; }

// Addition saturating at the sentinel.
inline double sat_add(double a, double b)
{
  const double s = a + b;
  return s >= infinity_sentinel ? infinity_sentinel : s;
}

inline double sat_add(double a, double b, double c) { return sat_add(sat_add(a, b), c); }

struct input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when every assignment of the high-order term is forbidden, i.e. the
// relaxation has no finite optimum to report.
struct infeasible_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Replaces forbidden entries by (largest finite entry + bump) so that dual
// messages derived from the table stay finite. Throws if nothing is finite.
inline void clamp_forbidden(std::vector<double>& table, const char* what, double bump = 1e6)
{
  double max_finite = -infinity_sentinel;
  for (double v : table)
    if (!is_forbidden(v)) max_finite = std::max(max_finite, v);
  if (max_finite == -infinity_sentinel)
    throw infeasible_error(std::string(what) + ": all entries forbidden");
  for (double& v : table)
    if (is_forbidden(v)) v = max_finite + bump;
}

template <typename Table>
void clamp_forbidden_fixed(Table& table, const char* what, double bump = 1e6)
{
  double max_finite = -infinity_sentinel;
  for (double v : table)
    if (!is_forbidden(v)) max_finite = std::max(max_finite, v);
  if (max_finite == -infinity_sentinel)
    throw infeasible_error(std::string(what) + ": all entries forbidden");
  for (double& v : table)
    if (is_forbidden(v)) v = max_finite + bump;
}

} // namespace hoplp

#endif
