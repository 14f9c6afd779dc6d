#pragma once

#include "netform/ambient.hpp"
#include "netform/analysis.hpp"
#include "netform/builtin.hpp"
#include "netform/error.hpp"
#include "netform/expr.hpp"
#include "netform/forms.hpp"
#include "netform/net.hpp"
#include "netform/random.hpp"
#include "netform/solver.hpp"
#include "netform/sparse.hpp"

namespace netform {

inline constexpr const char* version = "0.1.0";

}  // namespace netform
