// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "mathsynth/expr.hpp"

namespace mathsynth {

struct Task {
  std::string id;
  std::string template_id;
  Equation input;
  Rational goal;
};

}  // namespace mathsynth
