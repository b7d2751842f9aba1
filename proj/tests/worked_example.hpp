// Worked example: ((1+2x)+3x) = 4 solved two ways.
#pragma once

#include <array>

namespace mathsynth::testing {

inline constexpr std::array<const char*, 4> kWorkedShort = {
    "((1+2x)+3x) = 4",
    "5x+1 = 4",
    "5x = 3",
    "x = 3/5",
};

inline constexpr std::array<const char*, 16> kWorkedLong = {
    "((1+2x)+3x) = 4",
    "1+(2x+3x) = 4",
    "((1+(2x+3x))-1) = (4-1)",
    "(((2x+3x)+1)-1) = (4-1)",
    "((((2+3)*x)+1)-1) = (4-1)",
    "(((2+3)*x)+(1-1)) = (4-1)",
    "(5x+(1-1)) = (4-1)",
    "(5x+0) = (4-1)",
    "5x = (4-1)",
    "(x*5) = (4-1)",
    "(x*5) = 3",
    "((x*5)/5) = (3/5)",
    "(x*(5/5)) = (3/5)",
    "(x*1) = (3/5)",
    "x = (3/5)",
    "x = 3/5",
};

}  // namespace mathsynth::testing
