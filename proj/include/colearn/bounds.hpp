#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace colearn {

// Named closed-form evaluations behind the `bounds` command:
//   reliability  --alpha --p1 --p2
//   corollary    --tau --K [--means m1,...,mK | --p2]
//   learnability --q --zeta --N
//   init         --N --mu --p1 --K --delta1
//   mixing       --graph --epsilon [--start]
// Arguments arrive as strings keyed by flag name (without dashes). A single
// argument may hold a comma-separated list, which turns the output into a
// "param,value,bound" CSV; otherwise the output is name=value lines.
std::string evaluate_bounds(std::string_view name, const std::map<std::string, std::string>& args,
                            int decimals = 6);

std::vector<std::string_view> bound_names();

}  // namespace colearn
