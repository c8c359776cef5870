// Library walk-through: the Cousin problem with a pole at the two bad
// points of x^2 (x-1)^2 + y^2, solved after blowing up.

#include <iostream>

#include "cechblow/cousin.hpp"

using namespace cechblow;

int main() {
  const std::vector<std::string> xy = {"x", "y"};
  const Poly q1 = parse_poly("x^2 + y^2", xy);
  const Poly q2 = parse_poly("(x-1)^2 + y^2", xy);
  const Covering cov = make_covering(0, {make_open_set(0, q1, syntactic_hints(q1)),
                                         make_open_set(0, q2, syntactic_hints(q2))});
  const RatFunc f1(Poly::constant(2, 1), parse_poly("x^2*(x-1)^2 + y^2", xy));
  const CousinData data{cov, {f1, RatFunc::constant(2, 0)}};

  // No bounded solution exists on the plane itself...
  std::cout << "direct (D=4, N=4): " << (solve_direct(data, 4, 4) ? "solved" : "not found") << "\n";

  // ...but one does after two blowups.
  const CousinReport rep = solve_blownup(data);
  if (rep.status != CousinReport::Status::Solved) {
    std::cout << "failed: " << rep.cocycle.reason << "\n";
    return 1;
  }
  const CousinSolution& s = *rep.solution;
  std::cout << "tower depth " << s.tower.depth() << ", N = " << rep.cocycle.power << "\n";
  for (const auto& [leaf, f] : s.f) {
    const auto& names = s.tower.chart(leaf).names;
    std::cout << "  chart " << leaf << ": f = (" << to_string(f.num(), names) << ") / (" << to_string(f.den(), names)
              << ")\n";
  }
  std::string why;
  std::cout << "certificates replay: " << (verify_solution(data, s, &why) ? "yes" : "no " + why) << "\n";
  return 0;
}
