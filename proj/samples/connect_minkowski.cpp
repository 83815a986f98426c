// Connect two events of the flat Minkowski-like spacetime and print the
// reduced action, the full action and the geodesic residual.
#include <cstdio>

#include "godel/godel.hpp"

int main() {
  const godel::SpacetimeSpec spec = godel::make_custom(2, "1", "0", "1");
  godel::Endpoints ep;
  ep.x_p = {0.0, 0.0};
  ep.x_q = {1.0, 0.0};
  ep.y_q = 2.0;
  ep.t_q = 1.0;
  const godel::GeodesicSolution sol = godel::minimize_action(spec, ep, godel::SolverConfig{});
  std::printf("J = %.12g  f = %.12g  residual = %.3g  converged = %s\n", sol.action_J,
              sol.action_f, sol.residual, sol.converged ? "yes" : "no");
  return sol.converged ? 0 : 1;
}
